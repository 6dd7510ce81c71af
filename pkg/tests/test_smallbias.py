import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biasmask.errors import CapacityError, DimensionError
from biasmask.ensembles import code_family, point_mass_family, random_distribution, weighted_family
from biasmask.gf2 import BitString
from biasmask.privcorrect import LinearCode, dual_membership_bias, hamming74, random_code_family
from biasmask.smallbias import (
    IRREDUCIBLE,
    BiasedFamily,
    WeightedSpace,
    aghp_construct,
    aghp_sample,
    bias_at,
    bias_spectrum,
    code_space,
    dumps_space,
    family_bias,
    family_bias_spectrum,
    gf_mul,
    is_irreducible,
    loads_space,
    max_bias,
)


def naive_bias(space: WeightedSpace, alpha: int) -> float:
    return sum(p * (-1) ** bin(int(a) & alpha).count("1") for a, p in zip(space.points, space.probs))


def test_bias_at_examples():
    full = WeightedSpace.full(4)
    for alpha in range(1, 16):
        assert abs(bias_at(full, BitString(4, alpha))) < 1e-15
    pm = WeightedSpace.point_mass(4)
    for alpha in range(16):
        assert bias_at(pm, BitString(4, alpha)) == 1.0
    rep = WeightedSpace.uniform(2, [0b00, 0b11])
    # terms: 1/2 (-1)^0 + 1/2 (-1)^(alpha.11)
    assert bias_at(rep, BitString.from_str("01")) == 0.0
    assert bias_at(rep, BitString.from_str("11")) == 1.0


def test_bias_length_mismatch():
    with pytest.raises(DimensionError):
        bias_at(WeightedSpace.full(3), BitString(4, 1))


def test_bias_at_zero_is_one(rng):
    for n in range(1, 9):
        sp = WeightedSpace.from_vector(n, random_distribution(rng, 1 << n, int(rng.integers(1, 1 << n))))
        assert bias_at(sp, BitString(n, 0)) == pytest.approx(1.0, abs=1e-12)
        assert bias_spectrum(sp)[0] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n", range(1, 11))
def test_fast_bias_matches_naive(n, rng):
    sp = WeightedSpace.from_vector(n, random_distribution(rng, 1 << n, int(rng.integers(1, 1 << n))))
    spec = bias_spectrum(sp)
    alphas = range(1 << n) if n <= 6 else rng.integers(0, 1 << n, 64)
    for a in alphas:
        assert abs(spec[a] - naive_bias(sp, int(a))) <= 1e-12
    naive_max = max(abs(naive_bias(sp, a)) for a in range(1, 1 << n)) if n <= 6 else None
    if naive_max is not None:
        assert abs(max_bias(sp) - naive_max) <= 1e-12


def test_max_bias_examples():
    assert max_bias(WeightedSpace.full(6)) < 1e-15
    rep = code_space(LinearCode.from_generator([[1, 1, 1, 1]]))
    assert max_bias(rep) == pytest.approx(1.0)
    assert max_bias(code_space(LinearCode.from_generator(np.eye(5, dtype=int)))) < 1e-15


def test_capacity_error():
    big = WeightedSpace.point_mass(30)
    with pytest.raises(CapacityError):
        max_bias(big)


def test_code_space_examples():
    rep = code_space(LinearCode.from_generator([[1, 1]]))
    assert list(rep.points) == [0, 3] and np.allclose(rep.probs, 0.5)
    ham = code_space(hamming74())
    assert len(ham) == 16 and np.allclose(ham.probs, 1 / 16)


def test_code_space_bias_is_dual_indicator(rng):
    for n in range(2, 13):
        k = int(rng.integers(1, n + 1))
        from biasmask.ensembles import random_full_rank

        code = LinearCode.from_generator(random_full_rank(rng, k, n))
        spec = bias_spectrum(code_space(code))
        indicator = np.zeros(1 << n)
        indicator[code.dual_codewords()] = 1.0
        assert np.max(np.abs(spec - indicator)) <= 1e-12


def test_family_bias_examples(rng):
    sp = WeightedSpace.from_vector(5, random_distribution(rng, 32))
    assert family_bias(BiasedFamily.of([sp])) == pytest.approx(max_bias(sp), abs=1e-15)
    all_points = BiasedFamily.of([WeightedSpace.point_mass(3, a) for a in range(8)])
    assert family_bias(all_points) == pytest.approx(1.0)
    codes = random_code_family(rng, 8, 4, 6)
    assert family_bias(codes.as_biased_family()) == pytest.approx(dual_membership_bias(codes), abs=1e-12)


def test_jensen_consistency(rng):
    for maker in (weighted_family, point_mass_family, code_family):
        fam = maker(rng, 5, 6)
        rms = family_bias_spectrum(fam)
        mean_abs = np.mean([np.abs(bias_spectrum(m)) for m in fam.members], axis=0)
        assert np.all(mean_abs[1:] <= rms[1:] + 1e-12)


def test_delta_cache_matches_recomputation(rng):
    fam = weighted_family(rng, 4, 3)
    assert fam.delta == family_bias(fam)
    assert fam.delta == fam.delta


def test_irreducible_table():
    assert sorted(IRREDUCIBLE) == list(range(1, 17))
    for m, poly in IRREDUCIBLE.items():
        assert poly.bit_length() - 1 == m
        assert is_irreducible(poly)
    assert not is_irreducible(0b101)  # (x+1)^2


def test_gf_mul_field_axioms():
    m = 4
    elems = np.arange(16)
    table = gf_mul(elems[:, None], elems[None, :], m)
    assert np.array_equal(table, table.T)
    # every nonzero element has an inverse
    for a in range(1, 16):
        assert 1 in table[a]
    # distributivity over xor
    a, b, c = np.meshgrid(elems, elems, elems, indexing="ij")
    assert np.array_equal(gf_mul(a, b ^ c, m), gf_mul(a, b, m) ^ gf_mul(a, c, m))


def _aghp_direct(n, m):
    vec = np.zeros(1 << n)
    for x in range(1 << m):
        for y in range(1 << m):
            vec[aghp_sample(n, m, x, y)] += 1.0
    return vec / 4**m


@pytest.mark.parametrize("n,m", [(2, 4), (3, 3), (5, 3), (8, 4), (6, 5)])
def test_aghp_folding_matches_direct_enumeration(n, m):
    assert np.max(np.abs(aghp_construct(n, m).as_vector() - _aghp_direct(n, m))) <= 1e-15


def test_aghp_examples():
    assert max_bias(aghp_construct(2, 4)) <= 1 / 16
    assert max_bias(aghp_construct(8, 6)) <= 7 / 64
    # index count is 2^(2m); folded weights are multiples of 2^(-2m)
    for n, m in [(3, 2), (6, 3)]:
        sp = aghp_construct(n, m)
        counts = sp.probs * 4**m
        assert np.allclose(counts, np.round(counts)) and round(counts.sum()) == 4**m


def test_aghp_bound_grid():
    for n in range(2, 11):
        for m in range(1, 11):
            assert max_bias(aghp_construct(n, m)) <= (n - 1) / 2**m + 1e-12


def test_aghp_range_errors():
    with pytest.raises(DimensionError):
        aghp_construct(4, 0)
    with pytest.raises(DimensionError):
        aghp_construct(4, 17)
    with pytest.raises(DimensionError):
        aghp_construct(1, 3)


def test_weighted_space_invariants():
    with pytest.raises(DimensionError):
        WeightedSpace(2, np.array([0, 0]), np.array([0.5, 0.5]))
    with pytest.raises(DimensionError):
        WeightedSpace(2, np.array([0, 1]), np.array([0.5, 0.6]))
    with pytest.raises(DimensionError):
        WeightedSpace(2, np.array([4]), np.array([1.0]))


def test_space_file_roundtrip(rng):
    sp = aghp_construct(5, 3)
    back = loads_space(dumps_space(sp))
    assert np.array_equal(back.points, sp.points) and np.allclose(back.probs, sp.probs, rtol=0, atol=1e-15)
    u = WeightedSpace.uniform(4, [1, 7, 9])
    text = dumps_space(u)
    assert text.splitlines()[0] == "n=4 count=3 kind=uniform"
    assert loads_space(text).is_uniform()


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 8), st.data())
def test_bias_bounded(n, data):
    probs = data.draw(st.lists(st.floats(0, 1), min_size=1 << n, max_size=1 << n))
    if sum(probs) == 0:
        return
    vec = np.array(probs) / sum(probs)
    sp = WeightedSpace.from_vector(n, vec)
    assert np.all(np.abs(bias_spectrum(sp)) <= 1 + 1e-12)
