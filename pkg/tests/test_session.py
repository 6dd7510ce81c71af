import numpy as np
import pytest

from biasmask.cqstate import collision_entropy
from biasmask.errors import DimensionError
from biasmask.gf2 import BinMatrix
from biasmask.privcorrect import CodeFamily, LinearCode, random_code_family
from biasmask.session import EVE_FIXTURES, SessionParams, run_session, session_distances, source_state


def full_space_family(n):
    return CodeFamily((LinearCode.from_generator(np.eye(n, dtype=np.uint8)),))


def rank_oracle(n, ell):
    """E_G of the distance of G X from uniform when X is uniform and nothing else is known."""
    total = 0.0
    for gi in range(1 << (n * ell)):
        rows = tuple((gi >> (i * n)) & ((1 << n) - 1) for i in range(ell))
        r = BinMatrix(rows, n).rank()
        total += 2 * (1 - 2.0 ** (r - ell))
    return total / (1 << (n * ell))


@pytest.mark.parametrize("ell", [1, 2])
def test_independent_case(rng, ell):
    p = SessionParams(4, ell, full_space_family(4), eve="none")
    t = run_session(p, rng)
    assert t.key_freshness <= 1e-9
    assert t.key_security == pytest.approx(rank_oracle(4, ell), abs=1e-12)
    assert t.recovered == t.x and t.h2 == pytest.approx(4.0)


def test_independent_case_with_offset_code(rng):
    p = SessionParams(4, 1, random_code_family(rng, 4, 2, 3), eve="none")
    t = run_session(p, rng)
    assert t.key_freshness <= 1e-9
    assert t.security_margin >= -1e-9


@pytest.mark.parametrize("ell", [1, 2])
def test_copy_bit_n4_within_bound(rng, ell):
    for _ in range(3):
        p = SessionParams(4, ell, random_code_family(rng, 4, int(rng.integers(1, 4)), 4), eve="copy-bit")
        t = run_session(p, rng)
        assert t.security_margin >= -1e-9
        assert t.freshness_margin >= -1e-9


@pytest.mark.parametrize("eve", sorted(EVE_FIXTURES))
def test_all_fixtures_within_bound(rng, eve):
    p = SessionParams(5, 1, random_code_family(rng, 5, 2, 3), key_bits=2, eve=eve, noise=0.1)
    t = run_session(p, rng)
    assert t.security_margin >= -1e-9 and t.freshness_margin >= -1e-9


def test_fixture_entropies(rng):
    fam = random_code_family(rng, 4, 2, 2)
    expected = {"none": 4.0, "copy-bit": 3.0, "copy-two": 2.0}
    for eve, h in expected.items():
        src = source_state(SessionParams(4, 1, fam, eve=eve))
        assert collision_entropy(src, src.rho_b()) == pytest.approx(h, abs=1e-9)


def test_recovery_within_radius(rng):
    fam = CodeFamily((LinearCode.from_generator(np.array([[1, 1, 1, 1, 1]], dtype=np.uint8)),))
    for _ in range(20):
        t = run_session(SessionParams(5, 1, fam, eve="copy-bit", noise=0.2), rng)
        if t.within_radius:
            assert t.recovered == t.x


def test_distances_do_not_depend_on_rng(rng):
    p = SessionParams(4, 1, random_code_family(rng, 4, 2, 2), eve="bb84")
    a, b = run_session(p, np.random.default_rng(1)), run_session(p, np.random.default_rng(2))
    assert (a.key_security, a.key_freshness) == (b.key_security, b.key_freshness) == session_distances(p)


def test_deterministic_replay(rng):
    p = SessionParams(4, 2, random_code_family(rng, 4, 2, 3), eve="copy-two", noise=0.1)
    a = run_session(p, np.random.default_rng(42)).dumps()
    b = run_session(p, np.random.default_rng(42)).dumps()
    assert a == b and "composed_bound=" in a


def test_param_validation(rng):
    fam4 = random_code_family(rng, 4, 2, 1)
    with pytest.raises(DimensionError):
        SessionParams(7, 1, random_code_family(rng, 7, 2, 1))
    with pytest.raises(DimensionError):
        SessionParams(4, 3, fam4)
    with pytest.raises(DimensionError):
        SessionParams(4, 1, fam4, key_bits=3)
    with pytest.raises(DimensionError):
        SessionParams(4, 1, fam4, eve="unknown")
    with pytest.raises(DimensionError):
        SessionParams(4, 1, random_code_family(rng, 5, 2, 1))
