import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biasmask.errors import DimensionError
from biasmask.gf2 import BitString
from biasmask.fourier import (
    MatrixFunction,
    check_convolution_theorem,
    convolve,
    fourier,
    fourier_naive,
    l2_norm,
    random_matrix_function,
)
from biasmask.smallbias import WeightedSpace, bias_at


def test_shape_validation():
    with pytest.raises(DimensionError):
        MatrixFunction(2, np.zeros((3, 2, 2)))
    with pytest.raises(DimensionError):
        MatrixFunction(1, np.zeros((2, 2, 3)))
    with pytest.raises(DimensionError):
        convolve(MatrixFunction.zeros(1, 2), MatrixFunction.zeros(2, 2))


def test_convolution_with_point_identity(rng):
    for n in (1, 3):
        m = random_matrix_function(rng, n, 2)
        delta0 = MatrixFunction.point_identity(n, 2)
        assert np.allclose(convolve(m, delta0).table, m.table)
        assert np.allclose(convolve(delta0, m).table, m.table)


def test_convolution_with_shifted_point(rng):
    n, a = 3, 5
    m = random_matrix_function(rng, n, 2)
    out = convolve(m, MatrixFunction.point_identity(n, 2, at=a))
    xs = np.arange(8)
    assert np.allclose(out.table, m.table[xs ^ a])


def test_scalar_convolution_matches_loop(rng):
    f, g = rng.standard_normal(8), rng.standard_normal(8)
    expect = np.array([sum(f[y] * g[x ^ y] for y in range(8)) for x in range(8)])
    out = convolve(MatrixFunction.from_scalars(f), MatrixFunction.from_scalars(g))
    assert np.allclose(out.table[:, 0, 0], expect)


def test_fourier_matches_naive(rng):
    for n in range(1, 7):
        m = random_matrix_function(rng, n, 3)
        assert np.allclose(fourier(m).table, fourier_naive(m).table, atol=1e-12)


def test_fourier_of_bias_indicator():
    # F(P * I)(alpha) = 2^(-n/2) bias_alpha(P) I
    space = WeightedSpace(3, np.array([0, 3, 5, 6]), np.array([0.4, 0.1, 0.3, 0.2]))
    m = MatrixFunction.from_scalars(space.as_vector(), d=2)
    ft = fourier(m).table
    for a in range(8):
        assert np.allclose(ft[a], 2**-1.5 * bias_at(space, BitString(3, a)) * np.eye(2))


def test_fourier_of_constant(rng):
    n = 4
    c = random_matrix_function(rng, 0, 2).table[0]
    m = MatrixFunction(n, np.repeat(c[None], 1 << n, axis=0))
    ft = fourier(m).table
    assert np.allclose(ft[0], 2 ** (n / 2) * c)
    assert np.allclose(ft[1:], 0)


def test_l2_norm_examples():
    assert l2_norm(MatrixFunction.point_identity(3, 4)) == pytest.approx(2.0)
    assert l2_norm(MatrixFunction.zeros(2, 3)) == 0.0


def test_involution_and_linearity(rng):
    for n in range(1, 6):
        m, k = random_matrix_function(rng, n, 2), random_matrix_function(rng, n, 2)
        assert np.allclose(fourier(fourier(m)).table, m.table, atol=1e-12)
        c = 0.7 - 1.3j
        assert np.allclose(fourier(m + c * k).table, fourier(m).table + c * fourier(k).table)


def test_convolution_theorem_and_parseval_grid(rng):
    for n in range(1, 7):
        for d in range(1, 5):
            for herm in (False, True):
                rep = check_convolution_theorem(
                    random_matrix_function(rng, n, d, herm), random_matrix_function(rng, n, d, herm)
                )
                assert rep.max_dev <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_convolution_theorem_property(n, d, seed):
    g = np.random.default_rng(seed)
    rep = check_convolution_theorem(random_matrix_function(g, n, d), random_matrix_function(g, n, d))
    assert rep.convolution_dev <= 1e-10 and rep.parseval_dev <= 1e-10
