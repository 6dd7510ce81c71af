"""
Matrix-valued functions on the hypercube {0,1}^n.

Convolution uses XOR as the group operation, and the Fourier transform
carries the symmetric ``2^(-n/2)`` normalization, which makes it its own
inverse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .gf2 import parity_int, walsh_hadamard


@dataclass(frozen=True, eq=False)
class MatrixFunction:
    """``table[x]`` is the d x d complex matrix assigned to x."""

    n: int
    table: np.ndarray

    def __post_init__(self):
        t = np.array(self.table, dtype=np.complex128)
        if t.ndim != 3 or t.shape[0] != 1 << self.n or t.shape[1] != t.shape[2]:
            raise DimensionError(f"table must have shape (2^{self.n}, d, d), got {t.shape}")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def d(self) -> int:
        return self.table.shape[1]

    @classmethod
    def zeros(cls, n: int, d: int) -> "MatrixFunction":
        return cls(n, np.zeros((1 << n, d, d)))

    @classmethod
    def point_identity(cls, n: int, d: int, at: int = 0) -> "MatrixFunction":
        t = np.zeros((1 << n, d, d), dtype=np.complex128)
        t[at] = np.eye(d)
        return cls(n, t)

    @classmethod
    def from_scalars(cls, values: np.ndarray, d: int = 1) -> "MatrixFunction":
        """``x -> values[x] * I_d``."""
        values = np.asarray(values)
        n = values.size.bit_length() - 1
        return cls(n, values[:, None, None] * np.eye(d))

    def __add__(self, other: "MatrixFunction") -> "MatrixFunction":
        _check_shapes(self, other)
        return MatrixFunction(self.n, self.table + other.table)

    def __mul__(self, c: complex) -> "MatrixFunction":
        return MatrixFunction(self.n, c * self.table)

    __rmul__ = __mul__


def _check_shapes(m: MatrixFunction, k: MatrixFunction) -> None:
    if m.table.shape != k.table.shape:
        raise DimensionError(f"shape mismatch: {m.table.shape} vs {k.table.shape}")


def convolve(m: MatrixFunction, k: MatrixFunction) -> MatrixFunction:
    """``(M*N)(x) = sum_y M(y) N(x xor y)`` by the direct double sum."""
    _check_shapes(m, k)
    size = 1 << m.n
    out = np.zeros_like(m.table)
    ys = np.arange(size)
    for x in range(size):
        out[x] = np.einsum("yab,ybc->ac", m.table, k.table[x ^ ys])
    return MatrixFunction(m.n, out)


def fourier(m: MatrixFunction) -> MatrixFunction:
    """Entrywise fast transform of the table."""
    return MatrixFunction(m.n, walsh_hadamard(m.table))


def fourier_naive(m: MatrixFunction) -> MatrixFunction:
    size = 1 << m.n
    signs = np.array([[(-1) ** parity_int(a & x) for x in range(size)] for a in range(size)])
    return MatrixFunction(m.n, np.einsum("ax,xij->aij", signs, m.table) * size ** -0.5)


def l2_norm(m: MatrixFunction) -> float:
    """``sqrt(tr sum_x M(x)^dagger M(x))``."""
    return float(np.sqrt(np.sum(np.abs(m.table) ** 2)))


@dataclass(frozen=True)
class ConvolutionReport:
    convolution_dev: float
    parseval_dev: float

    @property
    def max_dev(self) -> float:
        return max(self.convolution_dev, self.parseval_dev)


def check_convolution_theorem(m: MatrixFunction, k: MatrixFunction) -> ConvolutionReport:
    """Compare ``F(M*N)`` with ``2^(n/2) F(M) F(N)`` pointwise, and ``||F(M)||`` with ``||M||``."""
    _check_shapes(m, k)
    lhs = fourier(convolve(m, k)).table
    rhs = 2 ** (m.n / 2) * np.einsum("xab,xbc->xac", fourier(m).table, fourier(k).table)
    conv_dev = float(np.max(np.abs(lhs - rhs)))
    pars_dev = abs(l2_norm(fourier(m)) - l2_norm(m))
    return ConvolutionReport(conv_dev, pars_dev)


def random_matrix_function(rng: np.random.Generator, n: int, d: int, hermitian: bool = False) -> MatrixFunction:
    t = rng.standard_normal((1 << n, d, d)) + 1j * rng.standard_normal((1 << n, d, d))
    if hermitian:
        t = 0.5 * (t + np.conj(np.swapaxes(t, 1, 2)))
    return MatrixFunction(n, t)
