"""
Bit-exact GF(2) primitives and the fast Walsh-Hadamard transform.

Bit strings are stored as Python integers: bit ``i`` of a :class:`BitString`
is ``(value >> i) & 1``.  Hex serialization writes the integer most
significant nibble first, prefixed with an explicit length header
(``n=<n>;<hex>``).  The string form ``"1010"`` lists bits in index order,
so ``BitString.from_str("100")`` has only bit 0 set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, FormatError

#: Default ceiling on n for operations that enumerate all of {0,1}^n.
MAX_EXHAUSTIVE_N = 24


def parity_int(v: int) -> int:
    return v.bit_count() & 1


def parity_array(v: np.ndarray) -> np.ndarray:
    """Elementwise parity of the set bits of a non-negative integer array."""
    return (np.bitwise_count(np.asarray(v, dtype=np.uint64)) & 1).astype(np.int64)


@dataclass(frozen=True, order=True)
class BitString:
    n: int
    value: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError(f"bit string length must be >= 1, got {self.n}")
        if self.value < 0 or self.value >> self.n:
            raise DimensionError(f"value {self.value:#x} does not fit in {self.n} bits")

    @classmethod
    def zeros(cls, n: int) -> "BitString":
        return cls(n, 0)

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "BitString":
        v = 0
        for i, b in enumerate(bits):
            if b not in (0, 1):
                raise FormatError(f"bit {i} is {b!r}, expected 0 or 1")
            v |= b << i
        return cls(len(bits), v)

    @classmethod
    def from_str(cls, s: str) -> "BitString":
        s = s.strip()
        if not s or set(s) - {"0", "1"}:
            raise FormatError(f"not a 0/1 string: {s!r}")
        return cls.from_bits([int(c) for c in s])

    @classmethod
    def from_hex(cls, text: str) -> "BitString":
        try:
            head, payload = text.strip().split(";")
            if not head.startswith("n="):
                raise ValueError
            n = int(head[2:])
            value = int(payload, 16)
        except ValueError as exc:
            raise FormatError(f"bad bit string serialization: {text!r}") from exc
        return cls(n, value)

    def to_hex(self) -> str:
        width = (self.n + 3) // 4
        return f"n={self.n};{self.value:0{width}x}"

    def bits(self) -> list[int]:
        return [(self.value >> i) & 1 for i in range(self.n)]

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits())

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.value >> i) & 1

    def __len__(self) -> int:
        return self.n

    def weight(self) -> int:
        return self.value.bit_count()

    def __xor__(self, other: "BitString") -> "BitString":
        return xor(self, other)


def _check_same_length(a: BitString, b: BitString) -> None:
    if a.n != b.n:
        raise DimensionError(f"length mismatch: {a.n} vs {b.n}")


def xor(a: BitString, b: BitString) -> BitString:
    _check_same_length(a, b)
    return BitString(a.n, a.value ^ b.value)


def parity(a: BitString, alpha: BitString) -> int:
    """Inner product ``alpha . a`` modulo 2."""
    _check_same_length(a, alpha)
    return parity_int(a.value & alpha.value)


def hamming_distance(a: BitString, b: BitString) -> int:
    _check_same_length(a, b)
    return (a.value ^ b.value).bit_count()


@dataclass(frozen=True)
class BinMatrix:
    """A dense GF(2) matrix stored as one packed integer per row.

    A matrix with zero rows is allowed; it arises as the dual of the full
    space.
    """

    rows: tuple[int, ...]
    cols: int

    def __post_init__(self):
        if self.cols < 1:
            raise DimensionError("a matrix needs at least one column")
        object.__setattr__(self, "rows", tuple(int(r) for r in self.rows))
        for r in self.rows:
            if r < 0 or r >> self.cols:
                raise DimensionError(f"row {r:#x} does not fit in {self.cols} columns")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.cols)

    @classmethod
    def identity(cls, n: int) -> "BinMatrix":
        return cls(tuple(1 << i for i in range(n)), n)

    @classmethod
    def zeros(cls, r: int, c: int) -> "BinMatrix":
        return cls((0,) * r, c)

    @classmethod
    def from_rows(cls, rows: Iterable[str | Sequence[int] | BitString]) -> "BinMatrix":
        packed = []
        cols = None
        for row in rows:
            if isinstance(row, str):
                row = BitString.from_str(row)
            elif not isinstance(row, BitString):
                row = BitString.from_bits(list(row))
            if cols is None:
                cols = row.n
            elif row.n != cols:
                raise DimensionError("ragged matrix rows")
            packed.append(row.value)
        if cols is None:
            raise DimensionError("cannot infer column count from zero rows")
        return cls(tuple(packed), cols)

    @classmethod
    def from_array(cls, a: np.ndarray) -> "BinMatrix":
        a = np.asarray(a)
        if a.ndim != 2:
            raise DimensionError("expected a 2-d array")
        weights = 1 << np.arange(a.shape[1], dtype=object)
        rows = tuple(int(sum(int(b) * w for b, w in zip(row, weights))) for row in (a & 1))
        return cls(rows, a.shape[1])

    def to_array(self) -> np.ndarray:
        out = np.zeros((len(self.rows), self.cols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for j in range(self.cols):
                out[i, j] = (r >> j) & 1
        return out

    def row(self, i: int) -> BitString:
        return BitString(self.cols, self.rows[i])

    def rank(self) -> int:
        return len(row_reduce(self.rows, self.cols))

    def dumps(self) -> str:
        lines = [f"{self.nrows} {self.cols}"]
        lines += [str(self.row(i)) for i in range(self.nrows)]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "BinMatrix":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        try:
            r, c = (int(t) for t in lines[0].split())
        except (IndexError, ValueError) as exc:
            raise FormatError("matrix header must be 'r c'") from exc
        body = lines[1:]
        if len(body) != r:
            raise FormatError(f"expected {r} rows, found {len(body)}")
        if r == 0:
            return cls((), c)
        m = cls.from_rows(body)
        if m.cols != c:
            raise FormatError(f"expected {c} columns, found {m.cols}")
        return m


def mat_vec(m: BinMatrix, v: BitString) -> BitString:
    if m.cols != v.n:
        raise DimensionError(f"matrix has {m.cols} columns, vector has length {v.n}")
    if m.nrows == 0:
        raise DimensionError("product with a zero-row matrix has no bits")
    out = 0
    for i, r in enumerate(m.rows):
        out |= parity_int(r & v.value) << i
    return BitString(m.nrows, out)


def row_reduce(rows: Iterable[int], cols: int) -> list[int]:
    """Reduced row echelon form over GF(2); zero rows are dropped.

    The returned rows are ordered by pivot column.
    """
    return [r for _, r in _rref(rows)]


def _rref(rows: Iterable[int]) -> list[tuple[int, int]]:
    # pivot column of each row; other rows are zero in that column
    pivots: dict[int, int] = {}
    for r in rows:
        for col, prow in pivots.items():
            if (r >> col) & 1:
                r ^= prow
        if r == 0:
            continue
        col = (r & -r).bit_length() - 1
        for c2, prow in list(pivots.items()):
            if (prow >> col) & 1:
                pivots[c2] = prow ^ r
        pivots[col] = r
    return sorted(pivots.items())


def span(rows: Sequence[int]) -> np.ndarray:
    """All GF(2) combinations of ``rows`` (which need not be independent).

    Returns the distinct elements of the row space as a sorted int64 array.
    """
    basis = row_reduce(rows, max((r.bit_length() for r in rows), default=1) or 1)
    out = np.zeros(1, dtype=np.int64)
    for b in basis:
        out = np.concatenate([out, out ^ b])
    return np.sort(out)


def dual_basis(g: BinMatrix) -> BinMatrix:
    """Basis of the dual code of the row space of ``g``.

    Rank-deficient input is reduced first; the result has
    ``cols - rank(g)`` rows.
    """
    n = g.cols
    reduced = _rref(g.rows)
    taken = {pc for pc, _ in reduced}
    out = []
    for f in (c for c in range(n) if c not in taken):
        h = 1 << f
        for pc, r in reduced:
            if (r >> f) & 1:
                h |= 1 << pc
        out.append(h)
    return BinMatrix(tuple(out), n)


def walsh_hadamard(f: np.ndarray) -> np.ndarray:
    """Normalized Walsh-Hadamard transform along axis 0.

    ``out[alpha] = 2**(-n/2) * sum_x (-1)**(alpha.x) * f[x]``, computed with
    ``n`` butterfly passes.  Trailing axes are transformed independently,
    so a stack of matrices indexed by ``x`` is handled in one call.
    """
    a = np.array(f, dtype=np.result_type(f, np.float64), copy=True)
    size = a.shape[0] if a.ndim else 0
    if size < 1 or size & (size - 1):
        raise DimensionError(f"transform length must be a power of two, got {size}")
    rest = a.shape[1:]
    h = 1
    while h < size:
        v = a.reshape((size // (2 * h), 2, h) + rest)
        lo = v[:, 0].copy()
        v[:, 0] += v[:, 1]
        v[:, 1] = lo - v[:, 1]
        h *= 2
    return a * (size ** -0.5)
