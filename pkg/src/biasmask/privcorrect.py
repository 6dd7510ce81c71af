"""
Private error correction with binary linear code families.

A family of codes is delta-biased when the uniform distributions over its
codes form a delta-biased family.  Two equivalent exhaustive criteria are
provided: dual-code membership frequency and the collision probability of
the maps ``x -> G_j x``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CapacityError, DimensionError, FormatError
from .gf2 import (
    MAX_EXHAUSTIVE_N,
    BinMatrix,
    BitString,
    dual_basis,
    mat_vec,
    parity_array,
    row_reduce,
    span,
)
from .smallbias import BiasedFamily, code_space


@dataclass(frozen=True, eq=False)
class LinearCode:
    """Binary [n, k] code with generator (k x n) and parity check ((n-k) x n)."""

    generator: BinMatrix
    parity_check: BinMatrix
    radius: int | None = None

    @property
    def n(self) -> int:
        return self.generator.cols

    @property
    def k(self) -> int:
        return self.generator.nrows

    @classmethod
    def from_generator(cls, g, radius: int | None = None) -> "LinearCode":
        """Build from any spanning set of rows; dependent rows are reduced away."""
        if not isinstance(g, BinMatrix):
            g = BinMatrix.from_array(np.asarray(g))
        basis = BinMatrix(tuple(row_reduce(g.rows, g.cols)), g.cols)
        if basis.nrows == 0:
            raise DimensionError("the zero code has no generator")
        if basis.nrows == g.nrows:
            basis = g
        return cls(basis, dual_basis(basis), radius)

    def codewords(self) -> np.ndarray:
        if self.k > MAX_EXHAUSTIVE_N:
            raise CapacityError(f"k={self.k} exceeds the exhaustive limit")
        return span(self.generator.rows)

    def dual_codewords(self) -> np.ndarray:
        if self.parity_check.nrows == 0:
            return np.zeros(1, dtype=np.int64)
        return span(self.parity_check.rows)

    def min_distance(self) -> int:
        cw = self.codewords()
        return int(np.bitwise_count(cw[cw != 0].astype(np.uint64)).min()) if cw.size > 1 else self.n + 1

    def with_radius(self, radius: int | None = None) -> "LinearCode":
        """Copy with a declared decoding radius (default: half the minimum distance)."""
        if radius is None:
            radius = (self.min_distance() - 1) // 2
        return LinearCode(self.generator, self.parity_check, radius)


def hamming74() -> LinearCode:
    g = BinMatrix.from_rows(["1000110", "0100011", "0010111", "0001101"])
    return LinearCode.from_generator(g, radius=1)


def repetition(n: int) -> LinearCode:
    return LinearCode.from_generator(BinMatrix(((1 << n) - 1,), n), radius=(n - 1) // 2)


@dataclass(frozen=True, eq=False)
class CodeFamily:
    codes: tuple[LinearCode, ...]
    _delta: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        codes = tuple(self.codes)
        if not codes:
            raise DimensionError("a code family needs at least one code")
        if len({c.n for c in codes}) != 1:
            raise DimensionError("all codes in a family must share n")
        object.__setattr__(self, "codes", codes)

    @property
    def n(self) -> int:
        return self.codes[0].n

    def __len__(self) -> int:
        return len(self.codes)

    @property
    def delta(self) -> float:
        if not self._delta:
            self._delta.append(dual_membership_bias(self))
        return self._delta[0]

    def as_biased_family(self) -> BiasedFamily:
        return BiasedFamily.of([code_space(c) for c in self.codes])

    def syndrome_table(self) -> tuple[np.ndarray, int]:
        """``table[j, x] = H_j x`` as integers, and the syndrome length."""
        lengths = {c.parity_check.nrows for c in self.codes}
        if len(lengths) != 1 or 0 in lengths:
            raise DimensionError("syndrome table needs codes of one common dimension k < n")
        xs = np.arange(1 << self.n)
        return np.array([_apply_rows(c.parity_check.rows, xs) for c in self.codes]), lengths.pop()


def _apply_rows(rows: Sequence[int], xs: np.ndarray) -> np.ndarray:
    """``M x`` for every x in ``xs``, packed as integers."""
    out = np.zeros_like(xs)
    for i, r in enumerate(rows):
        out |= parity_array(xs & r) << i
    return out


def _check_family_n(f: CodeFamily) -> None:
    if f.n > MAX_EXHAUSTIVE_N:
        raise CapacityError(f"n={f.n} exceeds the exhaustive limit")


def dual_membership_frequency(f: CodeFamily) -> np.ndarray:
    """``Pr_j[alpha in C_j^perp]`` for every alpha."""
    _check_family_n(f)
    counts = np.zeros(1 << f.n)
    for c in f.codes:
        counts[c.dual_codewords()] += 1
    return counts / len(f)


def dual_membership_bias(f: CodeFamily) -> float:
    """``sqrt(max_{alpha != 0} Pr_j[alpha in C_j^perp])``."""
    freq = dual_membership_frequency(f)
    return float(np.sqrt(freq[1:].max())) if freq.size > 1 else 0.0


def collision_probability(f: CodeFamily, x: int, x2: int) -> float:
    """``Pr_j[G_j x = G_j x2]`` for one pair of inputs."""
    hits = [parity_array(np.array(c.generator.rows) & (x ^ x2)).max(initial=0) == 0 for c in f.codes]
    return float(np.mean(hits))


def almost_universal_delta(f: CodeFamily) -> float:
    """Largest collision probability of the hash family ``x -> G_j x``.

    By linearity a pair (x, x2) collides exactly when ``G_j (x xor x2) = 0``,
    so the maximum over distinct pairs is a maximum over nonzero differences.
    """
    _check_family_n(f)
    ws = np.arange(1 << f.n)
    hits = np.zeros(ws.size)
    for c in f.codes:
        hits += _apply_rows(c.generator.rows, ws) == 0
    return float((hits[1:] / len(f)).max()) if ws.size > 1 else 0.0


def decode(code: LinearCode, y: BitString) -> BitString | None:
    """Nearest codeword by exhaustive search.

    Ties go to the numerically smallest codeword, i.e. the first in the
    lexicographic order of fixed-width hex serializations.  Returns None
    when the distance exceeds the declared radius.
    """
    if y.n != code.n:
        raise DimensionError(f"received word has length {y.n}, code has n={code.n}")
    cw = code.codewords()
    dist = np.bitwise_count((cw ^ y.value).astype(np.uint64))
    best = int(np.argmin(dist))
    if code.radius is not None and dist[best] > code.radius:
        return None
    return BitString(code.n, int(cw[best]))


def syndrome_extract(code: LinearCode, x: BitString) -> BitString:
    return mat_vec(code.parity_check, x)


def coset_leader(code: LinearCode, syndrome: int) -> int | None:
    """Lowest-weight error with the given syndrome (ties: smallest integer)."""
    if code.parity_check.nrows == 0:
        return 0 if syndrome == 0 else None
    es = np.arange(1 << code.n)
    match = es[_apply_rows(code.parity_check.rows, es) == syndrome]
    if match.size == 0:
        return None
    w = np.bitwise_count(match.astype(np.uint64))
    best = int(match[np.argmin(w)])
    if code.radius is not None and best.bit_count() > code.radius:
        return None
    return best


def correct_offset(
    x: BitString, x_bob: BitString, code: LinearCode, rng: np.random.Generator
) -> tuple[BitString, BitString | None]:
    """Alice publishes ``Y = X xor C`` for a uniform codeword C; Bob decodes.

    Returns ``(Y, recovered)``; recovered is None on decoding failure.
    """
    cw = code.codewords()
    c = BitString(code.n, int(cw[rng.integers(cw.size)]))
    y = x ^ c
    found = decode(code, y ^ x_bob)
    return y, (None if found is None else y ^ found)


def correct_syndrome(x: BitString, x_bob: BitString, code: LinearCode) -> tuple[BitString, BitString | None]:
    """Alice publishes ``H X``; Bob corrects with the coset leader of ``H (X xor X')``."""
    s = syndrome_extract(code, x)
    diff = s.value ^ syndrome_extract(code, x_bob).value
    e = coset_leader(code, diff)
    return s, (None if e is None else BitString(code.n, x_bob.value ^ e))


def theorem3_rhs(t: float, lam: float, n: int) -> float:
    """``2^(-(t - (1 - lam) n) / 2)``."""
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    return 2.0 ** (-(t - (1 - lam) * n) / 2)


def random_code_family(rng: np.random.Generator, n: int, k: int, size: int) -> CodeFamily:
    from .ensembles import random_full_rank

    return CodeFamily(tuple(LinearCode.from_generator(random_full_rank(rng, k, n)) for _ in range(size)))


# --- code-family files ----------------------------------------------------


def dumps_family(f: CodeFamily) -> str:
    ks = {c.k for c in f.codes}
    if len(ks) != 1:
        raise FormatError("the file format needs one common k")
    lines = [f"{f.n} {ks.pop()} {len(f)}"]
    for c in f.codes:
        lines += [str(c.generator.row(i)) for i in range(c.k)]
    return "\n".join(lines) + "\n"


def loads_family(text: str, radius: int | None = None) -> CodeFamily:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    try:
        n, k, count = (int(t) for t in lines[0].split())
    except (IndexError, ValueError) as exc:
        raise FormatError("code-family header must be 'n k count'") from exc
    body = lines[1:]
    if len(body) != k * count:
        raise FormatError(f"expected {k * count} generator rows, found {len(body)}")
    codes = []
    for j in range(count):
        g = BinMatrix.from_rows(body[j * k : (j + 1) * k])
        if g.cols != n:
            raise FormatError(f"code {j} has {g.cols} columns, expected {n}")
        codes.append(LinearCode.from_generator(g, radius))
    return CodeFamily(tuple(codes))
