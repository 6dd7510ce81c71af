"""
Small-bias distributions over {0,1}^n.

A :class:`WeightedSpace` is a finite distribution over n-bit strings; a
:class:`BiasedFamily` is a list of them with the index chosen uniformly.
Bias values are signed character sums; the delta condition is applied to
their absolute value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CapacityError, DimensionError
from .gf2 import MAX_EXHAUSTIVE_N, BitString, parity_array, row_reduce, span, walsh_hadamard

PROB_TOL = 1e-12

# Irreducible polynomials over GF(2), bit k = coefficient of x^k.
IRREDUCIBLE = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0x11B,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
}

#: Work ceiling for aghp_construct, in (field element, span point) pairs.
AGHP_MAX_WORK = 1 << 26


@dataclass(frozen=True, eq=False)
class WeightedSpace:
    """Distribution over n-bit strings, stored as parallel arrays.

    ``points`` holds distinct integer-encoded strings and ``probs`` their
    probabilities.
    """

    n: int
    points: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.int64).reshape(-1)
        pr = np.asarray(self.probs, dtype=np.float64).reshape(-1)
        if self.n < 1:
            raise DimensionError("n must be >= 1")
        if pts.shape != pr.shape or pts.size == 0:
            raise DimensionError("points and probs must be nonempty and of equal length")
        if np.any(pts < 0) or np.any(pts >> self.n):
            raise DimensionError(f"point outside {{0,1}}^{self.n}")
        if np.unique(pts).size != pts.size:
            raise DimensionError("points must be distinct")
        if np.any(pr < 0) or abs(pr.sum() - 1.0) > PROB_TOL:
            raise DimensionError(f"probabilities must be >= 0 and sum to 1, got {pr.sum()!r}")
        pts.setflags(write=False)
        pr.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "probs", pr)

    @classmethod
    def uniform(cls, n: int, points: Iterable[int]) -> "WeightedSpace":
        pts = np.unique(np.fromiter((int(p) for p in points), dtype=np.int64))
        return cls(n, pts, np.full(pts.size, 1.0 / pts.size))

    @classmethod
    def from_vector(cls, n: int, vec: np.ndarray) -> "WeightedSpace":
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (1 << n,):
            raise DimensionError(f"expected a vector of length 2^{n}")
        nz = np.flatnonzero(vec > 0)
        return cls(n, nz, vec[nz])

    @classmethod
    def full(cls, n: int) -> "WeightedSpace":
        return cls.uniform(n, range(1 << n))

    @classmethod
    def point_mass(cls, n: int, a: int = 0) -> "WeightedSpace":
        return cls(n, np.array([a]), np.array([1.0]))

    def __len__(self) -> int:
        return self.points.size

    def entries(self) -> Iterator[tuple[BitString, float]]:
        for a, p in zip(self.points, self.probs):
            yield BitString(self.n, int(a)), float(p)

    def is_uniform(self) -> bool:
        return bool(np.all(self.probs == self.probs[0]))

    def as_vector(self) -> np.ndarray:
        _check_exhaustive(self.n)
        vec = np.zeros(1 << self.n)
        vec[self.points] = self.probs
        return vec


def _check_exhaustive(n: int, limit: int = MAX_EXHAUSTIVE_N) -> None:
    if n > limit:
        raise CapacityError(f"n={n} exceeds the exhaustive limit {limit}")


def bias_at(a: WeightedSpace, alpha: BitString) -> float:
    """Signed character sum ``sum_a P(a) (-1)^(alpha.a)``."""
    if alpha.n != a.n:
        raise DimensionError(f"alpha has length {alpha.n}, space has n={a.n}")
    signs = 1 - 2 * parity_array(a.points & alpha.value)
    return float(np.dot(a.probs, signs))


def bias_spectrum(a: WeightedSpace, limit: int = MAX_EXHAUSTIVE_N) -> np.ndarray:
    """Signed bias at every alpha, indexed by alpha, via the fast transform."""
    _check_exhaustive(a.n, limit)
    return walsh_hadamard(a.as_vector()) * 2 ** (a.n / 2)


def max_bias(a: WeightedSpace, limit: int = MAX_EXHAUSTIVE_N) -> float:
    """Largest ``|bias|`` over nonzero alpha."""
    spec = bias_spectrum(a, limit)
    return float(np.max(np.abs(spec[1:]))) if spec.size > 1 else 0.0


@dataclass(frozen=True, eq=False)
class BiasedFamily:
    n: int
    members: tuple[WeightedSpace, ...]
    _delta: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise DimensionError("a family needs at least one member")
        if any(m.n != self.n for m in members):
            raise DimensionError("all family members must share n")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, members: Sequence[WeightedSpace]) -> "BiasedFamily":
        return cls(members[0].n, tuple(members))

    def __len__(self) -> int:
        return len(self.members)

    @property
    def delta(self) -> float:
        # cached on first use; the family itself is immutable
        if not self._delta:
            self._delta.append(family_bias(self))
        return self._delta[0]


def family_bias_spectrum(f: BiasedFamily, limit: int = MAX_EXHAUSTIVE_N) -> np.ndarray:
    """Root-mean-square bias over members, for each alpha."""
    sq = np.zeros(1 << f.n)
    for m in f.members:
        sq += bias_spectrum(m, limit) ** 2
    return np.sqrt(sq / len(f.members))


def family_bias(f: BiasedFamily, limit: int = MAX_EXHAUSTIVE_N) -> float:
    spec = family_bias_spectrum(f, limit)
    return float(np.max(spec[1:])) if spec.size > 1 else 0.0


# --- GF(2^m) arithmetic for the powering construction ---------------------


def gf_mul(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    """Vectorized product in GF(2^m) = GF(2)[x]/(IRREDUCIBLE[m])."""
    poly = IRREDUCIBLE[m]
    a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
    a = a.copy()
    b = b.copy()
    out = np.zeros_like(a)
    top = 1 << m
    for _ in range(m):
        out ^= np.where(b & 1, a, 0)
        b >>= 1
        a <<= 1
        a = np.where(a & top, a ^ poly, a)
    return out


def is_irreducible(poly: int) -> bool:
    """Trial division by every polynomial of degree <= deg/2."""
    deg = poly.bit_length() - 1
    if deg < 1:
        return False
    for d in range(2, 1 << (deg // 2 + 1)):
        r = poly
        dd = d.bit_length() - 1
        while r.bit_length() - 1 >= dd:
            r ^= d << (r.bit_length() - 1 - dd)
        if r == 0:
            return False
    return True


def aghp_sample(n: int, m: int, x: int, y: int) -> int:
    """The n-bit string indexed by the field pair ``(x, y)``.

    Bit ``i`` is the inner product of the bit vectors of ``x**i`` and ``y``.
    """
    out = 0
    p = 1
    for i in range(n):
        out |= ((p & y).bit_count() & 1) << i
        p = int(gf_mul(np.array(p), np.array(x), m))
    return out


def _power_columns(n: int, m: int) -> np.ndarray:
    """For every field element x, the m column vectors of the map y -> a(x, y).

    Column j is the n-bit string whose bit i is bit j of x**i.
    Shape ``(2**m, m)``.
    """
    xs = np.arange(1 << m, dtype=np.int64)
    cols = np.zeros((xs.size, m), dtype=np.int64)
    p = np.ones_like(xs)
    for i in range(n):
        for j in range(m):
            cols[:, j] |= ((p >> j) & 1) << i
        p = gf_mul(p, xs, m)
    return cols


def aghp_construct(n: int, m: int) -> WeightedSpace:
    """Uniform distribution over the 2^(2m) samples of the powering construction.

    For a fixed x, ``y -> a(x, y)`` is GF(2)-linear, so its image is
    uniform over the span of the column vectors; the multiset of all
    ``(x, y)`` samples is folded into probabilities without enumerating y.
    Every nonzero alpha gives a nonzero polynomial of degree <= n-1 in x,
    hence ``max_bias <= (n-1)/2**m``.
    """
    if not 1 <= m <= 16:
        raise DimensionError(f"m must be in [1, 16], got {m}")
    if n < 2:
        raise DimensionError(f"n must be >= 2, got {n}")
    _check_exhaustive(n)
    if (1 << m) * (1 << min(n, m)) > AGHP_MAX_WORK:
        raise CapacityError(f"aghp_construct(n={n}, m={m}) exceeds the work limit")
    vec = np.zeros(1 << n)
    share = 1.0 / (1 << m)
    for cols in _power_columns(n, m):
        basis = row_reduce((int(c) for c in cols), n)
        pts = np.zeros(1, dtype=np.int64)
        for b in basis:
            pts = np.concatenate([pts, pts ^ b])
        vec[pts] += share / pts.size
    return WeightedSpace.from_vector(n, vec)


def code_space(code) -> WeightedSpace:
    """Uniform distribution over the codewords of a linear code."""
    if code.k > MAX_EXHAUSTIVE_N:
        raise CapacityError(f"k={code.k} exceeds the exhaustive limit")
    return WeightedSpace.uniform(code.n, span(code.generator.rows))


# --- sample-space files ---------------------------------------------------


def dumps_space(a: WeightedSpace) -> str:
    kind = "uniform" if a.is_uniform() else "weighted"
    width = (a.n + 3) // 4
    lines = [f"n={a.n} count={len(a)} kind={kind}"]
    for pt, p in zip(a.points, a.probs):
        h = f"{int(pt):0{width}x}"
        lines.append(h if kind == "uniform" else f"{h} {float(p)!r}")
    return "\n".join(lines) + "\n"


def loads_space(text: str) -> WeightedSpace:
    from .errors import FormatError

    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty sample-space file")
    try:
        head = dict(tok.split("=", 1) for tok in lines[0].split())
        n, count, kind = int(head["n"]), int(head["count"]), head["kind"]
    except (KeyError, ValueError) as exc:
        raise FormatError(f"bad sample-space header: {lines[0]!r}") from exc
    body = lines[1:]
    if len(body) != count:
        raise FormatError(f"header says {count} entries, found {len(body)}")
    try:
        if kind == "uniform":
            pts = [int(ln, 16) for ln in body]
            return WeightedSpace(n, np.array(pts), np.full(count, 1.0 / count))
        if kind == "weighted":
            pairs = [ln.split() for ln in body]
            pts = [int(h, 16) for h, _ in pairs]
            probs = [float(p) for _, p in pairs]
            return WeightedSpace(n, np.array(pts), np.array(probs))
    except ValueError as exc:
        raise FormatError(f"bad sample-space entry: {exc}") from exc
    raise FormatError(f"unknown kind {kind!r}")
