"""
Toy key-agreement session: offset error correction plus privacy amplification.

Model (all registers classical except Eve's Z):

* R is a uniform r-bit source with ``r = n + 2^kb - 1``; the secret key K
  (uniform over kb bits) selects the window ``X = R[K : K + n]``.
* Eve's register Z depends on R only, so it is independent of K.
* Bob holds ``X' = X xor E`` with E i.i.d. Bernoulli(noise).
* Alice draws J uniformly from a code family and C uniformly from C_J, and
  publishes ``Y = X xor C``.
* Both compress ``S = G X`` with G a uniform ell x n binary matrix.

Two distances are computed on the exact joint state, averaging over the
public seeds (G, J):

* key security ``d(S | Y K Z G J)``;
* key freshness ``d(K | S Y Z G J)``.

Both are at most ``2 (T1 + T2)`` where, for any reference state sigma on
(K, Z) with collision entropy h = H2(X | KZ; sigma),
``T1 = delta * 2^((n - h + ell)/2)`` bounds the offset message and
``T2 = 2^((ell - h)/2)`` bounds the hashed key.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cqstate import CqState, DensityMatrix, best_entropy, dumps_state
from .ensembles import random_sigma
from .errors import CapacityError, DimensionError
from .gf2 import BitString, hamming_distance
from .privcorrect import CodeFamily, _apply_rows, correct_offset

MAX_SEED_WORK = 1 << 14

_PLUS = np.array([1, 1]) / np.sqrt(2)
_MINUS = np.array([1, -1]) / np.sqrt(2)


def _proj(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    return np.outer(v, v.conj())


def _bit(r: int, i: int) -> int:
    return (r >> i) & 1


# Each fixture maps (source value r, anchor position b) to Eve's operator.
# The anchor b = 2^kb - 1 lies inside every window, so R_b is a bit of X
# whatever K is.
EVE_FIXTURES = {
    # no side information; H2(X | KZ) = n
    "none": (1, lambda r, b: np.ones((1, 1))),
    # one noiselessly copied bit of X; H2(X | KZ) = n - 1 at sigma = rho_KZ
    "copy-bit": (2, lambda r, b: _proj(np.eye(2)[_bit(r, b)])),
    # two copied bits of X
    "copy-two": (4, lambda r, b: _proj(np.eye(4)[_bit(r, b) | _bit(r, b + 1) << 1])),
    # R_b in the basis chosen by R_{b+1} (computational or Hadamard)
    "bb84": (
        2,
        lambda r, b: _proj(
            (np.eye(2)[_bit(r, b)]) if not _bit(r, b + 1) else (_MINUS if _bit(r, b) else _PLUS)
        ),
    ),
}


@dataclass(frozen=True)
class SessionParams:
    n: int
    ell: int
    family: CodeFamily
    key_bits: int = 1
    eve: str = "copy-bit"
    noise: float = 0.0
    sigma_candidates: int = 4

    def __post_init__(self):
        if not 2 <= self.n <= 6:
            raise DimensionError("session n must lie in [2, 6]")
        if not 1 <= self.ell <= 2:
            raise DimensionError("session ell must be 1 or 2")
        if self.family.n != self.n:
            raise DimensionError("code family length must equal n")
        if not 1 <= self.key_bits <= 2 or (1 << self.key_bits) > self.n:
            raise DimensionError("key_bits must be 1 or 2 with 2^key_bits <= n")
        if self.eve not in EVE_FIXTURES:
            raise DimensionError(f"unknown Eve fixture {self.eve!r}")
        if EVE_FIXTURES[self.eve][0] > 4:
            raise DimensionError("Eve's register must have dimension <= 4")
        if not 0 <= self.noise <= 1:
            raise DimensionError("noise must be a probability")

    @property
    def r(self) -> int:
        return self.n + (1 << self.key_bits) - 1

    @property
    def anchor(self) -> int:
        return (1 << self.key_bits) - 1


@dataclass
class SessionTranscript:
    j: int
    g_rows: tuple[int, ...]
    k: int
    x: BitString
    x_bob: BitString
    offset: BitString
    recovered: BitString | None
    s: BitString
    eve_before: CqState
    eve_after: CqState
    key_security: float
    key_freshness: float
    h2: float
    offset_term: float
    hashing_term: float
    delta: float
    extras: dict = field(default_factory=dict)

    @property
    def composed_bound(self) -> float:
        return 2 * (self.offset_term + self.hashing_term)

    @property
    def security_margin(self) -> float:
        return self.composed_bound - self.key_security

    @property
    def freshness_margin(self) -> float:
        return self.composed_bound - self.key_freshness

    @property
    def within_radius(self) -> bool:
        radius = self.extras.get("radius")
        return radius is not None and hamming_distance(self.x, self.x_bob) <= radius

    def dumps(self) -> str:
        """Stable text form used for replay comparison."""
        lines = [
            f"j={self.j}",
            "G=" + ",".join(f"{r:x}" for r in self.g_rows),
            f"k={self.k}",
            f"x={self.x.to_hex()}",
            f"x_bob={self.x_bob.to_hex()}",
            f"offset={self.offset.to_hex()}",
            f"recovered={self.recovered.to_hex() if self.recovered else 'FAIL'}",
            f"s={self.s.to_hex()}",
            f"delta={self.delta!r}",
            f"h2={self.h2!r}",
            f"key_security={self.key_security!r}",
            f"key_freshness={self.key_freshness!r}",
            f"composed_bound={self.composed_bound!r}",
            "eve_before:",
            dumps_state(self.eve_before),
            "eve_after:",
            dumps_state(self.eve_after),
        ]
        return "\n".join(lines)


def _window(rs: np.ndarray, k: int, n: int) -> np.ndarray:
    return (rs >> k) & ((1 << n) - 1)


def source_state(p: SessionParams) -> CqState:
    """``rho_{X, K Z}``: X with Eve's register and the key on the side."""
    dz, op = EVE_FIXTURES[p.eve]
    nk = 1 << p.key_bits
    rs = np.arange(1 << p.r)
    zops = np.array([op(int(r), p.anchor) for r in rs], dtype=np.complex128)
    blocks = np.zeros((1 << p.n, nk * dz, nk * dz), dtype=np.complex128)
    w = 1.0 / (len(rs) * nk)
    for k in range(nk):
        sl = slice(k * dz, (k + 1) * dz)
        np.add.at(blocks[:, sl, sl], _window(rs, k, p.n), w * zops)
    probs = np.real(np.trace(blocks, axis1=1, axis2=2))
    keep = np.flatnonzero(probs > 0)
    return CqState(p.n, nk * dz, keep, probs[keep], blocks[keep] / probs[keep, None, None])


def _seed_blocks(p: SessionParams, code_words: np.ndarray, g_rows, zops: np.ndarray) -> np.ndarray:
    """Operators indexed by ``(s, y, k)`` for one (G, J) pair, weighted by P(r) P(k) P(c)."""
    nk = 1 << p.key_bits
    dz = zops.shape[1]
    rs = np.arange(1 << p.r)
    out = np.zeros((1 << p.ell, 1 << p.n, nk, dz, dz), dtype=np.complex128)
    w = 1.0 / (len(rs) * nk * code_words.size)
    for k in range(nk):
        xs = _window(rs, k, p.n)
        ss = _apply_rows(g_rows, xs)
        for c in code_words:
            np.add.at(out[:, :, k], (ss, xs ^ c), w * zops)
    return out


def _sum_abs_eig(a: np.ndarray) -> float:
    flat = a.reshape((-1,) + a.shape[-2:])
    return float(np.abs(np.linalg.eigvalsh(flat)).sum())


def session_distances(p: SessionParams) -> tuple[float, float]:
    """Exact ``(key_security, key_freshness)`` averaged over all seeds (G, J)."""
    n_g = 1 << (p.ell * p.n)
    if n_g * len(p.family) > MAX_SEED_WORK:
        raise CapacityError("too many (G, J) seed pairs for exact session evaluation")
    dz, op = EVE_FIXTURES[p.eve]
    zops = np.array([op(int(r), p.anchor) for r in range(1 << p.r)], dtype=np.complex128)
    words = [c.codewords() for c in p.family.codes]
    mask = (1 << p.n) - 1
    sec = fresh = 0.0
    for gi in range(n_g):
        g_rows = [(gi >> (i * p.n)) & mask for i in range(p.ell)]
        for cw in words:
            t = _seed_blocks(p, cw, g_rows, zops)
            sec += _sum_abs_eig(t - t.mean(axis=0, keepdims=True))
            fresh += _sum_abs_eig(t - t.mean(axis=2, keepdims=True))
    weight = 1.0 / (n_g * len(words))
    return sec * weight, fresh * weight


def bound_terms(p: SessionParams, src: CqState, rng: np.random.Generator) -> tuple[float, float, float]:
    """``(h2, T1, T2)`` at the reference state maximizing H2(X | KZ)."""
    cands = [DensityMatrix.maximally_mixed(src.dB)]
    cands += [random_sigma(rng, src.dB) for _ in range(p.sigma_candidates - 1)]
    _, h2 = best_entropy(src, "collision", cands)
    delta = p.family.delta
    t1 = delta * 2.0 ** ((p.n - h2 + p.ell) / 2)
    t2 = 2.0 ** ((p.ell - h2) / 2)
    return h2, t1, t2


def _after_state(p: SessionParams, g_rows) -> CqState:
    """``rho_{S, K Z}`` for the realized hash matrix."""
    dz, op = EVE_FIXTURES[p.eve]
    nk = 1 << p.key_bits
    rs = np.arange(1 << p.r)
    zops = np.array([op(int(r), p.anchor) for r in rs], dtype=np.complex128)
    blocks = np.zeros((1 << p.ell, nk * dz, nk * dz), dtype=np.complex128)
    w = 1.0 / (len(rs) * nk)
    for k in range(nk):
        sl = slice(k * dz, (k + 1) * dz)
        np.add.at(blocks[:, sl, sl], _apply_rows(g_rows, _window(rs, k, p.n)), w * zops)
    probs = np.real(np.trace(blocks, axis1=1, axis2=2))
    keep = np.flatnonzero(probs > 0)
    return CqState(p.ell, nk * dz, keep, probs[keep], blocks[keep] / probs[keep, None, None])


def run_session(p: SessionParams, rng: np.random.Generator) -> SessionTranscript:
    r = int(rng.integers(0, 1 << p.r))
    k = int(rng.integers(0, 1 << p.key_bits))
    x = BitString(p.n, (r >> k) & ((1 << p.n) - 1))
    flips = sum(1 << i for i in range(p.n) if rng.random() < p.noise)
    x_bob = BitString(p.n, x.value ^ flips)
    j = int(rng.integers(0, len(p.family)))
    code = p.family.codes[j]
    if code.radius is None:
        code = code.with_radius()
    y, recovered = correct_offset(x, x_bob, code, rng)
    g_rows = tuple(int(v) for v in rng.integers(0, 1 << p.n, size=p.ell))
    s = BitString(p.ell, int(_apply_rows(g_rows, np.array([x.value]))[0]))

    src = source_state(p)
    h2, t1, t2 = bound_terms(p, src, rng)
    sec, fresh = session_distances(p)
    return SessionTranscript(
        j=j,
        g_rows=g_rows,
        k=k,
        x=x,
        x_bob=x_bob,
        offset=y,
        recovered=recovered,
        s=s,
        eve_before=src,
        eve_after=_after_state(p, g_rows),
        key_security=sec,
        key_freshness=fresh,
        h2=h2,
        offset_term=t1,
        hashing_term=t2,
        delta=p.family.delta,
        extras={"radius": code.radius},
    )
