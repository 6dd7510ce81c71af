"""
Entropically secure XOR encryption with keys from a small-bias set.

A key is an index pair ``(x, y)`` into the powering construction over
GF(2^m); its key string is the n-bit sample at that index.  Keys are
``2m`` bits long regardless of n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cqstate import CqState, DensityMatrix, best_entropy, trace_dist_uniform
from .errors import DimensionError, FormatError
from .extractor import build_masked_state, theorem1_rhs
from .gf2 import BitString
from .smallbias import BiasedFamily, WeightedSpace, aghp_construct, aghp_sample, max_bias


@dataclass(frozen=True)
class KeyIndex:
    m: int
    x: int
    y: int

    def dumps(self) -> str:
        w = (self.m + 3) // 4
        return f"m={self.m};x={self.x:0{w}x};y={self.y:0{w}x}"

    @classmethod
    def loads(cls, text: str) -> "KeyIndex":
        try:
            tags = dict(tok.split("=", 1) for tok in text.strip().split(";"))
            return cls(int(tags["m"]), int(tags["x"], 16), int(tags["y"], 16))
        except (KeyError, ValueError) as exc:
            raise FormatError(f"bad key index: {text!r}") from exc


@dataclass(frozen=True, eq=False)
class KeySet:
    n: int
    m: int
    space: WeightedSpace
    delta: float

    @classmethod
    def build(cls, n: int, m: int) -> "KeySet":
        space = aghp_construct(n, m)
        return cls(n, m, space, max_bias(space))

    @property
    def key_bits(self) -> int:
        return 2 * self.m

    def key(self, idx: KeyIndex) -> BitString:
        if idx.m != self.m or not (0 <= idx.x < 1 << self.m and 0 <= idx.y < 1 << self.m):
            raise DimensionError(f"key index {idx} does not belong to this key set (m={self.m})")
        return BitString(self.n, aghp_sample(self.n, self.m, idx.x, idx.y))


@dataclass(frozen=True)
class CipherRecord:
    key: KeyIndex
    ciphertext: BitString


def keygen(ks: KeySet, rng: np.random.Generator) -> KeyIndex:
    x, y = (int(v) for v in rng.integers(0, 1 << ks.m, size=2))
    return KeyIndex(ks.m, x, y)


def encrypt(ks: KeySet, idx: KeyIndex, message: BitString) -> CipherRecord:
    if message.n != ks.n:
        raise DimensionError(f"message has {message.n} bits, key set has n={ks.n}")
    return CipherRecord(idx, ks.key(idx) ^ message)


def decrypt(ks: KeySet, idx: KeyIndex, ciphertext: BitString) -> BitString:
    if ciphertext.n != ks.n:
        raise DimensionError(f"ciphertext has {ciphertext.n} bits, key set has n={ks.n}")
    return ks.key(idx) ^ ciphertext


def key_length(n: int, t: float, eps: float) -> tuple[int, int]:
    """Field degree m and key length 2m reaching (t, eps) security on n bits.

    The target bias is ``eps * 2^(-(n-t)/2)`` and the construction's bias
    is at most ``(n-1)/2^m``.
    """
    if n < 2 or not 0 <= t <= n or not eps > 0:
        raise ValueError(f"need n >= 2, 0 <= t <= n, eps > 0; got n={n}, t={t}, eps={eps}")
    # log2((n-1)/delta_target), kept in log form so large n - t cannot underflow
    log_ratio = math.log2(n - 1) + (n - t) / 2 - math.log2(eps)
    m = max(1, math.ceil(log_ratio))
    return m, 2 * m


def key_length_bound(n: int, t: float, eps: float) -> float:
    """``n - t + 2 log n + 2 log(1/eps) + 4``."""
    return n - t + 2 * math.log2(n) + 2 * math.log2(1 / eps) + 4


def ciphertext_state(ks: KeySet, rho_mb: CqState) -> CqState:
    """State of ``K xor M`` with B; the single-index register adds no dimension."""
    return build_masked_state(rho_mb, BiasedFamily.of([ks.space]))


def indistinguishability_check(
    ks: KeySet, rho_mb: CqState, candidates: Sequence[DensityMatrix]
) -> tuple[float, float]:
    """``(|| rho_{E(K,M) B} - rho_U (x) rho_B ||_1, delta * 2^((n - t)/2))``.

    t is the best collision entropy found over the candidate reference
    states.
    """
    if rho_mb.n != ks.n:
        raise DimensionError(f"message state has n={rho_mb.n}, key set has n={ks.n}")
    dist = trace_dist_uniform(ciphertext_state(ks, rho_mb))
    _, t = best_entropy(rho_mb, "collision", candidates)
    return dist, theorem1_rhs(ks.delta, ks.n, t)
