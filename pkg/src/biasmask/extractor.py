"""
XOR-mask extraction and its numerical verifier.

The masked state keeps the member index i as a classical register on the
conditioning side: it is stored as a :class:`CqState` over d = a xor x whose
side system is B (x) I, with I diagonal.  ``trace_dist_uniform`` of that
state is then exactly the distance of D from uniform given both B and I.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cqstate import (
    MAX_DIM,
    CqState,
    DensityMatrix,
    check_capacity,
    collision_entropy,
    min_entropy,
    process,
    trace_dist_uniform,
)
from .errors import DimensionError
from .smallbias import BiasedFamily, WeightedSpace


def _xor_table(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    return idx[:, None] ^ idx[None, :]


def _blocks_to_state(n: int, dB: int, blocks: np.ndarray) -> CqState:
    """CqState from unnormalized blocks ``P(x) rho^x`` indexed by x."""
    probs = np.real(np.trace(blocks, axis1=1, axis2=2))
    keep = np.flatnonzero(probs > 1e-15)
    p = probs[keep]
    return CqState(n, dB, keep, p / p.sum(), blocks[keep] / p[:, None, None])


def masked_blocks(s: CqState, member: WeightedSpace) -> np.ndarray:
    """``P_D(d) rho^d = sum_x P_X(x) P_A(d xor x) rho^x`` for every d."""
    if member.n != s.n:
        raise DimensionError(f"member has n={member.n}, source has n={s.n}")
    weights = member.as_vector()[_xor_table(s.n)]
    return np.einsum("dx,xab->dab", weights, s.weighted_blocks())


def masked_component(s: CqState, member: WeightedSpace) -> CqState:
    """The state of ``A xor X`` together with B, for a single member A."""
    return _blocks_to_state(s.n, s.dB, masked_blocks(s, member))


def attach_classical(n: int, dB: int, components: Sequence[np.ndarray], weights: Sequence[float]) -> CqState:
    """Join per-index blocks into one state whose side system is B (x) I.

    ``components[i]`` holds the blocks ``P(x | i) rho^{x,i}`` and
    ``weights[i]`` is ``P(i)``; the index occupies the slow axis of the
    enlarged side system.
    """
    k = len(components)
    big = np.zeros((1 << n, k * dB, k * dB), dtype=np.complex128)
    for i, (blk, w) in enumerate(zip(components, weights)):
        sl = slice(i * dB, (i + 1) * dB)
        big[:, sl, sl] = w * blk
    return _blocks_to_state(n, k * dB, big)


def build_masked_state(s: CqState, family: BiasedFamily, max_dim: int = MAX_DIM) -> CqState:
    """State of ``(A_I xor X, B I)`` with I uniform over the family."""
    if family.n != s.n:
        raise DimensionError(f"family has n={family.n}, source has n={s.n}")
    check_capacity(s.n, s.dB * len(family), max_dim)
    comps = [masked_blocks(s, a) for a in family.members]
    return attach_classical(s.n, s.dB, comps, [1.0 / len(family)] * len(family))


def masked_distance_mixture(s: CqState, family: BiasedFamily) -> float:
    """Mean over members of ``d(rho_{D_i B} | B)``."""
    return float(np.mean([trace_dist_uniform(masked_component(s, a)) for a in family.members]))


@dataclass
class ExtractionInstance:
    source: CqState
    family: BiasedFamily
    joint: CqState

    @classmethod
    def build(cls, source: CqState, family: BiasedFamily) -> "ExtractionInstance":
        return cls(source, family, build_masked_state(source, family))


def theorem1_rhs(delta: float, n: int, h2: float) -> float:
    """``delta * 2^(-(h2 - n)/2)``."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    return delta * 2.0 ** (-(h2 - n) / 2)


@dataclass(frozen=True)
class BoundReport:
    lhs: float
    rhs: float
    sigma_label: str = ""

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


def verify_theorem1(
    s: CqState,
    family: BiasedFamily,
    sigma: DensityMatrix,
    sigma_label: str = "",
    entropy: str = "collision",
    lhs: float | None = None,
) -> BoundReport:
    """Distance of the masked state against the bound at one reference state.

    ``entropy="min"`` evaluates the weaker bound obtained from the
    min-entropy.  ``lhs`` may be passed in when it is already known, since
    it does not depend on sigma.
    """
    if lhs is None:
        lhs = trace_dist_uniform(build_masked_state(s, family))
    h = collision_entropy(s, sigma) if entropy == "collision" else min_entropy(s, sigma)
    return BoundReport(lhs, theorem1_rhs(family.delta, s.n, h), sigma_label)


# --- seeded functions -----------------------------------------------------


def _check_table(table: np.ndarray, s: CqState, m: int) -> np.ndarray:
    table = np.asarray(table, dtype=np.int64)
    if table.ndim != 2 or table.shape[1] != 1 << s.n:
        raise DimensionError(f"extractor table must have shape (|J|, 2^{s.n})")
    if np.any(table < 0) or np.any(table >> m):
        raise DimensionError(f"extractor outputs must fit in {m} bits")
    return table


def _seed_channel(row: np.ndarray, m: int) -> np.ndarray:
    w = np.zeros((row.size, 1 << m))
    w[np.arange(row.size), row] = 1.0
    return w


def weak_extractor_distance(table: np.ndarray, m: int, s: CqState) -> float:
    """``d(rho_{E(J,X) B} | B)`` for ``E(j, x) = table[j, x]`` and J uniform."""
    table = _check_table(table, s, m)
    w = sum(_seed_channel(row, m) for row in table) / table.shape[0]
    return trace_dist_uniform(process(s, w))


def strong_extractor_distance(table: np.ndarray, m: int, s: CqState, max_dim: int = MAX_DIM) -> float:
    """``d(rho_{E(J,X) J B} | J B)`` with J kept on the conditioning side."""
    table = _check_table(table, s, m)
    check_capacity(m, s.dB * table.shape[0], max_dim)
    comps = []
    for row in table:
        out = process(s, _seed_channel(row, m))
        blocks = np.zeros((1 << m, s.dB, s.dB), dtype=np.complex128)
        blocks[out.xs] = out.probs[:, None, None] * out.rhos
        comps.append(blocks)
    joint = attach_classical(m, s.dB, comps, [1.0 / table.shape[0]] * table.shape[0])
    return trace_dist_uniform(joint, max_dim)


def xor_mask_table(family_samples: Sequence[int], n: int) -> np.ndarray:
    """Seeded table ``E(j, x) = a_j xor x`` for an explicit list of masks."""
    xs = np.arange(1 << n)
    return np.array([a ^ xs for a in family_samples], dtype=np.int64)
