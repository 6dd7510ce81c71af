"""Seeded random instances: states, reference states, families and codes."""

from __future__ import annotations

import numpy as np

from .cqstate import CqState, DensityMatrix, blended_rho_b
from .smallbias import BiasedFamily, WeightedSpace, aghp_construct


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream for one trial of a seeded run."""
    return np.random.default_rng([seed, trial])


def random_density(rng: np.random.Generator, d: int, rank: int | None = None) -> DensityMatrix:
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def random_sigma(rng: np.random.Generator, d: int, floor: float = 1e-3) -> DensityMatrix:
    """Full-rank reference state, blended with the maximally mixed state."""
    rho = random_density(rng, d).data
    return DensityMatrix((1 - floor) * rho + floor * np.eye(d) / d)


def random_distribution(rng: np.random.Generator, size: int, support: int | None = None) -> np.ndarray:
    p = np.zeros(size)
    support = size if support is None else min(size, support)
    idx = rng.choice(size, support, replace=False)
    p[idx] = rng.dirichlet(np.full(support, rng.uniform(0.2, 2.0)))
    return p


def random_cq_state(
    rng: np.random.Generator, n: int, dB: int, support: int | None = None, pure_fraction: float = 0.3
) -> CqState:
    """Random P_X over a random support, with a mix of pure and mixed conditionals."""
    px = random_distribution(rng, 1 << n, support)
    xs = np.flatnonzero(px > 0)
    rhos = []
    for _ in xs:
        rank = 1 if rng.random() < pure_fraction else int(rng.integers(1, dB + 1))
        rhos.append(random_density(rng, dB, rank).data)
    return CqState(n, dB, xs, px[xs] / px[xs].sum(), np.array(rhos))


def sigma_candidates(rng: np.random.Generator, s: CqState, count: int = 5) -> list[DensityMatrix]:
    """``count`` reference states, the first being the blended rho_B."""
    return [blended_rho_b(s)] + [random_sigma(rng, s.dB) for _ in range(count - 1)]


def random_full_rank(rng: np.random.Generator, k: int, n: int) -> np.ndarray:
    while True:
        g = rng.integers(0, 2, size=(k, n), dtype=np.uint8)
        if _rank(g) == k:
            return g


def _rank(a: np.ndarray) -> int:
    from .gf2 import BinMatrix

    return BinMatrix.from_array(a).rank()


def point_mass_family(rng: np.random.Generator, n: int, size: int) -> BiasedFamily:
    pts = rng.choice(1 << n, size, replace=size > (1 << n))
    return BiasedFamily.of([WeightedSpace.point_mass(n, int(p)) for p in pts])


def aghp_family(rng: np.random.Generator, n: int, size: int, max_m: int = 6) -> BiasedFamily:
    """Family of AGHP spaces, each shifted by a random mask (shifts keep |bias|)."""
    members = []
    for _ in range(size):
        space = aghp_construct(n, int(rng.integers(1, max_m + 1)))
        shift = int(rng.integers(0, 1 << n))
        members.append(WeightedSpace(n, space.points ^ shift, space.probs))
    return BiasedFamily.of(members)


def code_family(rng: np.random.Generator, n: int, size: int, k: int | None = None) -> BiasedFamily:
    from .privcorrect import LinearCode
    from .smallbias import code_space

    members = []
    for _ in range(size):
        kk = int(rng.integers(1, n + 1)) if k is None else k
        members.append(code_space(LinearCode.from_generator(random_full_rank(rng, kk, n))))
    return BiasedFamily.of(members)


def weighted_family(rng: np.random.Generator, n: int, size: int) -> BiasedFamily:
    members = [WeightedSpace.from_vector(n, random_distribution(rng, 1 << n, int(rng.integers(1, (1 << n) + 1))))
               for _ in range(size)]
    return BiasedFamily.of(members)


FAMILY_KINDS = {
    "aghp": aghp_family,
    "codes": code_family,
    "points": point_mass_family,
    "weighted": weighted_family,
}
