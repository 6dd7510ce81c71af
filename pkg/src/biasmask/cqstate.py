"""
Exact classical-quantum state engine for small dimensions.

A :class:`CqState` stores ``P_X(x)`` and the conditional operators
``rho_B^x`` for every x in its support.  All quantities below are computed
blockwise: ``rho_XB - rho_U (x) rho_B`` is block diagonal in x, so its
trace norm is the sum of the trace norms of the blocks, including the
blocks ``-rho_B / 2^n`` of strings outside the support.

Entropies are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import CapacityError, ConditioningError, DimensionError, FormatError
from .gf2 import BitString

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
PROB_TOL = 1e-10
#: smallest eigenvalue accepted for a reference state sigma
EIG_FLOOR = 1e-9
#: weight of the maximally mixed state blended into rho_B as a candidate
RHO_B_BLEND = 1e-6
L2_AGREEMENT_TOL = 1e-9
#: default ceiling on 2^n * dB for dense and blockwise evaluation
MAX_DIM = 4096


class NumericalError(ArithmeticError):
    """Two independent evaluation paths disagree beyond tolerance."""


def _herm(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    data: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        a = np.array(self.data, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DimensionError(f"density matrix must be square, got shape {a.shape}")
        if np.max(np.abs(a - a.conj().T)) > HERMITIAN_TOL:
            raise ConditioningError("matrix is not Hermitian")
        a = _herm(a)
        if np.linalg.eigvalsh(a).min() < -PSD_TOL:
            raise ConditioningError("matrix has a negative eigenvalue")
        if self.normalized and abs(np.trace(a).real - 1.0) > TRACE_TOL:
            raise ConditioningError(f"trace is {np.trace(a).real!r}, expected 1")
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @property
    def d(self) -> int:
        return self.data.shape[0]

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityMatrix":
        return cls(np.eye(d) / d)

    @classmethod
    def pure(cls, psi: Sequence[complex]) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=np.complex128)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.data)


def inverse_power(sigma: DensityMatrix, power: float) -> np.ndarray:
    """``sigma ** (-power)`` via Hermitian eigendecomposition.

    Raises ConditioningError when sigma is not normalized or has an
    eigenvalue below ``EIG_FLOOR``.
    """
    if not sigma.normalized:
        raise ConditioningError("reference state must be normalized")
    w, v = np.linalg.eigh(sigma.data)
    if w.min() <= EIG_FLOOR:
        raise ConditioningError(f"reference state is singular (min eigenvalue {w.min():.3g})")
    return (v * w ** (-power)) @ v.conj().T


@dataclass(frozen=True, eq=False)
class CqState:
    """State classical on X in {0,1}^n with side information of dimension dB.

    ``xs`` are distinct integers, ``probs`` the matching P_X values and
    ``rhos`` the normalized conditional operators, shape ``(len(xs), dB, dB)``.
    """

    n: int
    dB: int
    xs: np.ndarray
    probs: np.ndarray
    rhos: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=np.int64).reshape(-1)
        pr = np.asarray(self.probs, dtype=np.float64).reshape(-1)
        rh = np.array(self.rhos, dtype=np.complex128)
        if self.n < 1 or self.dB < 1:
            raise DimensionError("n and dB must be >= 1")
        if xs.size == 0 or pr.shape != xs.shape or rh.shape != (xs.size, self.dB, self.dB):
            raise DimensionError("xs, probs and rhos have inconsistent shapes")
        if np.any(xs < 0) or np.any(xs >> self.n):
            raise DimensionError(f"x outside {{0,1}}^{self.n}")
        if np.unique(xs).size != xs.size:
            raise DimensionError("x values must be distinct")
        if np.any(pr < 0) or abs(pr.sum() - 1.0) > PROB_TOL:
            raise DimensionError(f"P_X must be >= 0 and sum to 1, got {pr.sum()!r}")
        if np.max(np.abs(rh - np.conj(np.swapaxes(rh, 1, 2)))) > HERMITIAN_TOL:
            raise ConditioningError("conditional operator is not Hermitian")
        rh = _herm(rh)
        if np.max(np.abs(np.trace(rh, axis1=1, axis2=2) - 1.0)) > TRACE_TOL:
            raise ConditioningError("conditional operators must have trace 1")
        if np.linalg.eigvalsh(rh).min() < -PSD_TOL:
            raise ConditioningError("conditional operator has a negative eigenvalue")
        for a in (xs, pr, rh):
            a.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "probs", pr)
        object.__setattr__(self, "rhos", rh)

    @classmethod
    def from_entries(cls, n: int, dB: int, entries) -> "CqState":
        """Build from ``(x, p, rho)`` triples; x may be an int or BitString."""
        xs, ps, rs = [], [], []
        for x, p, rho in entries:
            xs.append(x.value if isinstance(x, BitString) else int(x))
            ps.append(p)
            rs.append(rho.data if isinstance(rho, DensityMatrix) else rho)
        return cls(n, dB, np.array(xs), np.array(ps), np.array(rs).reshape(-1, dB, dB))

    @classmethod
    def classical(cls, n: int, probs: np.ndarray) -> "CqState":
        """dB = 1 state from a length-2^n probability vector."""
        probs = np.asarray(probs, dtype=np.float64)
        nz = np.flatnonzero(probs > 0)
        return cls(n, 1, nz, probs[nz], np.ones((nz.size, 1, 1)))

    @classmethod
    def product(cls, n: int, px: np.ndarray, rho: DensityMatrix) -> "CqState":
        """X distributed as ``px`` (length 2^n), independent of B in state rho."""
        px = np.asarray(px, dtype=np.float64)
        nz = np.flatnonzero(px > 0)
        return cls(n, rho.d, nz, px[nz], np.repeat(rho.data[None], nz.size, axis=0))

    def __len__(self) -> int:
        return self.xs.size

    def entries(self) -> Iterator[tuple[BitString, float, DensityMatrix]]:
        for x, p, r in zip(self.xs, self.probs, self.rhos):
            yield BitString(self.n, int(x)), float(p), DensityMatrix(r)

    def marginal_x(self) -> np.ndarray:
        out = np.zeros(1 << self.n)
        out[self.xs] = self.probs
        return out

    def rho_b(self) -> DensityMatrix:
        return DensityMatrix(np.einsum("k,kab->ab", self.probs, self.rhos))

    def weighted_blocks(self, max_dim: int = MAX_DIM) -> np.ndarray:
        """``P_X(x) rho_B^x`` for every x in {0,1}^n, zero off the support."""
        check_capacity(self.n, self.dB, max_dim)
        out = np.zeros((1 << self.n, self.dB, self.dB), dtype=np.complex128)
        out[self.xs] = self.probs[:, None, None] * self.rhos
        return out


def check_capacity(n: int, dB: int, max_dim: int = MAX_DIM) -> None:
    if (1 << n) * dB > max_dim:
        raise CapacityError(f"2^{n} * {dB} exceeds the dimension limit {max_dim}")


def full_matrix(s: CqState, max_dim: int = MAX_DIM) -> DensityMatrix:
    blocks = s.weighted_blocks(max_dim)
    size = (1 << s.n) * s.dB
    out = np.zeros((size, size), dtype=np.complex128)
    for x in s.xs:
        sl = slice(x * s.dB, (x + 1) * s.dB)
        out[sl, sl] = blocks[x]
    return DensityMatrix(out, normalized=False)


def trace_dist_uniform(s: CqState, max_dim: int = MAX_DIM) -> float:
    """``|| rho_XB - rho_U (x) rho_B ||_1``, a value in [0, 2]."""
    blocks = s.weighted_blocks(max_dim)
    rho_b = blocks.sum(axis=0)
    diff = blocks - rho_b / (1 << s.n)
    return float(np.abs(np.linalg.eigvalsh(_herm(diff))).sum())


def _conj(m: np.ndarray, a: np.ndarray) -> np.ndarray:
    return m @ a @ m


def _tr_sq(a: np.ndarray) -> np.ndarray:
    # tr(A^2) for Hermitian A is the squared Frobenius norm
    return np.sum(np.abs(a) ** 2, axis=(-2, -1))


def l2_dist_paths(s: CqState, sigma: DensityMatrix, max_dim: int = MAX_DIM) -> tuple[float, float]:
    """The L2 distance from uniform relative to sigma, computed two ways.

    Returns ``(from_definition, from_explicit_formula)``.  The first squares
    the conjugated difference ``rho_XB - rho_U (x) rho_B``; the second is
    ``sum_x tr((S P_X(x) rho^x S)^2) - 2^-n tr((S rho_B S)^2)`` with
    ``S = sigma^(-1/4)``.
    """
    _check_sigma(s, sigma)
    q = inverse_power(sigma, 0.25)
    blocks = s.weighted_blocks(max_dim)
    rho_b = blocks.sum(axis=0)
    diff = _conj(q, blocks - rho_b / (1 << s.n))
    direct = float(np.real(np.einsum("kab,kba->", diff, diff)))
    weighted = _conj(q, s.probs[:, None, None] * s.rhos)
    explicit = float(_tr_sq(weighted).sum() - _tr_sq(_conj(q, rho_b)) / (1 << s.n))
    return direct, explicit


def l2_dist(s: CqState, sigma: DensityMatrix, max_dim: int = MAX_DIM) -> float:
    direct, explicit = l2_dist_paths(s, sigma, max_dim)
    if abs(direct - explicit) > L2_AGREEMENT_TOL:
        raise NumericalError(f"L2 distance paths disagree: {direct!r} vs {explicit!r}")
    return direct


def _check_sigma(s: CqState, sigma: DensityMatrix) -> None:
    if sigma.d != s.dB:
        raise DimensionError(f"sigma has dimension {sigma.d}, state has dB={s.dB}")


def collision_sum(s: CqState, sigma: DensityMatrix) -> float:
    """``sum_x P_X(x)^2 tr((S rho^x S)^2)`` with ``S = sigma^(-1/4)``."""
    _check_sigma(s, sigma)
    q = inverse_power(sigma, 0.25)
    return float(_tr_sq(_conj(q, s.probs[:, None, None] * s.rhos)).sum())


def collision_entropy(s: CqState, sigma: DensityMatrix) -> float:
    return float(-np.log2(collision_sum(s, sigma)))


def min_entropy(s: CqState, sigma: DensityMatrix) -> float:
    _check_sigma(s, sigma)
    h = inverse_power(sigma, 0.5)
    conj = _conj(h, s.probs[:, None, None] * s.rhos)
    top = np.linalg.eigvalsh(_herm(conj))[:, -1].max()
    return float(-np.log2(top))


def blended_rho_b(s: CqState, weight: float = RHO_B_BLEND) -> DensityMatrix:
    """``rho_B`` mixed with a small multiple of the maximally mixed state."""
    rb = s.rho_b().data
    return DensityMatrix((1 - weight) * rb + weight * np.eye(s.dB) / s.dB)


ENTROPIES: dict[str, Callable[[CqState, DensityMatrix], float]] = {
    "collision": collision_entropy,
    "min": min_entropy,
}


def best_entropy(
    s: CqState, kind: str, candidates: Sequence[DensityMatrix]
) -> tuple[DensityMatrix, float]:
    """Largest entropy over the candidates plus the blended ``rho_B``.

    This is a lower bound on the supremum over all sigma.
    """
    if not candidates:
        raise ValueError("candidate list is empty")
    try:
        fn = ENTROPIES[kind]
    except KeyError:
        raise ValueError(f"unknown entropy kind {kind!r}") from None
    best = None
    for sigma in [blended_rho_b(s), *candidates]:
        v = fn(s, sigma)
        if best is None or v > best[1]:
            best = (sigma, v)
    return best


def process(s: CqState, channel: np.ndarray) -> CqState:
    """Apply a classical channel ``channel[x, y] = P(y | x)`` to X.

    The output length m is ``log2(channel.shape[1])``.  Outcomes with
    probability below 1e-15 are dropped.
    """
    w = np.asarray(channel, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != 1 << s.n:
        raise DimensionError(f"channel must have 2^{s.n} rows")
    m = w.shape[1].bit_length() - 1
    if w.shape[1] != 1 << m:
        raise DimensionError("channel output count must be a power of two")
    if np.any(w < 0) or np.max(np.abs(w.sum(axis=1) - 1.0)) > PROB_TOL:
        raise DimensionError("channel rows must be probability vectors")
    joint = w[s.xs] * s.probs[:, None]
    py = joint.sum(axis=0)
    keep = np.flatnonzero(py >= 1e-15)
    ops = np.einsum("ky,kab->yab", joint[:, keep], s.rhos) / py[keep, None, None]
    py = py[keep] / py[keep].sum()
    return CqState(m, s.dB, keep, py, ops)


def function_channel(n: int, m: int, f: Callable[[int], int]) -> np.ndarray:
    """Deterministic channel matrix for ``x -> f(x)``."""
    w = np.zeros((1 << n, 1 << m))
    for x in range(1 << n):
        w[x, f(x)] = 1.0
    return w


# --- state fixture files --------------------------------------------------


def dumps_state(s: CqState) -> str:
    width = (s.n + 3) // 4
    lines = [f"n={s.n} dB={s.dB}"]
    for x, p, rho in zip(s.xs, s.probs, s.rhos):
        lines.append(f"x={int(x):0{width}x} p={float(p)!r}")
        for row in rho:
            lines.append(" ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row))
    return "\n".join(lines) + "\n"


def loads_state(text: str) -> CqState:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    try:
        head = dict(tok.split("=", 1) for tok in lines[0].split())
        n, dB = int(head["n"]), int(head["dB"])
        xs, ps, rs = [], [], []
        i = 1
        while i < len(lines):
            tags = dict(tok.split("=", 1) for tok in lines[i].split())
            xs.append(int(tags["x"], 16))
            ps.append(float(tags["p"]))
            rows = []
            for ln in lines[i + 1 : i + 1 + dB]:
                rows.append([complex(*map(float, tok.split(","))) for tok in ln.split()])
            if len(rows) != dB or any(len(r) != dB for r in rows):
                raise ValueError(f"operator for x={tags['x']} is not {dB}x{dB}")
            rs.append(rows)
            i += 1 + dB
    except (IndexError, KeyError, ValueError, TypeError) as exc:
        raise FormatError(f"bad state fixture: {exc}") from exc
    return CqState(n, dB, np.array(xs), np.array(ps), np.array(rs, dtype=np.complex128))
