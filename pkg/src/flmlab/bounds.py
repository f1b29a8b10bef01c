"""Fitness-level bound calculators.

Six theorem-shaped bounds on the expected hitting time of a non-decreasing
level process: the classic sum-of-reciprocals upper bound and its weak
start-level lower counterpart, the viscosity pair driven by per-pair jump
weights gamma and a global uniformity constant chi, and the visit-probability
pair sum(v_i / p_i) that is exact when fed exact inputs.

All calculators are pure functions of their vectors.  Structural problems
(wrong lengths, non-positive rates, malformed distributions) raise
``ValueError``; violations of a theorem's preconditions are reported by
index in ``BoundResult.violated_preconditions`` and make the result
unusable as a proven bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "BoundResult",
    "FlmInput",
    "flm_upper_classic",
    "flm_lower_classic",
    "flm_lower_viscosity",
    "flm_upper_viscosity",
    "flm_lower_visit",
    "flm_upper_visit",
    "visit_lower_from_chain",
    "viscosity_params_from_chain",
]

EQUALITY_TOL = 1e-9
DIST_TOL = 1e-12


@dataclass
class BoundResult:
    """A computed runtime bound with the theorem that produced it."""

    value: float
    kind: str  # "upper" or "lower"
    theorem: str
    violated_preconditions: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violated_preconditions


@dataclass
class FlmInput:
    """Input bundle for the bound calculators.

    ``p`` holds leaving probabilities for the m-1 non-top levels, ``v``
    visit probabilities, ``start`` a distribution over all m levels,
    ``gamma`` an upper-triangular m-by-m matrix of conditional jump weights
    and ``chi`` their uniformity constant.
    """

    m: int
    p: np.ndarray
    v: Optional[np.ndarray] = None
    start: Optional[np.ndarray] = None
    gamma: Optional[np.ndarray] = None
    chi: Optional[float] = None


def _check_rates(p: np.ndarray, m: Optional[int] = None) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or len(p) < 1:
        raise ValueError("leaving probabilities must be a non-empty vector")
    if m is not None and len(p) != m - 1:
        raise ValueError(f"expected {m - 1} leaving probabilities, got {len(p)}")
    if np.any(p <= 0.0) or np.any(p > 1.0):
        raise ValueError("leaving probabilities must lie in (0, 1]")
    return p


def _check_start(start: np.ndarray, m: int) -> np.ndarray:
    start = np.asarray(start, dtype=float)
    if start.shape != (m,):
        raise ValueError(f"start distribution must have length {m}")
    if np.any(start < -DIST_TOL) or abs(start.sum() - 1.0) > DIST_TOL:
        raise ValueError("start must be a probability distribution over the levels")
    return start


def _check_visits(v: np.ndarray, length: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (length,):
        raise ValueError(f"visit probabilities must have length {length}")
    if np.any(v < 0.0) or np.any(v > 1.0 + DIST_TOL):
        raise ValueError("visit probabilities must lie in [0, 1]")
    return v


def flm_upper_classic(p: np.ndarray) -> BoundResult:
    """Classic upper bound: every level below the top is left at most once,
    so E[T] <= sum of 1/p_i."""
    p = _check_rates(p)
    return BoundResult(float(np.sum(1.0 / p)), "upper", "flm-upper-classic")


def flm_lower_classic(p: np.ndarray, start: np.ndarray) -> BoundResult:
    """Weak classic lower bound: at least the start level must be left,
    E[T] >= sum_i Pr[start at i] / p_i over the non-top levels."""
    start = _check_start(start, len(np.asarray(p)) + 1)
    p = _check_rates(p)
    return BoundResult(float(np.sum(start[:-1] / p)), "lower", "flm-lower-classic")


def _check_gamma_structure(gamma: np.ndarray, m: int) -> np.ndarray:
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (m, m):
        raise ValueError(f"gamma must be a {m}x{m} matrix")
    if np.any(np.abs(np.tril(gamma)) > 0.0):
        raise ValueError("gamma is defined for j > i only; lower triangle and diagonal must be 0")
    if np.any(gamma < 0.0) or np.any(gamma > 1.0 + DIST_TOL):
        raise ValueError("gamma entries must lie in [0, 1]")
    return gamma


def _viscosity_violations(
    p: np.ndarray, gamma: np.ndarray, chi: float, direction: str
) -> list[str]:
    m = len(p) + 1
    violations: list[str] = []
    for i in range(m - 1):
        row_sum = gamma[i, i + 1 :].sum()
        if abs(row_sum - 1.0) > EQUALITY_TOL:
            violations.append(f"gamma_row_sum[{i}]={row_sum!r}")
        tails = np.cumsum(gamma[i, ::-1])[::-1]  # tails[j] = sum_{l >= j} gamma[i, l]
        for j in range(i + 1, m):
            if direction == "lower":
                if gamma[i, j] < chi * tails[j] - EQUALITY_TOL:
                    violations.append(f"gamma_chi[{i},{j}]")
            else:
                if gamma[i, j] > chi * tails[j] + EQUALITY_TOL:
                    violations.append(f"gamma_chi[{i},{j}]")
    if direction == "upper":
        for j in range(m - 2):
            if (1.0 - chi) * p[j] > p[j + 1] + EQUALITY_TOL:
                violations.append(f"rate_monotone[{j}]")
    return violations


def flm_lower_viscosity(
    p: np.ndarray, gamma: np.ndarray, chi: float, start: np.ndarray
) -> BoundResult:
    """Viscosity lower bound: with jump weights gamma_{i,j} upper-bounding
    the transition split, row sums 1 and gamma_{i,j} >= chi * tail, the
    expected time is at least sum_i start_i * chi * sum_{j>=i} 1/p_j."""
    start = _check_start(start, len(np.asarray(p)) + 1)
    p = _check_rates(p)
    gamma = _check_gamma_structure(gamma, len(p) + 1)
    if not 0.0 <= chi <= 1.0:
        raise ValueError("chi must lie in [0, 1]")
    violations = _viscosity_violations(p, gamma, chi, "lower")
    inv_tail = np.cumsum((1.0 / p)[::-1])[::-1]  # sum_{j>=i} 1/p_j over non-top levels
    value = float(chi * np.sum(start[:-1] * inv_tail))
    return BoundResult(value, "lower", "flm-lower-viscosity", violations)


def flm_upper_viscosity(
    p: np.ndarray, gamma: np.ndarray, chi: float, start: np.ndarray
) -> BoundResult:
    """Viscosity upper bound: with gamma lower-bounding the transition split,
    gamma_{i,j} <= chi * tail and (1-chi) p_j <= p_{j+1}, the expected time
    is at most sum_i start_i (1/p_i + chi * sum_{j>i} 1/p_j)."""
    start = _check_start(start, len(np.asarray(p)) + 1)
    p = _check_rates(p)
    gamma = _check_gamma_structure(gamma, len(p) + 1)
    if not 0.0 <= chi <= 1.0:
        raise ValueError("chi must lie in [0, 1]")
    violations = _viscosity_violations(p, gamma, chi, "upper")
    inv = 1.0 / p
    tail_beyond = np.concatenate([np.cumsum(inv[::-1])[::-1][1:], [0.0]])  # sum_{j>i} 1/p_j
    value = float(np.sum(start[:-1] * (inv + chi * tail_beyond)))
    return BoundResult(value, "upper", "flm-upper-viscosity", violations)


def flm_lower_visit(p_upper: np.ndarray, v_lower: np.ndarray) -> BoundResult:
    """Visit-probability lower bound: exactly the visited levels must be
    left, so E[T] >= sum_i v_i / p_i with p_i upper and v_i lower bounds."""
    p = _check_rates(p_upper)
    v = _check_visits(v_lower, len(p))
    return BoundResult(float(np.sum(v / p)), "lower", "flm-lower-visit")


def flm_upper_visit(p_lower: np.ndarray, v_upper: np.ndarray) -> BoundResult:
    """Visit-probability upper bound: E[T] <= sum_i v_i / p_i with p_i lower
    and v_i upper bounds; v_i = 1 recovers the classic upper bound."""
    p = _check_rates(p_lower)
    v = _check_visits(v_upper, len(p))
    return BoundResult(float(np.sum(v / p)), "upper", "flm-upper-visit")


def visit_lower_from_chain(chain, i: int) -> float:
    """Worst-case conditional lower bound on the probability of visiting
    level i: the minimum of T[j][i] / T[j][>=i] over levels j < i that can
    reach i or beyond, and of the start mass analogue when there is start
    mass at or above i."""
    m = chain.m_levels
    if not 0 <= i < m:
        raise ValueError(f"level must be in [0, {m - 1}], got {i}")
    t = chain.transition
    candidates = []
    for j in range(i):
        tail = t[j, i:].sum()
        if tail > 0.0:
            candidates.append(t[j, i] / tail)
    start_tail = chain.start[i:].sum()
    if start_tail > 0.0:
        candidates.append(chain.start[i] / start_tail)
    if not candidates:
        return 0.0
    return float(min(candidates))


def viscosity_params_from_chain(chain, direction: str = "lower") -> tuple[np.ndarray, np.ndarray, float]:
    """Extract exact (p, gamma, chi) from a level chain.

    gamma rows are the exact conditional jump distributions, so both
    transition-split preconditions hold with equality; chi is the extreme
    ratio gamma_{i,j} / tail that keeps the requested direction valid.  For
    the upper direction any row with mass directly on the top level forces
    chi = 1.
    """
    if direction not in ("lower", "upper"):
        raise ValueError("direction must be 'lower' or 'upper'")
    m = chain.m_levels
    p = chain.leave_probs[: m - 1]
    if np.any(p <= 0.0):
        raise ValueError("chain has an absorbing non-top level; no viscosity extraction")
    gamma = np.zeros((m, m))
    gamma[: m - 1, :] = chain.transition[: m - 1, :] / p[:, None]
    gamma[np.tril_indices(m)] = 0.0
    ratios = []
    for i in range(m - 1):
        tails = np.cumsum(gamma[i, ::-1])[::-1]
        for j in range(i + 1, m):
            if tails[j] > 1e-300:
                ratios.append(gamma[i, j] / tails[j])
    if direction == "lower":
        chi = min(ratios, default=1.0)
    else:
        chi = max(ratios, default=1.0)
        for j in range(m - 2):
            chi = max(chi, 1.0 - p[j + 1] / p[j])
    return p, gamma, float(min(1.0, max(0.0, chi)))
