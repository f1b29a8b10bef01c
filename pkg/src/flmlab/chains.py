"""Exact Markov-chain analysis over fitness levels.

Ground-truth oracles for level leaving probabilities, visit probabilities,
skip probabilities and expected hitting times.  Transition masses are
assembled in log space throughout (individual terms underflow doubles long
before the assembled probabilities do) and exponentiated at the end.

The brute-force companion :func:`full_state_expected_time` solves the full
2^n-state chain of the elitist accept-if-not-worse process and is the
universal cross-check for every level chain built here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import gammaln

from .benchmarks import jump_fitness_of_ones

__all__ = [
    "LevelChain",
    "ChainSummary",
    "FullStateResult",
    "mutation_class_row",
    "onemax_transition_prob",
    "onemax_level_matrix",
    "jump_level_matrix",
    "longpath_level_matrix",
    "visit_probabilities",
    "visit_probability_matrix",
    "expected_hitting_time",
    "skip_probability",
    "truncate_chain",
    "summarize",
    "full_state_expected_time",
]

ROW_SUM_TOL = 1e-12
FULL_STATE_MAX_N = 14

StartSpec = Union[str, int]


@dataclass
class LevelChain:
    """Row-stochastic transition matrix over fitness levels plus a start law.

    The level process is non-decreasing: entries below the diagonal must be
    zero.  ``labels`` optionally records what each level index stands for
    (e.g. the ones-count class of a jump chain level).  Immutable after
    construction; concurrent reads are safe.
    """

    transition: np.ndarray
    start: np.ndarray
    labels: Optional[tuple] = None

    def __post_init__(self) -> None:
        t = np.asarray(self.transition, dtype=float)
        s = np.asarray(self.start, dtype=float)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise ValueError("transition matrix must be square")
        if s.shape != (t.shape[0],):
            raise ValueError("start vector length must match the level count")
        if np.any(t < -ROW_SUM_TOL) or np.any(s < -ROW_SUM_TOL):
            raise ValueError("probabilities must be non-negative")
        if np.max(np.abs(t.sum(axis=1) - 1.0)) > ROW_SUM_TOL:
            raise ValueError("every transition row must sum to 1")
        if abs(s.sum() - 1.0) > ROW_SUM_TOL:
            raise ValueError("start distribution must sum to 1")
        if np.any(np.abs(np.tril(t, k=-1)) > 0):
            raise ValueError("level process must be non-decreasing (lower triangle not zero)")
        object.__setattr__(self, "transition", t)
        object.__setattr__(self, "start", s)

    @property
    def m_levels(self) -> int:
        return self.transition.shape[0]

    @property
    def leave_probs(self) -> np.ndarray:
        """Per-level leaving probabilities 1 - T[i][i] (top entry is 0)."""
        return 1.0 - np.diag(self.transition)


@dataclass
class ChainSummary:
    """Exact per-level quantities of a chain: p_i, v_i, q_i and hitting times."""

    leave_probs: np.ndarray
    visit_probs: np.ndarray
    skip_probs: np.ndarray
    hitting_times: np.ndarray
    expected_time: float


# ---------------------------------------------------------------------------
# transition masses for standard bit mutation between ones-count classes
# ---------------------------------------------------------------------------


def _log_binom(m: int, j: np.ndarray) -> np.ndarray:
    return gammaln(m + 1) - gammaln(j + 1) - gammaln(m - j + 1)


def mutation_class_row(n: int, p: float, k: int) -> np.ndarray:
    """Distribution of the offspring ones-count under standard bit mutation
    of a parent with ``k`` ones, as a length-(n+1) vector.

    Moving from k to l ones requires flipping j zero-bits up and
    j - (l - k) one-bits down for every feasible j; the terms are summed in
    log space (grouped by destination) so that tiny masses survive.
    """
    if not 0 <= k <= n:
        raise ValueError(f"ones-count must be in [0, {n}], got {k}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"mutation rate must be in (0, 1), got {p}")
    up = np.arange(n - k + 1)
    down = np.arange(k + 1)
    log_odds = math.log(p) - math.log1p(-p)
    log_up = _log_binom(n - k, up) + up * log_odds
    log_down = _log_binom(k, down) + down * log_odds
    terms = (log_up[:, None] + log_down[None, :] + n * math.log1p(-p)).ravel()
    dest = (k + up[:, None] - down[None, :]).ravel()

    peak = np.full(n + 1, -np.inf)
    np.maximum.at(peak, dest, terms)
    scaled = np.bincount(dest, weights=np.exp(terms - peak[dest]), minlength=n + 1)
    return np.exp(peak) * scaled


def onemax_transition_prob(n: int, p: float, k: int, l: int) -> float:
    """Probability that mutation turns a parent with k ones into an offspring
    with l ones (both directions of l relative to k)."""
    if not 0 <= l <= n:
        raise ValueError(f"target ones-count must be in [0, {n}], got {l}")
    return float(mutation_class_row(n, p, k)[l])


def _binomial_start(n: int) -> np.ndarray:
    start = np.exp(_log_binom(n, np.arange(n + 1)) - n * math.log(2.0))
    return start / start.sum()


def _resolve_start(start: StartSpec, n: int) -> np.ndarray:
    if isinstance(start, str):
        if start != "random":
            raise ValueError(f"unknown start mode {start!r}")
        return _binomial_start(n)
    if not 0 <= int(start) <= n:
        raise ValueError(f"start class must be in [0, {n}], got {start}")
    point = np.zeros(n + 1)
    point[int(start)] = 1.0
    return point


def onemax_level_matrix(n: int, p: float, start: StartSpec = "random") -> LevelChain:
    """Exact level chain of the elitist process on OneMax.

    Level = ones-count; upward moves carry the mutation mass, rejected and
    same-level moves are folded into the self-loop (valid because all points
    of a level are symmetric).  ``start`` is "random" for the binomial
    initialization or an integer for a point mass at that level.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    t = np.zeros((n + 1, n + 1))
    for k in range(n):
        row = mutation_class_row(n, p, k)
        t[k, k + 1 :] = row[k + 1 :]
        t[k, k] = max(0.0, 1.0 - t[k, k + 1 :].sum())
    t[n, n] = 1.0
    return LevelChain(t, _resolve_start(start, n), labels=tuple(range(n + 1)))


def jump_fitness_order(n: int, k: int) -> list[int]:
    """Ones-counts ordered by increasing jump fitness: the gap classes from
    worst (n-1 ones) to best (n-k+1 ones), then 0..n-k, then the optimum."""
    return sorted(range(n + 1), key=lambda a: jump_fitness_of_ones(a, n, k))


def jump_level_matrix(n: int, k: int, p: float, start: StartSpec = "random") -> LevelChain:
    """Exact chain over ones-count classes of a jump function, ordered by
    fitness.  The coarse gap/non-gap partition is not Markov inside the
    non-gap region, so each ones-count keeps its own (sub-)level; transition
    mass is mutation mass filtered by accept-if-not-worse, with rejected
    mass added to the self-loop.

    ``labels[i]`` is the ones-count of level i.  Integer ``start`` means a
    point mass at that ones-count class.
    """
    if not 2 <= k <= n:
        raise ValueError(f"jump size must be in [2, {n}], got {k}")
    order = jump_fitness_order(n, k)
    position = {a: i for i, a in enumerate(order)}
    m = n + 1
    t = np.zeros((m, m))
    for a in range(n + 1):
        i = position[a]
        if a == n:
            t[i, i] = 1.0
            continue
        row = mutation_class_row(n, p, a)
        for b in range(n + 1):
            j = position[b]
            if j > i:  # strictly better fitness: accepted
                t[i, j] = row[b]
        t[i, i] = max(0.0, 1.0 - t[i, i + 1 :].sum())

    class_start = _resolve_start(start, n)
    start_vec = np.zeros(m)
    for a in range(n + 1):
        start_vec[position[a]] = class_start[a]
    return LevelChain(t, start_vec, labels=tuple(order))


def longpath_level_matrix(path, p: float, start: StartSpec = 0) -> LevelChain:
    """Exact chain over long k-path positions.

    With an on-path start the parent never leaves the path, so the path
    index is a full Markov state; the transition mass to a point d bits away
    is p^d (1-p)^(n-d).
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"mutation rate must be in (0, 1), got {p}")
    pts = np.array(path.points, dtype=np.int16)
    m = len(pts)
    dist = np.abs(pts[:, None, :] - pts[None, :, :]).sum(axis=2)
    mass = np.exp(dist * math.log(p) + (path.n - dist) * math.log1p(-p))
    t = np.triu(mass, k=1)
    diag = 1.0 - t.sum(axis=1)
    np.fill_diagonal(t, np.maximum(diag, 0.0))
    if isinstance(start, str):
        raise ValueError("longpath chains start on a fixed path position")
    start_vec = np.zeros(m)
    start_vec[int(start)] = 1.0
    return LevelChain(t, start_vec, labels=tuple(range(m)))


# ---------------------------------------------------------------------------
# chain analysis
# ---------------------------------------------------------------------------


def _check_no_absorbing_interior(chain: LevelChain, reach: np.ndarray) -> None:
    p = chain.leave_probs
    top = chain.m_levels - 1
    stuck = (p[:top] <= 0.0) & (reach[:top] > 1e-15)
    if np.any(stuck):
        levels = np.flatnonzero(stuck)
        raise ValueError(f"absorbing non-top level(s) reachable: {levels.tolist()}")


def visit_probabilities(chain: LevelChain) -> np.ndarray:
    """Exact probability of ever occupying each level.

    Forward recursion over the embedded jump chain,
    v_i = start_i + sum_{j<i} v_j T[j][i] / (1 - T[j][j]); exact because a
    non-decreasing level process visits each level at most once.
    """
    t = chain.transition
    p = chain.leave_probs
    m = chain.m_levels
    v = np.zeros(m)
    ratio = np.zeros((m, m))
    positive = p > 0.0
    ratio[positive] = t[positive] / p[positive, None]
    for i in range(m):
        v[i] = chain.start[i] + v[:i] @ ratio[:i, i]
    _check_no_absorbing_interior(chain, v)
    return v


def visit_probability_matrix(chain: LevelChain) -> np.ndarray:
    """V[k, i] = probability of ever visiting level i when started at level k
    (point mass), for all start levels at once."""
    t = chain.transition
    p = chain.leave_probs
    m = chain.m_levels
    ratio = np.zeros((m, m))
    positive = p > 0.0
    ratio[positive] = t[positive] / p[positive, None]
    v = np.eye(m)
    for i in range(m):
        v[:, i] += v[:, :i] @ ratio[:i, i]
    _check_no_absorbing_interior(chain, v.max(axis=0))
    return v


def expected_hitting_time(chain: LevelChain) -> tuple[float, np.ndarray]:
    """Expected iterations to reach the top level.

    Returns (overall expectation under the start law, per-level vector E_i)
    via the backward recursion E_i = 1/p_i + sum_{l>i} (T[i][l]/p_i) E_l.
    Unreachable interior levels with p_i = 0 get E_i = inf.
    """
    visit_probabilities(chain)  # raises on reachable absorbing interior levels
    t = chain.transition
    p = chain.leave_probs
    m = chain.m_levels
    times = np.zeros(m)
    for i in range(m - 2, -1, -1):
        if p[i] <= 0.0:
            times[i] = math.inf
            continue
        times[i] = (1.0 + t[i, i + 1 :] @ times[i + 1 :]) / p[i]
    mass = chain.start > 0.0
    return float(chain.start[mass] @ times[mass]), times


def skip_probability(chain: LevelChain, lo: int, hi: int) -> float:
    """Probability that no level in the contiguous range [lo, hi] is visited.

    Sums, over levels below the range, the visit probability times the
    conditional chance of jumping clear over the range, plus the start mass
    strictly above the range.
    """
    m = chain.m_levels
    if not 0 <= lo <= hi < m:
        raise ValueError(f"level range [{lo}, {hi}] out of bounds for {m} levels")
    v = visit_probabilities(chain)
    t = chain.transition
    p = chain.leave_probs
    total = float(chain.start[hi + 1 :].sum())
    for j in range(lo):
        if v[j] <= 0.0:
            continue
        total += v[j] * (t[j, hi + 1 :].sum() / p[j])
    return min(1.0, max(0.0, total))


def truncate_chain(chain: LevelChain, top: int) -> LevelChain:
    """Collapse all levels >= ``top`` into a single absorbing top level,
    giving the chain whose hitting time is the time to reach level >= top."""
    m = chain.m_levels
    if not 0 < top < m:
        raise ValueError(f"truncation level must be in [1, {m - 1}], got {top}")
    t = np.zeros((top + 1, top + 1))
    t[:top, :top] = chain.transition[:top, :top]
    t[:top, top] = chain.transition[:top, top:].sum(axis=1)
    t[top, top] = 1.0
    start = np.concatenate([chain.start[:top], [chain.start[top:].sum()]])
    labels = None if chain.labels is None else tuple(chain.labels[:top]) + (chain.labels[top:],)
    return LevelChain(t, start, labels=labels)


def summarize(chain: LevelChain) -> ChainSummary:
    """Exact p_i, v_i, q_i and hitting times of a chain in one bundle."""
    v = visit_probabilities(chain)
    expected, times = expected_hitting_time(chain)
    return ChainSummary(
        leave_probs=chain.leave_probs[:-1],
        visit_probs=v,
        skip_probs=1.0 - v,
        hitting_times=times,
        expected_time=expected,
    )


# ---------------------------------------------------------------------------
# brute-force full-state oracle
# ---------------------------------------------------------------------------


@dataclass
class FullStateResult:
    """Exact quantities from the full 2^n-state chain of the elitist process."""

    expected_time: float
    times: np.ndarray
    visit_probs: np.ndarray
    start: np.ndarray


def _state_bits(n: int) -> np.ndarray:
    codes = np.arange(2**n, dtype=np.uint32)
    return ((codes[:, None] >> np.arange(n)) & 1).astype(np.uint8)


def full_state_expected_time(
    benchmark,
    p: float,
    start: Union[str, int, np.ndarray] = "random",
) -> FullStateResult:
    """Solve the full 2^n-state accepted-move chain of the (1+1) EA.

    Builds the dense transition matrix (mutation mass filtered by
    accept-if-not-worse), solves the linear hitting-time system over
    non-optimal states by dense elimination, and computes exact per-level
    visit probabilities by first-passage systems.  ``start`` is "random"
    (uniform over all states), an integer level (uniform over that level's
    states) or an explicit bit string.
    """
    n = benchmark.n
    if n > FULL_STATE_MAX_N:
        raise ValueError(f"full-state oracle capped at n <= {FULL_STATE_MAX_N}, got {n}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"mutation rate must be in (0, 1), got {p}")

    size = 2**n
    bits = _state_bits(n)
    fitness = np.array([benchmark.fitness(bits[s]) for s in range(size)], dtype=float)
    optimal = np.array([bool(benchmark.is_optimum(bits[s])) for s in range(size)])
    levels = np.array([benchmark.level(bits[s]) for s in range(size)], dtype=int)

    popcount = np.array([int(c).bit_count() for c in range(size)], dtype=np.uint8)
    codes = np.arange(size, dtype=np.uint32)
    dist = popcount[(codes[:, None] ^ codes[None, :])]
    trans = np.exp(dist * math.log(p) + (n - dist) * math.log1p(-p))
    trans[fitness[None, :] < fitness[:, None]] = 0.0  # rejected offspring
    np.fill_diagonal(trans, 0.0)
    np.fill_diagonal(trans, np.maximum(1.0 - trans.sum(axis=1), 0.0))

    if isinstance(start, str):
        if start != "random":
            raise ValueError(f"unknown start mode {start!r}")
        start_dist = np.full(size, 1.0 / size)
    elif isinstance(start, (int, np.integer)):
        at_level = levels == int(start)
        if not np.any(at_level):
            raise ValueError(f"no state has level {start}")
        start_dist = at_level / at_level.sum()
    else:
        code = sum(int(b) << i for i, b in enumerate(np.asarray(start, dtype=np.uint8)))
        start_dist = np.zeros(size)
        start_dist[code] = 1.0

    times = np.zeros(size)
    interior = ~optimal
    if np.any(interior):
        q = trans[np.ix_(interior, interior)]
        times[interior] = np.linalg.solve(np.eye(q.shape[0]) - q, np.ones(q.shape[0]))

    top = int(levels.max())
    visit = np.zeros(top + 1)
    for lvl in range(top + 1):
        at = levels == lvl
        if not np.any(at):
            continue
        below = levels < lvl
        v = float(start_dist[at].sum())
        if np.any(below) and start_dist[below].sum() > 0.0:
            q = trans[np.ix_(below, below)]
            b = trans[np.ix_(below, at)].sum(axis=1)
            h = np.linalg.solve(np.eye(q.shape[0]) - q, b)
            v += float(start_dist[below] @ h)
        visit[lvl] = v

    expected = float(start_dist @ times)
    return FullStateResult(expected_time=expected, times=times, visit_probs=visit, start=start_dist)
