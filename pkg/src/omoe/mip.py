"""Optimal weighted-majority weights as a search over coalition families.

A family ``z`` marks which correct-coalitions ``S`` carry the vote.  For
competencies sorted in descending order the solver branches on the
undecided ``z_S`` (most probable first), closes every partial assignment
under the structural rules any nonnegative, descending weight vector must
obey, and checks that a candidate family is realisable by solving a small
linear feasibility problem.

Scenario masks use bit ``i`` for the ``i``-th expert of the sorted order.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from .votemath import QUOTA_TOL, coalition_sums, p_maj_weighted, scenario_weights

SCENARIO_LIMIT = 20
EXACT_LIMIT = 10
ORACLE_LIMIT = 4
DEFAULT_WEDGE = 1e-6
FEAS_CHECK_EVERY = 8

UNDECIDED = -1


class InfeasibleRoot(RuntimeError):
    pass


@dataclass(frozen=True)
class WeightSolution:
    """Realising weights (in the caller's expert order) for an optimal family.

    ``family`` is indexed by masks over the caller's order as well; ``slack``
    is the smallest distance of any coalition weight from the quota.
    """

    weights: np.ndarray
    quota: float
    objective: float
    family: np.ndarray
    slack: float

    @property
    def support(self) -> int:
        return int(np.count_nonzero(self.weights > 0))


def scenario_probs(p: Sequence[float]) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if len(p) > SCENARIO_LIMIT:
        raise ValueError(f"scenario table limited to {SCENARIO_LIMIT} experts")
    return scenario_weights(p)


def default_eps_mip(quota: float) -> float:
    return 1e-7 * quota


def _membership(n: int) -> np.ndarray:
    masks = np.arange(1 << n)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(float)


@functools.lru_cache(maxsize=None)
def _membership_cached(n: int) -> np.ndarray:
    x = _membership(n)
    x.setflags(write=False)
    return x


@functools.lru_cache(maxsize=200_000)
def _feasible_cached(n: int, winners: bytes, losers: bytes, quota: float, eps_mip: float,
                     eps_wedge: float, relaxed: bool) -> Optional[Tuple[Tuple[float, ...], float]]:
    x = _membership_cached(n)
    win = np.frombuffer(winners, dtype=bool)
    lose = np.frombuffer(losers, dtype=bool)
    # variables: theta_0..theta_{n-1}, margin s; maximise s
    c = np.zeros(n + 1)
    c[-1] = -1.0
    rows, rhs = [], []
    if win.any():
        # x.theta >= Q + eps + s
        rows.append(np.hstack([-x[win], np.ones((win.sum(), 1))]))
        rhs.append(np.full(win.sum(), -quota - eps_mip))
    if lose.any():
        # x.theta + s <= Q
        rows.append(np.hstack([x[lose], np.ones((lose.sum(), 1))]))
        rhs.append(np.full(lose.sum(), quota))
    if n > 1:
        # theta_{j+1} - theta_j <= -eps_wedge
        wedge = np.zeros((n - 1, n + 1))
        for j in range(n - 1):
            wedge[j, j], wedge[j, j + 1] = -1.0, 1.0
        rows.append(wedge)
        rhs.append(np.full(n - 1, -eps_wedge))
    total = np.hstack([np.ones(n), [0.0]])
    if relaxed:
        rows.append(np.vstack([total, -total]))
        rhs.append(np.array([2 * quota, -quota]))
        a_eq = b_eq = None
    else:
        a_eq, b_eq = total[None, :], np.array([2 * quota])
    bounds = [(0, None)] * n + [(-2 * quota, 2 * quota)]
    res = linprog(c, A_ub=np.vstack(rows), b_ub=np.concatenate(rhs), A_eq=a_eq, b_eq=b_eq,
                  bounds=bounds, method="highs")
    if res.status != 0 or -res.fun < -1e-9:
        return None
    theta = np.maximum(res.x[:n], 0.0)
    # direct substitution: the decided rows must come out as requested
    sums = x @ theta
    if np.any(sums[win] <= quota + QUOTA_TOL) or np.any(sums[lose] > quota + QUOTA_TOL):
        return None
    margins = np.abs(sums[win | lose] - quota)
    return tuple(float(t) for t in theta), float(margins.min()) if margins.size else 0.0


def family_feasible(family: Sequence[int], quota: float, eps_mip: Optional[float] = None,
                    eps_wedge: float = DEFAULT_WEDGE, relaxed: bool = False
                    ) -> Optional[Tuple[np.ndarray, float]]:
    """Weights realising ``family`` under the MIP constraints, or ``None``.

    ``family`` holds one entry per scenario: 1 (coalition must win), 0 (must
    lose) or -1 (unconstrained).  Weights are sorted descending with
    consecutive gaps of at least ``eps_wedge`` and sum to ``2 * quota``
    (``quota <= sum <= 2 * quota`` when ``relaxed``).  Returns the weights
    and the smallest coalition-to-quota margin.
    """
    z = np.asarray(family)
    n = int(len(z)).bit_length() - 1
    if len(z) != 1 << n:
        raise ValueError("family length must be a power of two")
    eps = default_eps_mip(quota) if eps_mip is None else eps_mip
    hit = _feasible_cached(n, (z == 1).tobytes(), (z == 0).tobytes(), float(quota), float(eps),
                           float(eps_wedge), bool(relaxed))
    if hit is None:
        return None
    return np.array(hit[0]), hit[1]


@functools.lru_cache(maxsize=None)
def _neighbours(n: int):
    """Single-step closure moves per mask: supersets, subsets, up-shifts, down-shifts."""
    full = (1 << n) - 1
    up, down, shift_up, shift_down = [], [], [], []
    for s in range(1 << n):
        up.append([s | (1 << b) for b in range(n) if not s >> b & 1])
        down.append([s & ~(1 << b) for b in range(n) if s >> b & 1])
        # swap a member for a better-ranked (lower index) outsider
        shift_up.append([(s & ~(1 << j)) | (1 << i) for j in range(n) if s >> j & 1
                         for i in range(j) if not s >> i & 1])
        shift_down.append([(s & ~(1 << i)) | (1 << j) for i in range(n) if s >> i & 1
                           for j in range(i + 1, n) if not s >> j & 1])
    return full, up, down, shift_up, shift_down


def propagate(assignment: Sequence[int], n: Optional[int] = None,
              fixed: Optional[Sequence[int]] = None) -> Tuple[np.ndarray, bool]:
    """Close a partial family under the rules every sorted weight vector obeys.

    * a winning coalition's complement loses,
    * supersets of winners win and subsets of losers lose,
    * swapping a winner's member for a better-ranked outsider still wins
      (and the reverse swap keeps a loser losing).

    Returns the closed assignment and a contradiction flag.  ``fixed`` limits
    the work queue to newly set masks; by default every decided mask is used.
    """
    z = np.array(assignment, dtype=np.int8)
    if n is None:
        n = int(len(z)).bit_length() - 1
    full, up, down, shift_up, shift_down = _neighbours(n)
    queue = list(np.flatnonzero(z != UNDECIDED)) if fixed is None else list(fixed)
    while queue:
        s = int(queue.pop())
        if z[s] == 1:
            forced = [(t, 1) for t in up[s]] + [(t, 1) for t in shift_up[s]] + [(full ^ s, 0)]
        else:
            forced = [(t, 0) for t in down[s]] + [(t, 0) for t in shift_down[s]]
        for t, v in forced:
            if z[t] == UNDECIDED:
                z[t] = v
                queue.append(t)
            elif z[t] != v:
                return z, True
    return z, False


def _sorted_order(p: np.ndarray) -> np.ndarray:
    return np.lexsort((np.arange(len(p)), -p))


def _permute_family(family_sorted: np.ndarray, order: np.ndarray) -> np.ndarray:
    """Re-index a family over sorted ranks into the caller's expert order."""
    n = len(order)
    out = np.zeros_like(family_sorted)
    for s in range(1 << n):
        orig = 0
        for rank in range(n):
            if s >> rank & 1:
                orig |= 1 << int(order[rank])
        out[orig] = family_sorted[s]
    return out


def _solution(p: np.ndarray, order: np.ndarray, theta_sorted: np.ndarray, slack: float,
              quota: float) -> WeightSolution:
    theta = np.empty_like(theta_sorted)
    theta[order] = theta_sorted
    family = coalition_sums(theta) > quota + QUOTA_TOL
    return WeightSolution(theta, quota, p_maj_weighted(p, theta, quota), family, slack)


def _dictator(n: int) -> np.ndarray:
    return (np.arange(1 << n) & 1).astype(np.int8)


def solve_optimal_weights(p: Sequence[float], quota: Optional[float] = None,
                          eps_mip: Optional[float] = None, eps_wedge: float = DEFAULT_WEDGE,
                          check_every: int = FEAS_CHECK_EVERY) -> WeightSolution:
    """Globally optimal weights for the weighted-majority problem by branch and bound."""
    p = np.asarray(p, dtype=float)
    n = len(p)
    if n == 0:
        raise ValueError("no experts")
    if n > EXACT_LIMIT:
        raise ValueError(f"exact solve limit is {EXACT_LIMIT} experts")
    quota = n / 2 if quota is None else float(quota)
    order = _sorted_order(p)
    ps = scenario_probs(p[order])
    full = (1 << n) - 1

    best_hit = family_feasible(_dictator(n), quota, eps_mip, eps_wedge)
    if best_hit is None:
        raise InfeasibleRoot("dictator family is not realisable; check eps parameters")
    best_obj = float(ps[_dictator(n) == 1].sum())
    best_theta, best_slack = best_hit

    branch_order = np.lexsort((np.arange(1 << n), -ps))
    comp = full ^ np.arange(1 << n)
    # each complement pair once, keyed by the smaller mask
    pair_lo = np.arange(1 << n)[np.arange(1 << n) < comp]

    def bound(z: np.ndarray) -> float:
        won = float(ps[z == 1].sum())
        a, b = z[pair_lo], z[comp[pair_lo]]
        pa, pb = ps[pair_lo], ps[comp[pair_lo]]
        open_a = (a == UNDECIDED) & (b != 1)
        open_b = (b == UNDECIDED) & (a != 1)
        extra = np.where(open_a & open_b, np.maximum(pa, pb),
                         np.where(open_a, pa, np.where(open_b, pb, 0.0)))
        return won + float(extra.sum())

    root = np.full(1 << n, UNDECIDED, dtype=np.int8)
    root[full] = 1  # the whole committee always carries 2Q > Q
    root[0] = 0
    root, bad = propagate(root, n)
    if bad:
        raise InfeasibleRoot("root propagation failed")

    stack: List[Tuple[np.ndarray, int]] = [(root, 0)]
    while stack:
        z, depth = stack.pop()
        if bound(z) <= best_obj + 1e-12:
            continue
        if check_every and depth and depth % check_every == 0:
            if family_feasible(z, quota, eps_mip, eps_wedge) is None:
                continue
        undecided = branch_order[z[branch_order] == UNDECIDED]
        if undecided.size == 0:
            obj = float(ps[z == 1].sum())
            if obj > best_obj + 1e-12:
                hit = family_feasible(z, quota, eps_mip, eps_wedge)
                if hit is not None:
                    best_obj, (best_theta, best_slack) = obj, hit
            continue
        s = int(undecided[0])
        # push 0 first so the z=1 branch is explored first
        for v in (0, 1):
            child = z.copy()
            child[s] = v
            child, bad = propagate(child, n, fixed=[s])
            if not bad:
                stack.append((child, depth + 1))

    return _solution(p, order, best_theta, best_slack, quota)


@functools.lru_cache(maxsize=None)
def candidate_families(n: int) -> np.ndarray:
    """Every upward-closed, complement-free family over ``n`` experts, one per row."""
    if n > ORACLE_LIMIT:
        raise ValueError(f"family enumeration limited to {ORACLE_LIMIT} experts")
    size = 1 << n
    codes = np.arange(1 << size, dtype=np.int64)
    z = ((codes[:, None] >> np.arange(size)) & 1).astype(bool)
    ok = np.ones(len(codes), dtype=bool)
    full = size - 1
    for s in range(size):
        ok &= ~(z[:, s] & z[:, full ^ s])
        for b in range(n):
            if not s >> b & 1:
                ok &= ~z[:, s] | z[:, s | (1 << b)]
    out = z[ok].astype(np.int8)
    out.setflags(write=False)
    return out


def enumerate_families_bruteforce(p: Sequence[float], quota: Optional[float] = None,
                                  eps_mip: Optional[float] = None, eps_wedge: float = DEFAULT_WEDGE,
                                  relaxed: bool = False) -> WeightSolution:
    """Exhaustive oracle: best realisable family among all upward-closed, complement-free ones."""
    p = np.asarray(p, dtype=float)
    n = len(p)
    if n > ORACLE_LIMIT:
        raise ValueError(f"family enumeration limited to {ORACLE_LIMIT} experts")
    quota = n / 2 if quota is None else float(quota)
    order = _sorted_order(p)
    families = candidate_families(n)
    objectives = families @ scenario_probs(p[order])
    for k in np.argsort(-objectives, kind="stable"):
        hit = family_feasible(families[k], quota, eps_mip, eps_wedge, relaxed=relaxed)
        if hit is not None:
            return _solution(p, order, hit[0], hit[1], quota)
    raise InfeasibleRoot("no realisable family")
