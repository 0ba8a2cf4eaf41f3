"""Exact majority-voting accuracy and optimal egalitarian committees.

Competencies are plain float sequences; a committee is identified by the
indices of its members in the full competency vector.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Tuple, Union

import numpy as np

ENUM_LIMIT = 25
BRUTE_FORCE_LIMIT = 15
QUOTA_TOL = 1e-9

Competencies = Union[Sequence[float], Mapping[int, float], np.ndarray]


@dataclass(frozen=True)
class Committee:
    members: Tuple[int, ...]
    value: float

    @property
    def size(self) -> int:
        return len(self.members)


def _values(p: Competencies) -> np.ndarray:
    if isinstance(p, Mapping):
        p = list(p.values())
    arr = np.asarray(p, dtype=float).reshape(-1)
    if np.any(arr < 0) or np.any(arr > 1):
        raise ValueError("competencies must lie in [0, 1]")
    return arr


def _popcount(n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    counts = np.zeros(1 << n, dtype=np.int64)
    for b in range(n):
        counts += (masks >> b) & 1
    return counts


def scenario_weights(p: Competencies) -> np.ndarray:
    """Probability of every correct-coalition, indexed by N-bit mask (bit i = expert i)."""
    p = _values(p)
    probs = np.ones(1)
    for q in p:
        # existing masks keep bit i = 0, the upper copy sets it
        probs = np.concatenate([probs * (1.0 - q), probs * q])
    return probs


def p_maj_egalitarian(p: Competencies) -> float:
    """Egalitarian majority accuracy by enumerating all 2^n outcomes.

    Exact ties (even committees) are credited one half.
    """
    p = _values(p)
    n = len(p)
    if n == 0:
        raise ValueError("committee must be nonempty")
    if n > ENUM_LIMIT:
        raise ValueError("enumeration too large; use DP variant")
    # vectorise over the low bits, loop over the high ones
    low = min(n, 16)
    low_probs = scenario_weights(p[:low])
    low_counts = _popcount(low)
    total = 0.0
    for high in itertools.product((0, 1), repeat=n - low):
        w = math.prod(q if b else 1.0 - q for q, b in zip(p[low:], high))
        k = low_counts + sum(high)
        total += w * (low_probs[2 * k > n].sum() + 0.5 * low_probs[2 * k == n].sum())
    return float(total)


def correct_count_pmf(p: Competencies) -> np.ndarray:
    """Poisson-binomial pmf of the number of correct experts."""
    pmf = np.array([1.0])
    for q in _values(p):
        nxt = np.zeros(len(pmf) + 1)
        nxt[:-1] = pmf * (1.0 - q)
        nxt[1:] += pmf * q
        pmf = nxt
    return pmf


def p_maj_egalitarian_dp(p: Competencies) -> float:
    p = _values(p)
    n = len(p)
    if n == 0:
        raise ValueError("committee must be nonempty")
    pmf = correct_count_pmf(p)
    k = np.arange(n + 1)
    return float(pmf[2 * k > n].sum() + 0.5 * pmf[2 * k == n].sum())


def p_maj(p: Competencies) -> float:
    """Egalitarian accuracy with the empty committee defined as 0."""
    p = _values(p)
    return 0.0 if len(p) == 0 else p_maj_egalitarian_dp(p)


def p_maj_weighted(p: Competencies, weights: Sequence[float], quota: float) -> float:
    """Probability that the correct coalition's weight strictly exceeds ``quota``.

    Coalitions landing exactly on the quota lose.
    """
    p = _values(p)
    theta = np.asarray(weights, dtype=float)
    if len(theta) != len(p):
        raise ValueError("weights and competencies differ in length")
    if np.any(theta < 0):
        raise ValueError("weights must be nonnegative")
    if quota <= 0:
        raise ValueError("quota must be positive")
    if len(p) > ENUM_LIMIT:
        raise ValueError("enumeration too large")
    return float(scenario_weights(p)[coalition_sums(theta) > quota + QUOTA_TOL].sum())


def coalition_sums(theta: Sequence[float]) -> np.ndarray:
    """Total weight of every coalition, indexed like :func:`scenario_weights`."""
    sums = np.zeros(1)
    for w in np.asarray(theta, dtype=float):
        sums = np.concatenate([sums, sums + w])
    return sums


def _split(candidate: Competencies, addition: Competencies) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(candidate, Mapping) and isinstance(addition, Mapping):
        overlap = set(candidate) & set(addition)
        if overlap:
            raise ValueError(f"candidate and addition overlap on experts {sorted(overlap)}")
    return _values(candidate), _values(addition)


def advantage(candidate: Competencies, addition: Competencies) -> float:
    """Change in egalitarian accuracy from adding ``addition`` to ``candidate``.

    Pass mappings ``{expert: p}`` to have disjointness checked.
    """
    base, extra = _split(candidate, addition)
    return p_maj(np.concatenate([base, extra])) - p_maj(base)


def conservative_advantage(candidate_lower: Competencies, addition_upper: Competencies) -> float:
    """Advantage with pessimistic competencies for the kept set and optimistic ones
    for the set under test; a nonpositive value licenses removal."""
    return advantage(candidate_lower, addition_upper)


def _descending(p: np.ndarray) -> np.ndarray:
    return np.lexsort((np.arange(len(p)), -p))


def oec_prefix(p: Competencies) -> Committee:
    """Best Top-K committee; ties between prefix lengths go to the smaller K."""
    p = _values(p)
    if len(p) == 0:
        raise ValueError("no experts")
    order = _descending(p)
    best_k, best = 1, p[order[0]]
    for k in range(2, len(p) + 1):
        v = p_maj_egalitarian_dp(p[order[:k]])
        if v > best + 1e-12:
            best_k, best = k, v
    return Committee(tuple(sorted(int(i) for i in order[:best_k])), float(best))


def greedy_oec(p: Competencies) -> Committee:
    """Grow a committee from the best expert by whole blocks of the sorted order.

    From the current committee the next block ``{e_j, ..., e_k}`` with the
    largest advantage is added while that advantage is positive.  Adding
    blocks rather than single experts lets an odd committee jump past a
    worse even size.
    """
    p = _values(p)
    if len(p) == 0:
        raise ValueError("no experts")
    order = _descending(p)
    members = [int(order[0])]
    j = 1
    while j < len(p):
        gains = [advantage(p[members], p[order[j:k + 1]]) for k in range(j, len(p))]
        k_best = int(np.argmax(gains))
        if gains[k_best] <= 1e-12:
            break
        members.extend(int(i) for i in order[j:j + k_best + 1])
        j += k_best + 1
    return Committee(tuple(sorted(members)), p_maj(p[members]))


def brute_force_oec(p: Competencies) -> Committee:
    """Global optimum over all nonempty subsets; prefers smaller, then lexicographically first."""
    p = _values(p)
    n = len(p)
    if n == 0:
        raise ValueError("no experts")
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_LIMIT} experts")
    best: Tuple[int, ...] = ()
    best_v = -1.0
    for size in range(1, n + 1):
        for members in itertools.combinations(range(n), size):
            v = p_maj_egalitarian_dp(p[list(members)])
            if v > best_v + 1e-12:
                best, best_v = members, v
    return Committee(best, float(best_v))


def log_odds_weights(p: Competencies) -> np.ndarray:
    p = _values(p)
    if np.any((p <= 0) | (p >= 1)):
        raise ValueError("degenerate competency: log-odds need p strictly inside (0, 1)")
    return np.log(p / (1.0 - p))


def _sign(x: float, tol: float = 1e-12) -> int:
    return 0 if abs(x) <= tol else (1 if x > 0 else -1)


def consistency_gap(p: Competencies, tol: float = 1e-6) -> float:
    """Largest radius for which conservative and true advantages agree in sign.

    Checked on every split of the descending order into a top block and the
    rest; the radius is located by bisection on ``[0, 1]``.
    """
    p = np.sort(_values(p))[::-1]
    n = len(p)
    if n < 2:
        return 1.0
    true_signs = [_sign(advantage(p[:b], p[b:])) for b in range(1, n)]

    def consistent(eps: float) -> bool:
        lo = np.clip(p - eps, 0.0, 1.0)
        hi = np.clip(p + eps, 0.0, 1.0)
        return all(_sign(conservative_advantage(lo[:b], hi[b:])) == s
                   for b, s in zip(range(1, n), true_signs))

    if consistent(1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if consistent(mid):
            lo = mid
        else:
            hi = mid
    return lo


def check_bounding_assumption(p_upper: Sequence[float], p_lower: Sequence[float],
                              family: Sequence[bool]) -> bool:
    """Whether ``sum(p_up) - z.p_up_S >= sum(p_lo) - z.p_lo_S`` for the family ``z``."""
    up = _values(p_upper)
    lo = _values(p_lower)
    if np.any(lo > up + 1e-15):
        raise ValueError("lower competencies must not exceed upper ones")
    z = np.asarray(family, dtype=bool)
    lhs = up.sum() - scenario_weights(up)[z].sum()
    rhs = lo.sum() - scenario_weights(lo)[z].sum()
    return bool(lhs >= rhs - 1e-12)


def min_gap(p: Iterable[float]) -> float:
    """Smallest pairwise competency difference."""
    s = np.sort(np.asarray(list(p), dtype=float))
    return float(np.min(np.diff(s))) if len(s) > 1 else 0.0
