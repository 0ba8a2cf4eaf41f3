"""Weighted majority voting with optimistic competencies (theta-WMV)."""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..estimation import EstimatorTable, delta_schedule, interval_bounds, update_masked
from ..mip import DEFAULT_WEDGE, WeightSolution, solve_optimal_weights
from .regret import Play

JITTER = 1e-9


@dataclass(frozen=True)
class WmvState:
    solution: Optional[WeightSolution]
    resolve_period: int = 1
    solved_at: int = 0


def optimistic_competencies(table: EstimatorTable) -> np.ndarray:
    """Clamped upper bounds (1 for unsampled experts) with exact duplicates pushed apart.

    The k-th repeat of a value is lowered by ``k * 1e-9`` so it never exceeds 1.
    """
    _, upper = interval_bounds(table)
    out = upper.copy()
    seen = {}
    for i, v in enumerate(upper):
        k = seen.get(v, 0)
        seen[v] = k + 1
        out[i] = v - k * JITTER
    return np.clip(out, 0.0, 1.0)


@functools.lru_cache(maxsize=4096)
def _solve_cached(p: Tuple[float, ...], quota: float, eps_wedge: float) -> WeightSolution:
    return solve_optimal_weights(p, quota, eps_wedge=eps_wedge)


def wmv_round(state: WmvState, table: EstimatorTable, t: int = 1, quota: Optional[float] = None,
              eps_wedge: float = DEFAULT_WEDGE) -> Tuple[WmvState, WeightSolution]:
    """Re-solve on optimistic competencies when due, then return the weights to play."""
    due = state.solution is None or (t - 1) % state.resolve_period == 0
    if not due:
        return state, state.solution
    q = table.n_experts / 2 if quota is None else quota
    sol = _solve_cached(tuple(optimistic_competencies(table).tolist()), float(q), eps_wedge)
    return WmvState(sol, state.resolve_period, t), sol


class WmvLearner:
    name = "wmv"

    def __init__(self, n: int, horizon: int, quota: Optional[float] = None, delta_mode: str = "fixed",
                 variance=0.25, resolve_period: int = 1, eps_wedge: float = DEFAULT_WEDGE):
        if resolve_period < 1:
            raise ValueError("resolve_period must be >= 1")
        self.horizon = horizon
        self.delta_mode = delta_mode
        self.quota = n / 2 if quota is None else quota
        self.eps_wedge = eps_wedge
        self.table = EstimatorTable.empty(n, delta_schedule(delta_mode, horizon, 1), variance)
        self.state = WmvState(None, resolve_period)
        self._all = np.ones(n, dtype=bool)

    def select(self, t: int) -> Play:
        if self.delta_mode != "fixed":
            self.table = self.table.with_delta(delta_schedule(self.delta_mode, self.horizon, t))
        self.state, sol = wmv_round(self.state, self.table, t, self.quota, self.eps_wedge)
        return sol

    def observe(self, t: int, correct: np.ndarray, reward: bool) -> None:
        self.table = update_masked(self.table, correct, self._all)
