"""Budgeted variant: query at most ``m`` experts per round during a grouped burn-in."""

from __future__ import annotations

from typing import List, Tuple

import numpy as np

from ..estimation import update_masked
from ..votemath import Committee
from .regret import Play
from .see import SeeLearner, see_round


def targeted_m_schedule(n: int, m: int, t0: int) -> Tuple[List[Tuple[int, ...]], int]:
    """Consecutive groups of ``m`` experts (the last one possibly short) and the burn-in length."""
    if m <= 0:
        raise ValueError("m must be positive")
    if t0 <= 0:
        raise ValueError("t0 must be positive")
    groups = [tuple(range(s, min(s + m, n))) for s in range(0, n, m)]
    return groups, len(groups) * t0


class TargetedLearner:
    """Plays each group for ``t0`` rounds, then hands the pooled table to SEE."""

    name = "targeted"

    def __init__(self, n: int, m: int, t0: int, horizon: int, delta_mode: str = "fixed", variance=0.25):
        self.groups, self.burn_in = targeted_m_schedule(n, m, t0)
        self.t0 = t0
        self.see = SeeLearner(n, horizon, delta_mode, variance)
        self._mask = np.zeros(n, dtype=bool)

    def _group(self, t: int) -> Tuple[int, ...]:
        return self.groups[(t - 1) // self.t0]

    def select(self, t: int) -> Play:
        if t <= self.burn_in:
            return Committee(self._group(t), 0.0)
        return self.see.select(t)

    def observe(self, t: int, correct: np.ndarray, reward: bool) -> None:
        if t > self.burn_in:
            self.see.observe(t, correct, reward)
            return
        self._mask[:] = False
        self._mask[list(self._group(t))] = True
        see = self.see
        see.table = update_masked(see.table, correct, self._mask)
        if t == self.burn_in:
            see.state, see._play = see_round(see.state, see.table, t)
            see._refresh_mask()
