"""UCB1 over committees treated as independent arms."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from ..estimation import EstimatorTable, update_masked
from ..votemath import Committee
from .regret import Play

FULL_SUBSET_LIMIT = 10


def committee_arms(n: int) -> List[Tuple[int, ...]]:
    """All nonempty subsets, smallest first."""
    return [c for k in range(1, n + 1) for c in itertools.combinations(range(n), k)]


@dataclass
class BaselineState:
    counts: np.ndarray
    sums: np.ndarray

    @classmethod
    def start(cls, n_arms: int) -> "BaselineState":
        return cls(np.zeros(n_arms, dtype=np.int64), np.zeros(n_arms))

    @property
    def means(self) -> np.ndarray:
        return np.where(self.counts > 0, self.sums / np.maximum(self.counts, 1), 0.0)


def ucb_index(state: BaselineState, t: int) -> np.ndarray:
    """``mean + sqrt(2 log t / n)``; unplayed arms get ``inf``."""
    n = state.counts
    with np.errstate(divide="ignore", invalid="ignore"):
        bonus = np.sqrt(2.0 * math.log(max(t, 1)) / n)
    return np.where(n > 0, state.means + bonus, np.inf)


def cucb_round(state: BaselineState, t: int) -> int:
    """Index of the arm to play (first maximiser; unplayed arms win in order)."""
    return int(np.argmax(ucb_index(state, t)))


def record(state: BaselineState, arm: int, reward: float) -> None:
    state.counts[arm] += 1
    state.sums[arm] += reward


class CucbLearner:
    """Subset arms for small ``N``; above :data:`FULL_SUBSET_LIMIT` the arms are the
    top-K prefixes of the current empirical ordering, one arm per K."""

    name = "cucb"

    def __init__(self, n: int, horizon: int = 0):
        self.n = n
        self.prefix_mode = n > FULL_SUBSET_LIMIT
        self.arms = None if self.prefix_mode else committee_arms(n)
        self.state = BaselineState.start(n if self.prefix_mode else len(self.arms))
        self.table = EstimatorTable.empty(n, 0.5)
        self._all = np.ones(n, dtype=bool)
        self._arm = 0

    def _members(self, arm: int) -> Tuple[int, ...]:
        if not self.prefix_mode:
            return self.arms[arm]
        means = self.table.means
        order = np.lexsort((np.arange(self.n), -means))
        return tuple(sorted(int(i) for i in order[:arm + 1]))

    def select(self, t: int) -> Play:
        self._arm = cucb_round(self.state, t)
        return Committee(self._members(self._arm), 0.0)

    def observe(self, t: int, correct: np.ndarray, reward: bool) -> None:
        record(self.state, self._arm, float(reward))
        if self.prefix_mode:
            self.table = update_masked(self.table, correct, self._all)
