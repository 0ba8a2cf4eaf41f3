"""Successive expert elimination for the egalitarian committee.

The learner plays its whole candidate set every round.  Whenever two
candidates' confidence intervals separate, it asks whether everything from
the lower expert downward can be dropped: the drop is licensed when adding
any top block of that tail to the rest, valued pessimistically for the kept
experts and optimistically for the tail, cannot help.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..estimation import EstimatorTable, breakages_from, delta_schedule, radii, update_masked
from ..votemath import Committee, conservative_advantage, p_maj
from .regret import Play


@dataclass(frozen=True)
class SeeState:
    candidates: Tuple[int, ...]
    log: Tuple[Tuple[int, Tuple[int, ...]], ...] = ()

    @classmethod
    def start(cls, n: int) -> "SeeState":
        return cls(tuple(range(n)))

    @property
    def eliminated(self) -> Tuple[int, ...]:
        return tuple(sorted(i for _, removed in self.log for i in removed))


def _split(means: np.ndarray, candidates: Tuple[int, ...], j: int):
    """Candidates ranked above ``j`` and the tail from ``j`` down (descending)."""
    top = [k for k in candidates if means[k] > means[j]]
    tail = [k for k in candidates if means[k] <= means[j]]
    tail.sort(key=lambda k: (-means[k], k))
    return top, tail


def removal_test(means: np.ndarray, radius: np.ndarray, candidates: Tuple[int, ...], j: int) -> bool:
    """Whether the tail starting at ``j`` can be removed from ``candidates``."""
    top, tail = _split(means, candidates, j)
    if not top:
        return False
    lower = np.clip(means - radius, 0.0, 1.0)
    upper = np.clip(means + radius, 0.0, 1.0)
    kept = lower[top]
    return all(conservative_advantage(kept, upper[tail[:m]]) <= 0 for m in range(1, len(tail) + 1))


def see_step(state: SeeState, means: np.ndarray, radius: np.ndarray, t: int = 0
             ) -> Tuple[SeeState, Committee]:
    """One elimination pass on raw estimates; returns the new state and the committee to play."""
    cand = state.candidates
    log = list(state.log)
    tested = set()
    for i, j in breakages_from(means, radius, np.array(cand)):
        # earlier truncations may have removed either end already
        if i not in cand or j not in cand or j in tested:
            continue
        tested.add(j)
        if removal_test(means, radius, cand, j):
            _, tail = _split(means, cand, j)
            cand = tuple(k for k in cand if k not in tail)
            log.append((t, tuple(sorted(tail))))
    new = SeeState(cand, tuple(log)) if cand != state.candidates else state
    return new, Committee(cand, p_maj(np.asarray(means)[list(cand)]))


def see_round(state: SeeState, table: EstimatorTable, t: int = 0) -> Tuple[SeeState, Committee]:
    return see_step(state, table.means, radii(table), t)


class SeeLearner:
    """Round-loop driver: plays the candidates, observes only them."""

    name = "see"

    def __init__(self, n: int, horizon: int, delta_mode: str = "fixed", variance=0.25,
                 table: Optional[EstimatorTable] = None, state: Optional[SeeState] = None):
        self.horizon = horizon
        self.delta_mode = delta_mode
        self.table = table if table is not None else \
            EstimatorTable.empty(n, delta_schedule(delta_mode, horizon, 1), variance)
        self.state = state if state is not None else SeeState.start(n)
        self._observed = np.zeros(n, dtype=bool)
        self._refresh_mask()
        _, self._play = see_round(self.state, self.table)

    def _refresh_mask(self):
        self._observed[:] = False
        self._observed[list(self.state.candidates)] = True

    def select(self, t: int) -> Play:
        return self._play

    def observe(self, t: int, correct: np.ndarray, reward: bool) -> None:
        table = update_masked(self.table, correct, self._observed)
        if self.delta_mode != "fixed":
            table = table.with_delta(delta_schedule(self.delta_mode, self.horizon, t))
        self.table = table
        before = self.state.candidates
        self.state, self._play = see_round(self.state, table, t)
        if self.state.candidates != before:
            self._refresh_mask()
