"""Zooming over a fixed lattice of weight vectors on the scaled simplex."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .cucb import BaselineState, record
from .regret import Play, WeightedPlay

LATTICE_SIZE = 512


def zooming_arms(n: int, quota: float, rng: np.random.Generator, size: int = LATTICE_SIZE) -> np.ndarray:
    """Equal weights, then the ``n`` dictator vertices, then ``size`` uniform simplex points.

    Every row sums to ``2 * quota``.
    """
    total = 2.0 * quota
    equal = np.full((1, n), total / n)
    vertices = np.eye(n) * total
    points = rng.dirichlet(np.ones(n), size=size) * total
    return np.vstack([equal, vertices, points])


def l1_distances(arms: np.ndarray) -> np.ndarray:
    return np.abs(arms[:, None, :] - arms[None, :, :]).sum(axis=2)


def zoom_radius(counts: np.ndarray, horizon: int) -> np.ndarray:
    """``sqrt(2 log T / n)``, infinite for unplayed arms."""
    with np.errstate(divide="ignore"):
        r = np.sqrt(2.0 * math.log(horizon) / counts)
    return np.where(counts > 0, r, np.inf)


def zooming_round(state: BaselineState, active: np.ndarray, dist: np.ndarray, horizon: int) -> int:
    """Activate the first uncovered arm (if any) and return the arm to play.

    ``active`` is a boolean mask updated in place.
    """
    r = zoom_radius(state.counts, horizon)
    act = np.flatnonzero(active)
    if act.size == 0:
        active[0] = True
        return 0
    covered = (dist[act] <= r[act, None]).any(axis=0)
    fresh = np.flatnonzero(~covered & ~active)
    if fresh.size:
        active[fresh[0]] = True
    act = np.flatnonzero(active)
    index = state.means[act] + r[act]
    return int(act[np.argmax(index)])


class ZoomingLearner:
    name = "zooming"

    def __init__(self, n: int, horizon: int, quota: Optional[float] = None,
                 arms: Optional[np.ndarray] = None, rng: Optional[np.random.Generator] = None):
        self.quota = n / 2 if quota is None else quota
        self.horizon = horizon
        self.arms = arms if arms is not None else zooming_arms(n, self.quota, rng or np.random.default_rng(0))
        self.dist = l1_distances(self.arms)
        self.state = BaselineState.start(len(self.arms))
        self.active = np.zeros(len(self.arms), dtype=bool)
        self._arm = 0

    def select(self, t: int) -> Play:
        self._arm = zooming_round(self.state, self.active, self.dist, self.horizon)
        return WeightedPlay(tuple(self.arms[self._arm].tolist()), self.quota)

    def observe(self, t: int, correct: np.ndarray, reward: bool) -> None:
        record(self.state, self._arm, float(reward))
