"""Per-expert competency estimates with sub-Gaussian confidence radii.

Tables are immutable snapshots: every update returns a new table, so a
snapshot can be shared freely between the round loop and anything that
inspects it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

DEFAULT_VARIANCE = 0.25


class ConfidenceInterval(NamedTuple):
    lower: float
    upper: float


@dataclass(frozen=True)
class EstimatorTable:
    """Observation counts for ``N`` experts plus the confidence level.

    ``samples[i]`` is the number of rounds expert ``i`` was observed and
    ``successes[i]`` how many of those it was scored correct.
    """

    samples: np.ndarray
    successes: np.ndarray
    variance: np.ndarray
    delta: float

    def __post_init__(self):
        for name in ("samples", "successes", "variance"):
            arr = np.array(getattr(self, name), copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if np.any(self.successes > self.samples) or np.any(self.successes < 0):
            raise ValueError("successes must satisfy 0 <= s_i <= t_i")
        if np.any(self.variance <= 0) or np.any(self.variance > 0.25):
            raise ValueError("variance bounds must lie in (0, 0.25]")

    @classmethod
    def empty(cls, n: int, delta: float,
              variance: Union[float, Sequence[float]] = DEFAULT_VARIANCE) -> "EstimatorTable":
        var = np.broadcast_to(np.asarray(variance, dtype=float), (n,))
        return cls(np.zeros(n, dtype=np.int64), np.zeros(n, dtype=np.int64), var, delta)

    @property
    def n_experts(self) -> int:
        return len(self.samples)

    @property
    def means(self) -> np.ndarray:
        """Empirical competencies; unsampled experts report 0.5."""
        t = self.samples
        return np.where(t > 0, self.successes / np.maximum(t, 1), 0.5)

    def with_delta(self, delta: float) -> "EstimatorTable":
        return replace(self, delta=delta)


def update_estimates(table: EstimatorTable,
                     outcomes: Union[Mapping[int, bool], Sequence[Optional[bool]]]) -> EstimatorTable:
    """Fold one round of per-expert correctness into ``table``.

    ``outcomes`` is either a mapping ``expert -> correct`` or a sequence of
    length ``N`` where ``None`` marks an expert that was not queried.
    """
    t = np.array(table.samples)
    s = np.array(table.successes)
    items = outcomes.items() if isinstance(outcomes, Mapping) else enumerate(outcomes)
    for i, ok in items:
        if ok is None:
            continue
        t[i] += 1
        s[i] += bool(ok)
    return replace(table, samples=t, successes=s)


def update_masked(table: EstimatorTable, correct: np.ndarray, observed: np.ndarray) -> EstimatorTable:
    """Vectorised :func:`update_estimates` for the simulation loop."""
    observed = np.asarray(observed, dtype=bool)
    return replace(table,
                   samples=table.samples + observed,
                   successes=table.successes + (observed & np.asarray(correct, dtype=bool)))


def radii(table: EstimatorTable) -> np.ndarray:
    """Raw radii ``sqrt(2 sigma^2 log(4/delta) / t)``; ``inf`` where ``t == 0``."""
    t = table.samples
    with np.errstate(divide="ignore"):
        r = np.sqrt(2.0 * table.variance * math.log(4.0 / table.delta) / t)
    return np.where(t > 0, r, np.inf)


def ucb_radius(table: EstimatorTable, i: int) -> float:
    return float(radii(table)[i])


def interval_bounds(table: EstimatorTable) -> Tuple[np.ndarray, np.ndarray]:
    """Clamped ``(lower, upper)`` arrays; an unsampled expert spans ``[0, 1]``."""
    mean = table.means
    r = radii(table)
    return np.clip(mean - r, 0.0, 1.0), np.clip(mean + r, 0.0, 1.0)


def intervals(table: EstimatorTable) -> List[ConfidenceInterval]:
    lo, hi = interval_bounds(table)
    return [ConfidenceInterval(float(a), float(b)) for a, b in zip(lo, hi)]


def pac_threshold(variance: float, delta: float, gap: float) -> int:
    """Rounds after which two experts ``gap`` apart separate w.p. ``1 - delta``."""
    if gap == 0:
        raise ValueError("degenerate gap: competencies must differ")
    if not 0.0 < delta < 4.0:
        raise ValueError("delta must lie in (0, 4) for a positive log term")
    value = 32.0 * variance * math.log(4.0 / delta) / gap ** 2
    # guard against 8.000000000000002 -> 9
    return int(math.ceil(value - 1e-9))


def detect_breakages(table: EstimatorTable,
                     candidates: Optional[Iterable[int]] = None) -> List[Tuple[int, int]]:
    """All pairs ``(i, j)`` whose confidence intervals are strictly disjoint, ``i`` above.

    Pairs are ordered by descending ``p_hat_i`` (then descending ``p_hat_j``).
    Experts with no samples never take part.
    """
    idx = np.arange(table.n_experts) if candidates is None else np.fromiter(candidates, dtype=int)
    idx = idx[table.samples[idx] > 0]
    return breakages_from(table.means, radii(table), idx)


def breakages_from(means: np.ndarray, radius: np.ndarray,
                   idx: Optional[np.ndarray] = None) -> List[Tuple[int, int]]:
    """:func:`detect_breakages` on raw estimates and radii."""
    means = np.asarray(means, dtype=float)
    radius = np.asarray(radius, dtype=float)
    idx = np.arange(len(means)) if idx is None else np.asarray(idx, dtype=int)
    order = idx[np.lexsort((idx, -means[idx]))]
    low = means[order] - radius[order]
    high = means[order] + radius[order]
    pairs = []
    for a in range(len(order)):
        for b in np.flatnonzero(high[a + 1:] < low[a]):
            pairs.append((int(order[a]), int(order[a + 1 + b])))
    return pairs


def delta_schedule(mode: str, horizon: int, t: int) -> float:
    """Confidence level for round ``t`` (1-based).

    ``fixed`` uses ``1/T`` throughout; ``anytime`` uses ``1/t^2`` (capped
    below 1 for the first round).
    """
    if mode == "fixed":
        return 1.0 / horizon if horizon > 1 else 0.5
    if mode == "anytime":
        return min(0.5, 1.0 / (t * t))
    raise ValueError(f"unknown delta mode {mode!r}")
