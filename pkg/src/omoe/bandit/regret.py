"""What a learner plays each round and how that play is scored."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, NamedTuple, Sequence, Tuple, Union

import numpy as np

from ..mip import WeightSolution
from ..votemath import QUOTA_TOL, Committee, p_maj, p_maj_weighted


class WeightedPlay(NamedTuple):
    weights: Tuple[float, ...]
    quota: float


Play = Union[Committee, WeightSolution, WeightedPlay]


def is_weighted(played: Play) -> bool:
    return not isinstance(played, Committee)


def digest(played: Play) -> str:
    """Short stable label for a play: member indices or rounded weights."""
    if isinstance(played, Committee):
        return "-".join(str(i) for i in played.members)
    return "w:" + ";".join(f"{w:.6g}" for w in np.asarray(played.weights, dtype=float))


def play_value(p_true: Sequence[float], played: Play) -> float:
    """Expected aggregate accuracy of ``played`` under the true competencies."""
    p = np.asarray(p_true, dtype=float)
    if isinstance(played, Committee):
        return p_maj(p[list(played.members)])
    return p_maj_weighted(p, played.weights, played.quota)


def regret_step(p_true: Sequence[float], played: Play, optimum_value: float) -> float:
    """Expected (not realised) instantaneous regret of one round."""
    return float(optimum_value - play_value(p_true, played))


def realized_correct(played: Play, correct: np.ndarray, tie_rng: np.random.Generator) -> bool:
    """Outcome of the binary vote this round; exact ties are settled by a fair coin."""
    if isinstance(played, Committee):
        members = list(played.members)
        k = int(np.count_nonzero(correct[members]))
        margin = 2 * k - len(members)
    else:
        w = np.asarray(played.weights, dtype=float)
        good = float(w[correct].sum())
        bad = float(w.sum()) - good
        margin = 0 if abs(good - bad) <= QUOTA_TOL else (1 if good > bad else -1)
    if margin > 0:
        return True
    if margin < 0:
        return False
    return bool(tie_rng.random() < 0.5)


@dataclass
class RegretTrace:
    """Per-round expected regret and play digests of one trial."""

    inst: np.ndarray
    digests: List[str]
    realized: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.inst)

    @property
    def total(self) -> float:
        return float(self.inst.sum())
