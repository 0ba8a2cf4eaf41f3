"""Experts, answer catalogues, ballots and the vote that turns them into one answer."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .prompts import CATEGORIES, parse_response, render_prompt
from .remote import RemoteEndpoint, remote_expert_query
from .votemath import QUOTA_TOL

KINDS = ("bernoulli", "trace", "remote")


@dataclass(frozen=True)
class ExpertSpec:
    kind: str
    p: Optional[float] = None
    trace: Optional[Tuple[bool, ...]] = None
    endpoint: Optional[RemoteEndpoint] = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown expert kind {self.kind!r}")
        if self.kind == "bernoulli" and (self.p is None or not 0.0 <= self.p <= 1.0):
            raise ValueError("bernoulli expert needs p in [0, 1]")
        if self.kind == "trace" and not self.trace:
            raise ValueError("trace expert needs a nonempty trace")
        if self.kind == "remote" and self.endpoint is None:
            raise ValueError("remote expert needs an endpoint")

    @classmethod
    def bernoulli(cls, p: float, name: str = "") -> "ExpertSpec":
        return cls("bernoulli", p=float(p), name=name)

    @classmethod
    def from_trace(cls, values: Sequence, name: str = "") -> "ExpertSpec":
        return cls("trace", trace=tuple(bool(v) for v in values), name=name)

    @classmethod
    def remote(cls, endpoint: RemoteEndpoint, name: str = "") -> "ExpertSpec":
        return cls("remote", endpoint=endpoint, name=name or endpoint.model)

    @property
    def competency(self) -> float:
        """True ``p`` for Bernoulli experts, the replay hit rate for traces."""
        if self.kind == "bernoulli":
            return float(self.p)
        if self.kind == "trace":
            return float(np.mean(self.trace))
        raise ValueError("remote experts have no known competency")


def load_trace(path: Union[str, Path], name: str = "") -> ExpertSpec:
    """One 0/1 per line; blank lines are ignored."""
    values = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line not in ("0", "1"):
            raise ValueError(f"{path}:{lineno}: expected 0 or 1, got {line!r}")
        values.append(line == "1")
    return ExpertSpec.from_trace(values, name or Path(path).stem)


@dataclass(frozen=True)
class Catalogue:
    items: Tuple[str, ...]
    truth_index: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if len(set(self.items)) != len(self.items):
            raise ValueError("catalogue items must be distinct")
        if self.truth_index is not None and not 0 <= self.truth_index < len(self.items):
            raise ValueError("truth_index out of range")

    def __len__(self) -> int:
        return len(self.items)

    def index(self, item: str) -> int:
        return self.items.index(item)


@dataclass(frozen=True)
class Ballot:
    expert: int
    choice: int


@dataclass(frozen=True)
class TaskContext:
    question: str
    truth: str
    domain: str = "gsm8k"
    choices: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if not self.truth:
            raise ValueError("truth must be nonempty")


def canonical_answer(answer: str, domain: str = "gsm8k") -> str:
    """Numbers compare by value ("2.0" == "2" == "4/2"); categories case-insensitively."""
    text = answer.strip()
    if domain in CATEGORIES:
        return text.lower()
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        return text
    return str(value)


def answers_match(answer: str, truth: str, domain: str = "gsm8k") -> bool:
    return canonical_answer(answer, domain) == canonical_answer(truth, domain)


def _remote_correct(spec: ExpertSpec, context: TaskContext, rng: np.random.Generator) -> bool:
    prompt = render_prompt(context.domain, context.question, context.choices)
    text = remote_expert_query(spec.endpoint, prompt)
    answer = parse_response(text, context.domain, rng=rng)
    return answers_match(answer, context.truth, context.domain)


def sample_outcomes(experts: Sequence[ExpertSpec], rng: np.random.Generator, t: int = 0,
                    context: Optional[TaskContext] = None) -> np.ndarray:
    """Correctness of every expert in round ``t`` (0-based for trace replay).

    Bernoulli experts draw one uniform each, in expert order.  Remote experts
    are queried concurrently and need ``context``.
    """
    out = np.zeros(len(experts), dtype=bool)
    remote = []
    for i, spec in enumerate(experts):
        if spec.kind == "bernoulli":
            out[i] = rng.random() < spec.p
        elif spec.kind == "trace":
            if t >= len(spec.trace):
                raise IndexError(f"trace underrun: expert {i} has {len(spec.trace)} rounds, asked for {t}")
            out[i] = spec.trace[t]
        else:
            remote.append(i)
    if remote:
        if context is None:
            raise ValueError("remote experts need a task context")
        with ThreadPoolExecutor(max_workers=len(remote)) as pool:
            results = pool.map(lambda i: _remote_correct(experts[i], context, rng), remote)
            for i, ok in zip(remote, results):
                out[i] = ok
    return out


def standardize(catalogues: Sequence[Catalogue]) -> Catalogue:
    """Union of the items in first-seen order."""
    if not catalogues:
        raise ValueError("need at least one catalogue")
    seen = dict.fromkeys(item for cat in catalogues for item in cat.items)
    return Catalogue(tuple(seen))


def propose_then_vote(responses: Sequence[str]) -> Tuple[Catalogue, List[Ballot]]:
    """Each expert proposes its answer, then votes for it among all proposals."""
    catalogue = Catalogue(tuple(dict.fromkeys(responses)))
    return catalogue, [Ballot(i, catalogue.index(r)) for i, r in enumerate(responses)]


def tally_weighted(ballots: Sequence[Ballot], theta: Sequence[float], quota: float,
                   rng: np.random.Generator, n_items: Optional[int] = None,
                   egalitarian_ties: bool = False) -> int:
    """Winning catalogue index.

    An item whose support strictly exceeds ``quota`` wins outright.  Otherwise
    the most-supported item wins, and a shared maximum is settled uniformly at
    random (the only case that draws from ``rng``).  With ``egalitarian_ties``
    the quota is ignored and only the maximum matters.
    """
    theta = np.asarray(theta, dtype=float)
    size = n_items if n_items is not None else max(b.choice for b in ballots) + 1
    support = np.zeros(size)
    for b in ballots:
        support[b.choice] += theta[b.expert]
    top = support.max()
    if not egalitarian_ties and top > quota + QUOTA_TOL and np.count_nonzero(support > quota + QUOTA_TOL) == 1:
        return int(np.argmax(support))
    tied = np.flatnonzero(np.abs(support - top) <= QUOTA_TOL)
    if len(tied) == 1:
        return int(tied[0])
    return int(tied[rng.integers(len(tied))])


def score(winner: int, catalogue: Catalogue) -> int:
    if catalogue.truth_index is None:
        raise ValueError("catalogue has no truth index")
    return int(winner == catalogue.truth_index)


def bernoulli_ballots(correct: Sequence[bool], catalogue: Catalogue,
                      rng: np.random.Generator) -> List[Ballot]:
    """Ballots for simulated experts: the truth when correct, else a uniform wrong item."""
    if catalogue.truth_index is None:
        raise ValueError("catalogue has no truth index")
    truth = catalogue.truth_index
    wrong = [k for k in range(len(catalogue)) if k != truth]
    ballots = []
    for i, ok in enumerate(correct):
        if ok or not wrong:
            ballots.append(Ballot(i, truth))
        else:
            ballots.append(Ballot(i, wrong[int(rng.integers(len(wrong)))]))
    return ballots
