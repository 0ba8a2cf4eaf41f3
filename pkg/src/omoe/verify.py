"""Oracle-equivalence suites: each fast routine against an exhaustive one."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .mip import enumerate_families_bruteforce, solve_optimal_weights
from .votemath import brute_force_oec, oec_prefix, p_maj_egalitarian, p_maj_egalitarian_dp


@dataclass
class SuiteResult:
    name: str
    cases: int
    worst: float
    failures: int
    seconds: float

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name}: {self.cases} cases, worst |diff| {self.worst:.3g}, "
                f"{self.failures} failures, {self.seconds:.2f}s")


def enumeration_vs_dp(cases: int = 1000, max_n: int = 12, seed: int = 1, tol: float = 1e-12) -> SuiteResult:
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst, bad = 0.0, 0
    for _ in range(cases):
        p = rng.random(int(rng.integers(1, max_n + 1)))
        diff = abs(p_maj_egalitarian(p) - p_maj_egalitarian_dp(p))
        worst = max(worst, diff)
        bad += diff > tol
    return SuiteResult("enumeration == DP", cases, worst, bad, time.perf_counter() - start)


def prefix_vs_bruteforce(cases: int = 500, max_n: int = 10, seed: int = 2, tol: float = 1e-12) -> SuiteResult:
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst, bad = 0.0, 0
    for _ in range(cases):
        p = rng.random(int(rng.integers(1, max_n + 1)))
        a, b = oec_prefix(p), brute_force_oec(p)
        diff = abs(a.value - b.value)
        worst = max(worst, diff)
        bad += diff > tol or a.members != b.members
    return SuiteResult("top-K prefix == subset search", cases, worst, bad, time.perf_counter() - start)


def mip_vs_oracle(cases: int = 200, max_n: int = 4, seed: int = 3, tol: float = 1e-9) -> SuiteResult:
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst, bad = 0.0, 0
    for _ in range(cases):
        p = rng.random(int(rng.integers(1, max_n + 1)))
        a, b = solve_optimal_weights(p), enumerate_families_bruteforce(p)
        diff = abs(a.objective - b.objective)
        worst = max(worst, diff)
        bad += diff > tol or not np.array_equal(a.family, b.family)
    return SuiteResult("branch and bound == family enumeration", cases, worst, bad,
                       time.perf_counter() - start)


SUITES: List[Callable[[], SuiteResult]] = [enumeration_vs_dp, prefix_vs_bruteforce, mip_vs_oracle]


def run_all() -> List[SuiteResult]:
    return [suite() for suite in SUITES]
