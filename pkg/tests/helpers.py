import numpy as np

from omoe.estimation import EstimatorTable, interval_bounds


def pair_tables(p_hi: float, p_lo: float, rounds: int, trials: int, delta: float, seed: int):
    """Running estimator snapshots for two Bernoulli experts, shape (trials, rounds, 2)."""
    rng = np.random.default_rng(seed)
    draws = rng.random((trials, rounds, 2)) < np.array([p_hi, p_lo])
    succ = np.cumsum(draws, axis=1)
    t = np.broadcast_to(np.arange(1, rounds + 1)[None, :, None], succ.shape)
    return EstimatorTable(t, succ, np.full(2, 0.25), delta)


def separated(table: EstimatorTable) -> np.ndarray:
    """Expert 0 strictly above expert 1, elementwise over leading axes."""
    # clamping to [0, 1] never changes whether two intervals are disjoint
    lo, hi = interval_bounds(table)
    return hi[..., 1] < lo[..., 0]
