"""Seeded multi-trial experiments, regret aggregation and file output."""

from __future__ import annotations

import json
import logging
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import __version__
from .bandit import (CucbLearner, RegretTrace, SeeLearner, TargetedLearner, WmvLearner,
                     ZoomingLearner, digest, play_value, realized_correct, zooming_arms)
from .experts import ExpertSpec, TaskContext, load_trace, sample_outcomes
from .mip import DEFAULT_WEDGE, EXACT_LIMIT, solve_optimal_weights
from .presets import get_preset
from .remote import RemoteEndpoint
from .votemath import min_gap, oec_prefix

log = logging.getLogger(__name__)

ALGOS = ("see", "wmv", "cucb", "zooming")
WEIGHTED = ("wmv", "zooming")
FINAL_FRACTION = 0.1
MASK64 = (1 << 64) - 1
GOLDEN64 = 0x9E3779B97F4A7C15
MIXER = "splitmix64(master + (trial + 1) * 0x9E3779B97F4A7C15)"

CONFIG_KEYS = {
    "preset", "config_id", "algo", "experts", "T", "trials", "seed", "quota", "delta_mode",
    "targeted_m", "t0", "resolve_period", "variance", "out", "baseline", "domain", "workers",
    "eps_wedge", "tasks",
}
EXPERT_KEYS = {"p", "trace", "remote", "name"}
REMOTE_KEYS = {"url", "model", "token", "text_path", "timeout", "retries"}


class ConfigError(ValueError):
    pass


class TrialError(RuntimeError):
    pass


def splitmix64(x: int) -> int:
    z = x & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def trial_seed(master: int, trial: int) -> int:
    return splitmix64(master + (trial + 1) * GOLDEN64)


@dataclass(frozen=True)
class ExperimentConfig:
    algo: str
    experts: Tuple[ExpertSpec, ...]
    horizon: int
    trials: int = 100
    seed: int = 0
    quota: Optional[float] = None
    delta_mode: str = "fixed"
    targeted_m: Optional[int] = None
    t0: int = 100
    resolve_period: int = 1
    variance: float = 0.25
    out: Optional[str] = None
    baseline: Optional[str] = None
    domain: str = "Bernoulli"
    config_id: str = "custom"
    replay: bool = False
    workers: int = 1
    eps_wedge: float = DEFAULT_WEDGE
    tasks: Optional[str] = None

    def __post_init__(self):
        if self.algo not in ALGOS:
            raise ConfigError(f"algo: expected one of {ALGOS}, got {self.algo!r}")
        if self.baseline is not None and self.baseline not in ALGOS:
            raise ConfigError(f"baseline: expected one of {ALGOS}, got {self.baseline!r}")
        if not self.experts:
            raise ConfigError("experts: at least one expert required")
        if self.horizon < 1:
            raise ConfigError("T: horizon must be >= 1")
        if self.trials < 1:
            raise ConfigError("trials: must be >= 1")
        if not 0 <= self.seed <= MASK64:
            raise ConfigError("seed: must be an unsigned 64-bit integer")
        if self.delta_mode not in ("fixed", "anytime"):
            raise ConfigError("delta_mode: expected 'fixed' or 'anytime'")
        if self.targeted_m is not None and self.targeted_m < 1:
            raise ConfigError("targeted_m: must be >= 1")
        if self.resolve_period < 1:
            raise ConfigError("resolve_period: must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers: must be >= 1")

    @property
    def n(self) -> int:
        return len(self.experts)

    @property
    def has_remote(self) -> bool:
        return any(e.kind == "remote" for e in self.experts)

    def competencies(self) -> Optional[np.ndarray]:
        """True competencies when every expert has one (remote experts do not)."""
        if self.has_remote:
            return None
        return np.array([e.competency for e in self.experts])


def config_from_preset(name: str, **overrides) -> ExperimentConfig:
    pre = get_preset(name)
    names = pre.names or ("",) * len(pre.p)
    base = dict(algo=pre.algo, experts=tuple(ExpertSpec.bernoulli(p, n) for p, n in zip(pre.p, names)),
                horizon=pre.horizon, baseline=pre.baseline, domain=pre.domain,
                config_id=pre.config_id, replay=pre.replay, resolve_period=pre.resolve_period)
    base.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**base)


def _parse_expert(raw, base: Path, index: int) -> ExpertSpec:
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return ExpertSpec.bernoulli(float(raw))
    if not isinstance(raw, dict):
        raise ConfigError(f"experts[{index}]: expected a number or an object")
    unknown = set(raw) - EXPERT_KEYS
    if unknown:
        raise ConfigError(f"experts[{index}]: unknown key {sorted(unknown)[0]!r}")
    name = raw.get("name", "")
    kinds = [k for k in ("p", "trace", "remote") if k in raw]
    if len(kinds) != 1:
        raise ConfigError(f"experts[{index}]: give exactly one of 'p', 'trace', 'remote'")
    if "p" in raw:
        return ExpertSpec.bernoulli(float(raw["p"]), name)
    if "trace" in raw:
        return load_trace(base / raw["trace"], name)
    remote = raw["remote"]
    unknown = set(remote) - REMOTE_KEYS
    if unknown:
        raise ConfigError(f"experts[{index}].remote: unknown key {sorted(unknown)[0]!r}")
    url = remote.get("url") or os.environ.get("REMOTE_EXPERT_URL")
    if not url:
        raise ConfigError(f"experts[{index}].remote: no url and REMOTE_EXPERT_URL unset")
    token = remote.get("token") or os.environ.get("REMOTE_EXPERT_TOKEN")
    fields = {k: v for k, v in remote.items() if k not in ("url", "token")}
    return ExpertSpec.remote(RemoteEndpoint(url=url, token=token, **fields), name)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read a JSON experiment file; a ``preset`` key supplies defaults the other keys override."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    unknown = set(raw) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config key {sorted(unknown)[0]!r}")
    kw = {}
    for key, target in (("algo", "algo"), ("T", "horizon"), ("trials", "trials"), ("seed", "seed"),
                        ("quota", "quota"), ("delta_mode", "delta_mode"), ("targeted_m", "targeted_m"),
                        ("t0", "t0"), ("resolve_period", "resolve_period"), ("variance", "variance"),
                        ("out", "out"), ("baseline", "baseline"), ("domain", "domain"),
                        ("workers", "workers"), ("eps_wedge", "eps_wedge"), ("config_id", "config_id")):
        if key in raw:
            kw[target] = raw[key]
    if "tasks" in raw:
        kw["tasks"] = str(path.parent / raw["tasks"])
    if "experts" in raw:
        if not isinstance(raw["experts"], list):
            raise ConfigError("experts: expected a list")
        kw["experts"] = tuple(_parse_expert(e, path.parent, i) for i, e in enumerate(raw["experts"]))
    for key in ("T", "trials", "seed", "targeted_m", "t0", "resolve_period", "workers"):
        if key in raw and raw[key] is not None and not isinstance(raw[key], int):
            raise ConfigError(f"{key}: expected an integer")
    if "preset" in raw:
        try:
            return config_from_preset(raw["preset"], **kw)
        except KeyError as exc:
            raise ConfigError(f"preset: {exc.args[0]}") from None
    missing = {"algo", "experts", "horizon"} - set(kw)
    if missing:
        raise ConfigError(f"missing config key {sorted(missing)[0]!r}")
    try:
        return ExperimentConfig(**kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_tasks(path: Union[str, Path]) -> List[TaskContext]:
    tasks = []
    for line in Path(path).read_text().splitlines():
        if line.strip():
            row = json.loads(line)
            choices = tuple(row["choices"]) if row.get("choices") else None
            tasks.append(TaskContext(row["question"], str(row["truth"]), row.get("domain", "gsm8k"), choices))
    if not tasks:
        raise ConfigError(f"{path}: no tasks")
    return tasks


def optimum(config: ExperimentConfig, algo: str) -> Tuple[float, int]:
    """Optimal expected accuracy and committee size for the algorithm's problem class.

    Weighted committees count every expert as a member.
    """
    p = config.competencies()
    if p is None:
        return math.nan, config.n
    if algo in WEIGHTED:
        if config.n > EXACT_LIMIT:
            raise ConfigError(f"weighted optimum needs at most {EXACT_LIMIT} experts")
        q = config.quota if config.quota is not None else config.n / 2
        return solve_optimal_weights(p, q).objective, config.n
    best = oec_prefix(p)
    return best.value, best.size


def _zooming_lattice(config: ExperimentConfig) -> np.ndarray:
    q = config.quota if config.quota is not None else config.n / 2
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0x5A00]))
    return zooming_arms(config.n, q, rng)


def make_learner(config: ExperimentConfig, algo: str, lattice: Optional[np.ndarray] = None):
    n, T = config.n, config.horizon
    if algo == "see":
        if config.targeted_m is not None:
            return TargetedLearner(n, config.targeted_m, config.t0, T, config.delta_mode, config.variance)
        return SeeLearner(n, T, config.delta_mode, config.variance)
    if algo == "wmv":
        return WmvLearner(n, T, config.quota, config.delta_mode, config.variance,
                          config.resolve_period, config.eps_wedge)
    if algo == "cucb":
        return CucbLearner(n, T)
    return ZoomingLearner(n, T, config.quota, arms=lattice if lattice is not None else _zooming_lattice(config))


def _outcomes(config: ExperimentConfig, rng: np.random.Generator,
              tasks: Optional[List[TaskContext]]) -> np.ndarray:
    T, experts = config.horizon, config.experts
    if all(e.kind == "bernoulli" for e in experts):
        # one uniform per expert per round, same stream as per-round sampling
        return rng.random((T, len(experts))) < np.array([e.p for e in experts])
    out = np.zeros((T, len(experts)), dtype=bool)
    for t in range(T):
        ctx = tasks[t % len(tasks)] if tasks else None
        out[t] = sample_outcomes(experts, rng, t, ctx)
    return out


def run_trial(config: ExperimentConfig, algo: str, trial: int, opt: float,
              lattice: Optional[np.ndarray] = None, tasks: Optional[List[TaskContext]] = None
              ) -> RegretTrace:
    """One seeded trial; every algorithm sees the same outcome matrix for a given trial."""
    try:
        outcome_ss, tie_ss = np.random.SeedSequence(trial_seed(config.seed, trial)).spawn(2)
        correct = _outcomes(config, np.random.default_rng(outcome_ss), tasks)
        tie_rng = np.random.default_rng(tie_ss)
        p = config.competencies()
        learner = make_learner(config, algo, lattice)
        T = config.horizon
        inst = np.empty(T)
        realized = np.empty(T, dtype=bool)
        digests: List[str] = []
        values: Dict[str, float] = {}
        for t in range(1, T + 1):
            played = learner.select(t)
            key = digest(played)
            if key not in values:
                values[key] = math.nan if p is None else play_value(p, played)
            inst[t - 1] = opt - values[key]
            digests.append(key)
            row = correct[t - 1]
            realized[t - 1] = realized_correct(played, row, tie_rng)
            learner.observe(t, row, realized[t - 1])
        return RegretTrace(inst, digests, realized)
    except Exception as exc:
        raise TrialError(f"trial {trial} ({algo}): {exc}") from exc


def _run_one(args):
    return run_trial(*args)


@dataclass
class RunSummary:
    config_id: str
    algorithm: str
    n: int
    committee_size: int
    p_star_maj: float
    gap: float
    r_t: float
    r_t_stderr: float
    p_hat_maj: float
    domain: str
    curve_mean: np.ndarray
    curve_stderr: np.ndarray
    traces: List[RegretTrace] = field(repr=False, default_factory=list)
    pct_r_reduction: Optional[float] = None  # set when a baseline ran alongside

    @property
    def final_plays(self) -> List[str]:
        return [tr.digests[-1] for tr in self.traces]

    def table_row(self, pct: Optional[float] = None) -> dict:
        row = {"algorithm": self.algorithm, "N": self.n, "committee_size": self.committee_size,
               "p_star_maj": self.p_star_maj, "gap": self.gap, "R_T": self.r_t}
        if pct is not None:
            row["pct_R_reduction"] = pct
        row.update({"p_hat_maj": self.p_hat_maj, "domain": self.domain, "config_id": self.config_id})
        return row


def summarize(config: ExperimentConfig, algo: str, traces: List[RegretTrace], opt: float,
              size: int, config_id: Optional[str] = None) -> RunSummary:
    cum = np.vstack([tr.cumulative for tr in traces])
    k = len(traces)
    stderr = cum.std(axis=0, ddof=1) / math.sqrt(k) if k > 1 else np.zeros(cum.shape[1])
    tail = max(1, int(math.ceil(FINAL_FRACTION * config.horizon)))
    p_hat = float(np.mean([tr.realized[-tail:].mean() for tr in traces]))
    p = config.competencies()
    return RunSummary(
        config_id=config_id or config.config_id, algorithm=algo, n=config.n, committee_size=size,
        p_star_maj=float(opt), gap=min_gap(p) if p is not None else math.nan,
        r_t=float(cum[:, -1].mean()), r_t_stderr=float(stderr[-1]), p_hat_maj=p_hat,
        domain=config.domain, curve_mean=cum.mean(axis=0), curve_stderr=stderr, traces=traces)


def run_algorithm(config: ExperimentConfig, algo: str, allow_network: bool = False,
                  config_id: Optional[str] = None) -> RunSummary:
    tasks = None
    if config.has_remote:
        if not allow_network:
            raise PermissionError("config uses remote experts; pass --allow-network to enable them")
        if not config.tasks:
            raise ConfigError("remote experts need a 'tasks' JSONL file")
        tasks = load_tasks(config.tasks)
    opt, size = optimum(config, algo)
    lattice = _zooming_lattice(config) if algo == "zooming" else None
    jobs = [(config, algo, k, opt, lattice, tasks) for k in range(config.trials)]
    if config.workers > 1 and config.trials > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            traces = list(pool.map(_run_one, jobs))  # map keeps trial order
    else:
        traces = [_run_one(j) for j in jobs]
    return summarize(config, algo, traces, opt, size, config_id)


_PAIR_IDS = {"SE": "SC", "WV": "WZ", "WS": "WE", "WG": "ZG", "CS": "CC", "WB": "ZB"}


def baseline_id(config: ExperimentConfig) -> str:
    """Id of the baseline row: the preset's partner id, else ``<id>-<baseline>``."""
    prefix = _PAIR_IDS.get(config.config_id[:2])
    if prefix and config.config_id[2:].isdigit():
        return prefix + config.config_id[2:]
    return f"{config.config_id}-{config.baseline}"


def run_experiment(config: ExperimentConfig, out_dir: Optional[Union[str, Path]] = None,
                   allow_network: bool = False) -> Tuple[RunSummary, Optional[RunSummary]]:
    """Run the configured algorithm and, when set, its baseline on the same outcome streams.

    Artifacts are written when ``out_dir`` (or ``config.out``) is given.
    """
    main = run_algorithm(config, config.algo, allow_network)
    base = None
    if config.baseline:
        base = run_algorithm(config, config.baseline, allow_network, baseline_id(config))
        main.pct_r_reduction = pct_reduction(main.r_t, base.r_t)
    target = out_dir or config.out
    if target is not None:
        write_outputs(config, main, base, Path(target))
    return main, base


def pct_reduction(r_t: float, r_t_baseline: float) -> Optional[float]:
    if not r_t_baseline:
        return None
    return 1.0 - r_t / r_t_baseline


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_csv(traces: Sequence[RegretTrace], path: Union[str, Path]) -> Path:
    """Per-round regret of every trial; floats in shortest round-trip form, LF endings."""
    path = Path(path)
    lines = ["trial,t,inst_regret,cum_regret,committee_digest"]
    for k, tr in enumerate(traces):
        cum = tr.cumulative
        for t, (r, c, d) in enumerate(zip(tr.inst.tolist(), cum.tolist(), tr.digests), 1):
            lines.append(f"{k},{t},{r!r},{c!r},{d}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def emit_curve(summary: RunSummary, path: Union[str, Path]) -> Path:
    path = Path(path)
    lines = ["t,mean_cum_regret,stderr_cum_regret"]
    for t, (m, s) in enumerate(zip(summary.curve_mean.tolist(), summary.curve_stderr.tolist()), 1):
        lines.append(f"{t},{m!r},{s!r}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def emit_summary(summaries: Sequence[RunSummary], path: Union[str, Path],
                 reference: Optional[RunSummary] = None) -> Path:
    """Table rows as JSON.  The reduction field needs a ``reference`` run; the
    reference's own row never carries one."""
    if not summaries:
        raise ValueError("no summaries to emit")
    rows = []
    for s in summaries:
        if reference is not None and s is not reference:
            rows.append(s.table_row(pct_reduction(s.r_t, reference.r_t)))
            continue
        if reference is None:
            warnings.warn(f"{s.config_id}: no baseline run, reduction field omitted", stacklevel=2)
        rows.append(s.table_row())
    Path(path).write_text(json.dumps({"runs": rows}, indent=2) + "\n")
    return Path(path)


def _config_record(config: ExperimentConfig) -> dict:
    rec = asdict(config)
    rec["experts"] = [{"kind": e.kind, "name": e.name,
                       **({"p": e.p} if e.kind == "bernoulli" else {}),
                       **({"rounds": len(e.trace)} if e.kind == "trace" else {}),
                       **({"url": e.endpoint.url, "model": e.endpoint.model} if e.kind == "remote" else {})}
                      for e in config.experts]
    return rec


def metadata(config: ExperimentConfig, runs: Sequence[RunSummary]) -> dict:
    return {
        "package_version": __version__,
        "numpy_version": np.__version__,
        "seed_mixer": MIXER,
        "master_seed": config.seed,
        "trial_seeds": [trial_seed(config.seed, k) for k in range(config.trials)],
        "replay": config.replay,
        "stderr_label": "standard error of the mean over trials",
        "p_hat_window": f"final {FINAL_FRACTION:.0%} of rounds",
        "config": _config_record(config),
        "runs": [{"config_id": r.config_id, "algorithm": r.algorithm, "R_T_mean": r.r_t,
                  "R_T_stderr": r.r_t_stderr} for r in runs],
    }


def write_outputs(config: ExperimentConfig, main: RunSummary, base: Optional[RunSummary],
                  out: Path) -> Dict[str, Path]:
    out.mkdir(parents=True, exist_ok=True)
    files = {"regret": emit_csv(main.traces, out / "regret.csv"),
             "curve": emit_curve(main, out / "curve.csv")}
    runs = [main]
    if base is not None:
        files["regret_baseline"] = emit_csv(base.traces, out / f"regret_{base.algorithm}.csv")
        files["curve_baseline"] = emit_curve(base, out / f"curve_{base.algorithm}.csv")
        runs.append(base)
        files["summary"] = emit_summary(runs, out / "summary.json", reference=base)
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            files["summary"] = emit_summary(runs, out / "summary.json")
        log.warning("no baseline configured; pct_R_reduction omitted")
    meta = out / "metadata.json"
    meta.write_text(json.dumps(metadata(config, runs), indent=2, default=str) + "\n")
    files["metadata"] = meta
    return files
