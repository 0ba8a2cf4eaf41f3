import json
from dataclasses import replace

import numpy as np
import pytest

from omoe.bandit import RegretTrace
from omoe.cli import main
from omoe.harness import (ConfigError, ExperimentConfig, config_from_preset, emit_csv, emit_summary,
                          load_config, optimum, run_experiment, summarize, trial_seed)
from omoe.experts import ExpertSpec
from omoe.presets import PRESETS, get_preset


def write(tmp_path, obj, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return path


def test_load_config_with_preset(tmp_path):
    cfg = load_config(write(tmp_path, {"preset": "SE1", "trials": 3}))
    assert cfg.algo == "see" and cfg.horizon == 10_000 and cfg.trials == 3
    assert cfg.baseline == "cucb"
    assert cfg.competencies().tolist() == [0.1, 0.65, 0.77, 0.79, 0.8]
    wv = load_config(write(tmp_path, {"preset": "WV1"}))
    assert wv.algo == "wmv" and wv.horizon == 2000 and wv.baseline == "zooming"


def test_load_config_explicit(tmp_path):
    trace = tmp_path / "a.txt"
    trace.write_text("1\n1\n0\n")
    cfg = load_config(write(tmp_path, {"algo": "see", "T": 3, "experts": [0.6, {"trace": "a.txt"}]}))
    assert cfg.n == 2 and cfg.experts[1].kind == "trace"


@pytest.mark.parametrize("raw, message", [
    ({"preset": "SE1", "trials": 0}, "trials"),
    ({"preset": "SE1", "horizon": 5}, "unknown config key 'horizon'"),
    ({"algo": "see", "T": 5}, "missing config key 'experts'"),
    ({"algo": "greedy", "T": 5, "experts": [0.5]}, "algo"),
    ({"algo": "see", "T": 5, "experts": [{"p": 0.5, "q": 1}]}, "unknown key 'q'"),
    ({"preset": "XX9"}, "preset"),
])
def test_load_config_errors(tmp_path, raw, message):
    with pytest.raises(ConfigError, match=message):
        load_config(write(tmp_path, raw))


def test_presets_are_paired():
    for pid, pre in PRESETS.items():
        assert pre.config_id == pid and all(0 <= p <= 1 for p in pre.p)
    assert get_preset("ws6").resolve_period == 10 and len(get_preset("WS6").p) == 9
    with pytest.raises(KeyError):
        get_preset("nope")


def test_preset_optima():
    # exact rational enumeration: P_maj of {0.8, 0.79, 0.77} is 0.88302
    value, size = optimum(config_from_preset("SE1"), "see")
    assert value == pytest.approx(0.88302, abs=1e-12) and size == 3
    value, size = optimum(config_from_preset("WV1"), "wmv")
    assert value == pytest.approx(0.881, abs=1e-12) and size == 3


def test_trial_seeds_differ():
    seeds = {trial_seed(0, k) for k in range(1000)}
    assert len(seeds) == 1000 and all(0 <= s < 2 ** 64 for s in seeds)


def _trace(inst, digest="0"):
    inst = np.asarray(inst, dtype=float)
    return RegretTrace(inst, [digest] * len(inst), np.ones(len(inst), dtype=bool))


def test_emit_csv(tmp_path):
    traces = [_trace([0.1, 0.2, 0.0]), _trace([0.0, 0.05, 0.3], "1-2")]
    path = emit_csv(traces, tmp_path / "r.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "trial,t,inst_regret,cum_regret,committee_digest"
    assert len(lines) == 7
    rows = [line.split(",") for line in lines[1:]]
    for k in range(2):
        mine = [r for r in rows if r[0] == str(k)]
        assert np.allclose(np.cumsum([float(r[2]) for r in mine]), [float(r[3]) for r in mine], atol=1e-12)
    assert rows[3][4] == "1-2"
    again = emit_csv(traces, tmp_path / "r2.csv")
    assert path.read_bytes() == again.read_bytes() and b"\r" not in path.read_bytes()


def _summary(config, inst):
    return summarize(config, config.algo, [_trace(inst)], 0.9, 1)


def test_emit_summary_reduction(tmp_path):
    cfg = ExperimentConfig("see", (ExpertSpec.bernoulli(0.6),), 3, trials=1)
    a, b = _summary(cfg, [0.1, 0.1, 0.1]), _summary(cfg, [0.1, 0.1, 0.1])
    rows = json.loads(emit_summary([a, b], tmp_path / "s.json", reference=b).read_text())["runs"]
    assert rows[0]["pct_R_reduction"] == 0.0 and "pct_R_reduction" not in rows[1]
    assert list(rows[0])[:7] == ["algorithm", "N", "committee_size", "p_star_maj", "gap", "R_T",
                                 "pct_R_reduction"]
    with pytest.warns(UserWarning, match="reduction field omitted"):
        rows = json.loads(emit_summary([a], tmp_path / "t.json").read_text())["runs"]
    assert "pct_R_reduction" not in rows[0]


def test_small_run_is_reproducible(tmp_path):
    cfg = config_from_preset("SE1", trials=2, horizon=300)
    main_a, base_a = run_experiment(cfg, tmp_path / "a")
    main_b, _ = run_experiment(cfg, tmp_path / "b")
    assert (tmp_path / "a" / "regret.csv").read_bytes() == (tmp_path / "b" / "regret.csv").read_bytes()
    assert main_a.r_t == main_b.r_t and base_a.config_id == "SC1"
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == ["curve.csv", "curve_cucb.csv", "metadata.json", "regret.csv", "regret_cucb.csv",
                     "summary.json"]
    meta = json.loads((tmp_path / "a" / "metadata.json").read_text())
    assert meta["trial_seeds"] == [trial_seed(0, 0), trial_seed(0, 1)]
    assert meta["runs"][0]["R_T_mean"] == main_a.r_t


def test_workers_do_not_change_results():
    cfg = config_from_preset("WV1", trials=2, horizon=200, baseline=None)
    serial, _ = run_experiment(cfg)
    parallel, _ = run_experiment(replace(cfg, workers=2))
    assert np.array_equal(serial.curve_mean, parallel.curve_mean)


def test_remote_needs_permission(tmp_path):
    cfg = load_config(write(tmp_path, {"algo": "see", "T": 2, "experts": [
        {"remote": {"url": "http://127.0.0.1:9", "model": "m"}}]}))
    with pytest.raises(PermissionError):
        run_experiment(cfg)


def test_cli_solve(capsys):
    assert main(["solve", "--p", "0.332,0.775,0.881"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["oec"]["members"] == [2]
    assert out["weights"]["objective"] == pytest.approx(0.881)


def test_cli_run(tmp_path, capsys):
    code = main(["run", "--preset", "SE1", "--trials", "1", "--T", "200", "--baseline", "none",
                 "--out", str(tmp_path / "o")])
    assert code == 0
    assert (tmp_path / "o" / "regret.csv").exists()
    assert json.loads(capsys.readouterr().out.splitlines()[0])["config_id"] == "SE1"


def test_cli_errors(tmp_path, capsys):
    assert main(["run"]) == 2
    assert main(["run", "--preset", "ZZ1"]) == 2
    bad = write(tmp_path, {"preset": "SE1", "trials": 0})
    assert main(["run", "--config", str(bad)]) == 2
    assert "trials" in capsys.readouterr().err


def test_cli_verify(capsys):
    assert main(["verify"]) == 0
    assert capsys.readouterr().out.count("PASS") == 3
