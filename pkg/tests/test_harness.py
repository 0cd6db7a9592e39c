import json
import math

import numpy as np
import pytest

from hexmeta.energy import ModelParams
from hexmeta.harness import (
    ExperimentConfig,
    TorusTooSmallError,
    dumps,
    exponential_law_test,
    fit_log_slope,
    gate_count_enumeration,
    run_sweep,
    write_profile_csv,
    write_records_csv,
)
from hexmeta.metropolis import replica_ensemble
from hexmeta.hexlattice import build_topology
from hexmeta.refpath import build_reference_path


def test_fit_log_slope_synthetic():
    betas = [0.4, 0.45, 0.5, 0.55]
    gamma, c = 28.4, 0.1
    means = [c * math.exp(b * gamma) for b in betas]
    slope, icpt, se, ci = fit_log_slope(betas, means)
    assert slope == pytest.approx(gamma, rel=1e-12)
    assert icpt == pytest.approx(math.log(c), abs=1e-10)
    assert se == pytest.approx(0.0, abs=1e-9) and ci[0] <= slope <= ci[1]
    assert fit_log_slope([0.5], [10.0]) == (None, None, None, None)
    s2 = fit_log_slope([0.4, 0.5], means[0:3:2])[0]
    assert s2 == pytest.approx(gamma, rel=1e-12)


def test_fit_log_slope_noisy_ci_covers():
    rng = np.random.default_rng(1)
    betas = np.linspace(0.4, 0.6, 6)
    means = np.exp(20 * betas + rng.normal(0, 0.05, 6))
    slope, _, se, ci = fit_log_slope(betas, means)
    assert se > 0 and ci[0] < 20 < ci[1]


def test_config_validation_and_overrides(tmp_path):
    cfg = ExperimentConfig()
    assert cfg.beta_grid == [0.40, 0.45, 0.50, 0.55] and cfg.replicas == 200
    for bad in [dict(beta_grid=[]), dict(beta_grid=[0.5, 0.4]), dict(replicas=0), dict(J=-1)]:
        with pytest.raises(ValueError):
            ExperimentConfig(**bad)
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"nope": 1})
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"J": 2.0, "L": 4, "replicas": 5}))
    cfg = ExperimentConfig.from_json(p, L=6, replicas=None)
    assert (cfg.J, cfg.L, cfg.replicas) == (2.0, 6, 5)
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg


def _tiny(tmp_path=None, **kw):
    base = dict(J=1.0, h=0.5, L=3, beta_grid=[0.8, 1.0, 1.2], replicas=8, seed=5, gate_detect=False)
    base.update(kw)
    if tmp_path is not None:
        base["out_dir"] = str(tmp_path)
    return ExperimentConfig(**base)


def test_sweep_single_beta():
    res = run_sweep(_tiny(beta_grid=[1.0]))
    assert res.slope is None and len(res.per_beta) == 1


def test_sweep_reproducible_bytes(tmp_path):
    a = tmp_path / "a"
    ra = run_sweep(_tiny(a))
    files = sorted(p.name for p in a.iterdir())
    first = {name: (a / name).read_bytes() for name in files}
    assert "sweep.json" in files and len(files) == 4
    rb = run_sweep(_tiny(a))
    for name in files:
        assert (a / name).read_bytes() == first[name]
    assert ra.slope == rb.slope
    # beta index i uses base seed seed + i
    direct = replica_ensemble(ModelParams(1.0, 0.5, 1.0), build_topology(3), 8, base_seed=6, gate_detect=False)
    assert [r.tau for r in ra.per_beta[1].records] == [r.tau for r in direct.records]


def test_sweep_timeout_flag():
    res = run_sweep(_tiny(J=3.8, h=1.0, L=4, beta_grid=[1.5, 2.0], replicas=4, max_steps=200))
    assert all(b.timeout_flagged for b in res.per_beta)
    assert res.warnings and res.slope is None


def test_ks_self_test():
    rng = np.random.default_rng(0)
    for n in (400, 4000):
        r = exponential_law_test(rng.exponential(7.0, n))
        assert r.ks < 2.0 / math.sqrt(n) and not r.degenerate
        assert 0.8 < r.mean_over_t_beta < 1.2


def test_ks_detects_wrong_law():
    rng = np.random.default_rng(0)
    r = exponential_law_test(rng.uniform(0, 1, 1000))
    assert r.ks > 0.1


def test_ks_degenerate_and_small():
    r = exponential_law_test([5.0] * 200)
    assert r.degenerate
    # all mass at one point: largest gap to the exponential CDF is at 1
    assert r.ks == pytest.approx(1 - math.exp(-1))
    with pytest.raises(ValueError):
        exponential_law_test([1.0, 2.0, 3.0])


def test_gate_count_enumeration():
    gc = gate_count_enumeration(ModelParams(3.8, 1.0), 12)
    assert (gc.count_S, gc.count_D) == (3456, 1728) and gc.matches
    gc = gate_count_enumeration(ModelParams(4.4, 1.0), 8)
    assert (gc.count_S, gc.count_D) == (12 * 2 * 128, 6 * 2 * 128) and gc.matches
    with pytest.raises(TorusTooSmallError):
        gate_count_enumeration(ModelParams(3.8, 1.0), 3)


def test_writers_deterministic(tmp_path):
    p = ModelParams(1.0, 0.5, 1.0)
    recs = replica_ensemble(p, build_topology(2), 5, base_seed=1).records
    write_records_csv(recs, tmp_path / "a.csv")
    write_records_csv(recs, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    lines = (tmp_path / "a.csv").read_text().splitlines()
    assert lines[0].startswith("replica,seed,tau") and len(lines) == 6
    path = build_reference_path(ModelParams(3.8, 1.0))
    write_profile_csv(path, ModelParams(3.8, 1.0), tmp_path / "prof.csv")
    rows = (tmp_path / "prof.csv").read_text().splitlines()
    assert len(rows) == len(path) + 2 and rows[22].split(",")[1] == "21"


def test_dumps_handles_special_values():
    s = dumps({"b": math.inf, "a": math.nan, "c": np.float64(1.5), "d": (1, 2)})
    assert json.loads(s) == {"a": None, "b": "inf", "c": 1.5, "d": [1, 2]}
    assert s.index('"a"') < s.index('"b"')
