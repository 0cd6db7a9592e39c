"""Experiment orchestration: configuration, sweeps over beta, statistics and file output."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats

from .energy import ModelParams
from .hexlattice import SpinConfiguration, build_topology
from .metropolis import EnsembleSummary, HittingRecord, empirical_t_beta, replica_ensemble
from .polyiamond import Polyiamond, edge_perimeter, gap_attachments, longest_sides, rhombus_attachments
from .refpath import FlipPath
from .theory import gate_cardinalities, gate_hexagon
from .trigrid import transform

TIMEOUT_FLAG_FRACTION = 0.10


class TorusTooSmallError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    J: float = 3.8
    h: float = 1.0
    L: int = 12
    beta_grid: list = field(default_factory=lambda: [0.40, 0.45, 0.50, 0.55])
    replicas: int = 200
    seed: int = 20240601
    out_dir: str | None = None
    gate_detect: bool = True
    landscape: bool = False
    max_steps: int | None = None
    parallelism: int = 1
    dust: int = 0
    slope_tolerance: float = 0.15
    ks_max: float = 0.10
    gate_min: float = 0.9

    def __post_init__(self):
        self.beta_grid = [float(b) for b in self.beta_grid]
        if not self.beta_grid:
            raise ValueError("beta_grid is empty")
        if any(b2 <= b1 for b1, b2 in zip(self.beta_grid, self.beta_grid[1:])):
            raise ValueError("beta_grid must be strictly increasing")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        ModelParams(self.J, self.h, self.beta_grid[0])

    @classmethod
    def from_dict(cls, d: dict, **overrides) -> "ExperimentConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        merged = dict(d)
        merged.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**merged)

    @classmethod
    def from_json(cls, path: str | Path, **overrides) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()), **overrides)

    def params(self, beta: float) -> ModelParams:
        return ModelParams(self.J, self.h, beta)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class BetaResult:
    beta: float
    summary: EnsembleSummary
    records: list[HittingRecord]
    timeout_flagged: bool


@dataclass
class SweepResult:
    config: ExperimentConfig
    per_beta: list[BetaResult]
    slope: float | None
    intercept: float | None
    slope_stderr: float | None
    slope_ci: tuple[float, float] | None
    warnings: list[str]

    def summary_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "per_beta": [
                {"beta": b.beta, "timeout_flagged": b.timeout_flagged, **b.summary.as_dict()} for b in self.per_beta
            ],
            "slope": self.slope,
            "intercept": self.intercept,
            "slope_stderr": self.slope_stderr,
            "slope_ci": list(self.slope_ci) if self.slope_ci else None,
            "warnings": self.warnings,
        }


def fit_log_slope(betas: Sequence[float], means: Sequence[float]):
    """OLS of ln(mean) on beta: (slope, intercept, stderr, 95% CI) or Nones for one point."""
    b = np.asarray(betas, dtype=float)
    y = np.log(np.asarray(means, dtype=float))
    if len(b) < 2:
        return None, None, None, None
    if len(b) == 2:
        s = (y[1] - y[0]) / (b[1] - b[0])
        return float(s), float(y[0] - s * b[0]), 0.0, (float(s), float(s))
    fit = stats.linregress(b, y)
    q = stats.t.ppf(0.975, len(b) - 2)
    return float(fit.slope), float(fit.intercept), float(fit.stderr), (
        float(fit.slope - q * fit.stderr),
        float(fit.slope + q * fit.stderr),
    )


def run_sweep(config: ExperimentConfig, progress=None) -> SweepResult:
    topo = build_topology(config.L)
    per = []
    warnings = []
    for i, beta in enumerate(config.beta_grid):
        res = replica_ensemble(
            config.params(beta),
            topo,
            config.replicas,
            base_seed=config.seed + i,
            parallelism=config.parallelism,
            max_steps=config.max_steps,
            gate_detect=config.gate_detect,
            dust=config.dust,
        )
        s = res.summary
        flagged = s.n_timeout > TIMEOUT_FLAG_FRACTION * s.n
        if flagged:
            warnings.append(f"beta={beta}: {s.n_timeout}/{s.n} runs timed out; slope biased low")
        per.append(BetaResult(beta, s, res.records, flagged))
        if progress:
            progress(beta, s)
    ok = [b for b in per if b.summary.n_completed > 0]
    slope, icpt, se, ci = fit_log_slope([b.beta for b in ok], [b.summary.mean_tau for b in ok])
    result = SweepResult(config, per, slope, icpt, se, ci, warnings)
    if config.out_dir:
        write_sweep(result, config.out_dir)
    return result


@dataclass(frozen=True)
class KSResult:
    ks: float
    pvalue: float
    n: int
    mean_over_t_beta: float
    degenerate: bool


def exponential_law_test(samples, beta: float | None = None, min_samples: int = 100) -> KSResult:
    """KS distance of tau/mean(tau) against the unit exponential.

    ``samples`` is a list of HittingRecord or a sequence of hitting times;
    timed-out records are dropped.
    """
    if len(samples) and isinstance(samples[0], HittingRecord):
        taus = [r.tau for r in samples if r.tau is not None]
    else:
        taus = list(samples)
    x = np.asarray(taus, dtype=float)
    if len(x) < min_samples:
        raise ValueError(f"need at least {min_samples} completed samples, got {len(x)}")
    mean = x.mean()
    res = stats.kstest(x / mean, "expon")
    degenerate = bool(np.all(x == x[0]))
    return KSResult(float(res.statistic), float(res.pvalue), len(x), float(mean / empirical_t_beta(x)), degenerate)


# --- gate enumeration ----------------------------------------------------------------

@dataclass(frozen=True)
class GateCount:
    count_S: int
    count_D: int
    expected_S: int
    expected_D: int

    @property
    def matches(self) -> bool:
        return self.count_S == self.expected_S and self.count_D == self.expected_D


def gate_count_enumeration(params: ModelParams, L: int) -> GateCount:
    """Count distinct torus configurations of the two critical droplet types.

    Placements: the 12 lattice isometries of the gate hexagon, every longest
    side, every admissible position of the two extra faces, every
    translation.  Configurations are deduplicated as plus-site sets.
    """
    topo = build_topology(L)
    H = gate_hexagon(params)
    shapes_S, shapes_D = [], []
    for k in range(12):
        Hk = Polyiamond.of(transform(H.faces, k))
        for n in longest_sides(Hk):
            shapes_S.extend(rhombus_attachments(Hk, n))
            shapes_D.extend(gap_attachments(Hk, n))

    def place(shapes):
        seen = set()
        for P in shapes:
            faces = sorted(P.faces)
            p = edge_perimeter(P)
            for dy in range(L):
                for dx in range(L):
                    sites = frozenset(topo.site_of_face((x + dx, y + dy, o)) for x, y, o in faces)
                    if len(sites) != len(faces):
                        raise TorusTooSmallError(f"L={L} cannot hold the gate droplet")
                    seen.add(sites)
            cfg = SpinConfiguration.from_plus_sites(topo, sites)
            if cfg.contour_length != p:
                raise TorusTooSmallError(f"L={L}: the gate droplet touches its periodic image")
        return len(seen)

    exp_S, exp_D = gate_cardinalities(params, L)
    return GateCount(place(shapes_S), place(shapes_D), exp_S, exp_D)


# --- file output ------------------------------------------------------------------

RECORD_COLUMNS = (
    "replica",
    "seed",
    "tau",
    "gate_visited",
    "gate_visited_last",
    "gate_shape",
    "crossings",
    "max_n_gamma",
    "max_n_plus",
    "wall_steps",
)


def write_records_csv(records: Sequence[HittingRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_COLUMNS)
        for i, r in enumerate(records):
            w.writerow(
                [
                    i,
                    r.seed,
                    "" if r.tau is None else r.tau,
                    int(r.gate_visited),
                    int(r.gate_visited_last),
                    r.gate_shape or "",
                    r.crossings,
                    r.max_level_reached.n_gamma,
                    r.max_level_reached.n_plus,
                    r.wall_steps,
                ]
            )


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True)


def write_json(obj, path: str | Path) -> None:
    Path(path).write_text(json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n")


def write_sweep(result: SweepResult, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for b in result.per_beta:
        write_records_csv(b.records, out / f"records_beta_{b.beta:.4f}.csv")
    write_json(result.summary_dict(), out / "sweep.json")


def write_profile_csv(path_obj: FlipPath, params: ModelParams, path: str | Path) -> None:
    e = path_obj.realized(params)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("step", "area", "n_gamma", "n_plus", "energy"))
        for i in range(len(path_obj) + 1):
            w.writerow((i, int(path_obj.n_plus[i]), int(path_obj.n_gamma[i]), int(path_obj.n_plus[i]), repr(float(e[i]))))
