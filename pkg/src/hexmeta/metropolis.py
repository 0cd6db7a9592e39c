"""Metropolis dynamics and hitting-time runs.

Random stream: every step consumes exactly two doubles from a
``numpy.random.Generator(PCG64(seed))``.  The first picks the site as
``int(u * 2L^2)``, the second accepts the flip iff ``u < min(1, exp(-beta dH))``.
The compiled kernel and the pure-Python ``step`` use the same stream, so a
seed fixes the trajectory bit for bit.

Replica ``i`` of an ensemble with base seed ``s`` uses the 64-bit seed
``SeedSequence(s).spawn(n)[i].generate_state(1, uint64)[0]``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np

from .energy import EnergyLevel, ModelParams, flip_delta
from .hexlattice import PLUS_STRIP, TORUS_SPANNING, LatticeTopology, SpinConfiguration, build_topology, clusters
from .polyiamond import canonical_tuple
from .theory import critical_gate_shapes, theory_values

MAX_STEPS_CAP = 2 ** 48
DEBUG_CHUNK = 2 ** 20

ABSORBED, TRIGGER, EXHAUSTED = 0, 1, 2


def acceptance_table(params: ModelParams) -> np.ndarray:
    """acc[spin_index, a] with spin_index 0 for minus, 1 for plus and a plus neighbours."""
    acc = np.empty((2, 4))
    for a in range(4):
        for si, spin in ((0, -1), (1, 1)):
            dH = flip_delta(spin, a).realize(params)
            acc[si, a] = 1.0 if dH <= 0 else math.exp(-params.beta * dH)
    return acc


@numba.njit(cache=True)
def _run(spins, nbr, acc, rng, state, max_steps, trigger, trigger_hi, J, h):
    # state: [t, plus, gamma, best_gamma, best_plus]
    n = spins.shape[0]
    t = state[0]
    plus = state[1]
    gamma = state[2]
    bg = state[3]
    bp = state[4]
    best = J * bg - h * bp
    code = 2
    while t < max_steps:
        t += 1
        s = int(rng.random() * n)
        u = rng.random()
        a = 0
        for k in range(3):
            if spins[nbr[s, k]] > 0:
                a += 1
        if spins[s] > 0:
            if u < acc[1, a]:
                spins[s] = -1
                plus -= 1
                gamma += 2 * a - 3
        else:
            if u < acc[0, a]:
                spins[s] = 1
                plus += 1
                gamma += 3 - 2 * a
                e = J * gamma - h * plus
                if e > best:
                    best = e
                    bg = gamma
                    bp = plus
                if plus == n:
                    code = 0
                    break
                if trigger <= plus <= trigger_hi:
                    code = 1
                    break
    state[0] = t
    state[1] = plus
    state[2] = gamma
    state[3] = bg
    state[4] = bp
    return code


def step(config: SpinConfiguration, params: ModelParams, rng: np.random.Generator, acc: np.ndarray | None = None) -> bool:
    """One Metropolis step in place; returns whether the flip was accepted."""
    if acc is None:
        acc = acceptance_table(params)
    n = config.topo.site_count
    s = int(rng.random() * n)
    u = rng.random()
    a = config.plus_neighbors(s)
    si = 1 if config.spins[s] > 0 else 0
    if u < acc[si, a]:
        config.flip(s)
        return True
    return False


@dataclass
class HittingRecord:
    tau: int | None
    seed: int
    gate_visited: bool
    gate_shape: str | None  # "S" or "D" for the last matched crossing
    gate_visited_last: bool  # the final crossing of the critical area matched a gate shape
    crossings: int
    max_level_reached: EnergyLevel
    wall_steps: int

    @property
    def timed_out(self) -> bool:
        return self.tau is None


@dataclass
class GateMatcher:
    size: int
    s_shapes: set
    d_shapes: set

    @classmethod
    def for_params(cls, params: ModelParams) -> "GateMatcher":
        s, d = critical_gate_shapes(params)
        return cls(theory_values(params).a_star, s, d)

    def match(self, spins: np.ndarray, topo: LatticeTopology, dust: int = 0) -> str | None:
        """Gate type of the critical-area cluster, or None.

        With ``dust = 0`` the configuration must be a single non-wrapping
        cluster.  A positive ``dust`` also accepts up to that many plus
        spins in other small clusters next to the critical one.
        """
        cfg = SpinConfiguration(topo, spins.copy())
        dec = clusters(cfg, topo)
        extra = cfg.plus_count - self.size
        if not 0 <= extra <= dust:
            return None
        for comp, wrap, lift in zip(dec.components, dec.wrap_class, dec.lifted):
            if len(comp) != self.size or wrap in (PLUS_STRIP, TORUS_SPANNING):
                continue
            key = canonical_tuple(lift.values())
            if key in self.s_shapes:
                return "S"
            if key in self.d_shapes:
                return "D"
        return None


def default_max_steps(params: ModelParams) -> int:
    try:
        tv = theory_values(params)
    except ValueError:
        return MAX_STEPS_CAP
    x = 100.0 * tv.predicted_mean_tau
    return int(min(x, MAX_STEPS_CAP)) if math.isfinite(x) else MAX_STEPS_CAP


def run_hitting(
    params: ModelParams,
    topo: LatticeTopology,
    seed: int,
    max_steps: int | None = None,
    gate_detect: bool = True,
    debug: bool = False,
    matcher: GateMatcher | None = None,
    dust: int = 0,
) -> HittingRecord:
    """First hitting time of all-plus from all-minus.

    With gate detection on, every transition of the plus count from A*-1
    to A* stops the kernel; the configuration is matched against the
    critical droplet shapes when it consists of a single non-wrapping
    cluster.  ``dust > 0`` widens the trigger to plus counts A*..A*+dust
    and tolerates that many stray pluses (a diagnostic, off by default).
    """
    if max_steps is None:
        max_steps = default_max_steps(params)
    if max_steps <= 0:
        raise ValueError("max_steps must be positive")
    if gate_detect and matcher is None:
        try:
            matcher = GateMatcher.for_params(params)
        except ValueError:
            matcher = None
    if not gate_detect:
        matcher = None
    trigger = matcher.size if matcher is not None else -1
    n = topo.site_count
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    spins = -np.ones(n, dtype=np.int8)
    acc = acceptance_table(params)
    state = np.zeros(5, dtype=np.int64)
    visited, last, shape, crossings = False, False, None, 0
    while True:
        limit = max_steps if not debug else min(max_steps, int(state[0]) + DEBUG_CHUNK)
        code = _run(spins, topo.neighbor_table, acc, rng, state, limit, trigger, trigger + dust, params.J, params.h)
        if debug:
            chk = SpinConfiguration(topo, spins.copy())
            assert chk.plus_count == state[1] and chk.contour_length == state[2], "energy cache drift"
        if code == ABSORBED:
            break
        if code == TRIGGER:
            crossings += 1
            m = matcher.match(spins, topo, dust)
            last = m is not None
            if last:
                visited, shape = True, m
            continue
        if state[0] >= max_steps:
            break
    t = int(state[0])
    done = int(state[1]) == n
    return HittingRecord(
        tau=t if done else None,
        seed=int(seed),
        gate_visited=visited,
        gate_shape=shape,
        gate_visited_last=last,
        crossings=crossings,
        max_level_reached=EnergyLevel(int(state[3]), int(state[4])),
        wall_steps=t,
    )


# --- ensembles ------------------------------------------------------------------

def replica_seeds(base_seed: int, n: int) -> list[int]:
    children = np.random.SeedSequence(int(base_seed)).spawn(n)
    return [int(c.generate_state(1, np.uint64)[0]) for c in children]


@dataclass
class EnsembleSummary:
    n: int
    n_completed: int
    n_timeout: int
    mean_tau: float
    stderr: float
    t_beta: float  # empirical (1 - 1/e) quantile of tau
    mean_over_t_beta: float
    gate_fraction: float
    gate_fraction_last: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def empirical_t_beta(taus: np.ndarray) -> float:
    """Smallest sample t with empirical P(tau <= t) >= 1 - 1/e."""
    x = np.sort(np.asarray(taus, dtype=float))
    if len(x) == 0:
        return math.nan
    k = math.ceil((1.0 - math.exp(-1.0)) * len(x)) - 1
    return float(x[max(k, 0)])


def summarize(records: list[HittingRecord]) -> EnsembleSummary:
    taus = np.array([r.tau for r in records if r.tau is not None], dtype=float)
    n, c = len(records), len(taus)
    mean = float(taus.mean()) if c else math.nan
    se = float(taus.std(ddof=1) / math.sqrt(c)) if c > 1 else (0.0 if c == 1 else math.nan)
    tb = empirical_t_beta(taus)
    return EnsembleSummary(
        n=n,
        n_completed=c,
        n_timeout=n - c,
        mean_tau=mean,
        stderr=se,
        t_beta=tb,
        mean_over_t_beta=mean / tb if c else math.nan,
        gate_fraction=sum(r.gate_visited for r in records) / n if n else math.nan,
        gate_fraction_last=sum(r.gate_visited_last for r in records) / n if n else math.nan,
    )


@dataclass
class EnsembleResult:
    records: list[HittingRecord]
    summary: EnsembleSummary = field(init=False)

    def __post_init__(self):
        self.summary = summarize(self.records)


def _worker(args):
    params, L, seeds, max_steps, gate_detect, dust = args
    topo = build_topology(L)
    matcher = None
    if gate_detect:
        try:
            matcher = GateMatcher.for_params(params)
        except ValueError:
            matcher = None
    return [run_hitting(params, topo, s, max_steps, gate_detect, matcher=matcher, dust=dust) for s in seeds]


def replica_ensemble(
    params: ModelParams,
    topo: LatticeTopology,
    n: int,
    base_seed: int,
    parallelism: int = 1,
    max_steps: int | None = None,
    gate_detect: bool = True,
    dust: int = 0,
) -> EnsembleResult:
    if n < 1:
        raise ValueError("need at least one replica")
    seeds = replica_seeds(base_seed, n)
    if parallelism <= 1:
        return EnsembleResult(_worker((params, topo.L, seeds, max_steps, gate_detect, dust)))
    chunks = [seeds[i::parallelism] for i in range(parallelism)]
    with ProcessPoolExecutor(max_workers=parallelism) as ex:
        parts = list(ex.map(_worker, [(params, topo.L, c, max_steps, gate_detect, dust) for c in chunks]))
    records = [None] * n
    for j, part in enumerate(parts):
        for k, rec in enumerate(part):
            records[j + k * parallelism] = rec
    return EnsembleResult(records)
