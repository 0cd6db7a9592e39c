"""Energy bookkeeping relative to the all-minus configuration.

H(sigma) - H(-1) = J * |gamma(sigma)| - h * N+(sigma), stored exactly as the
integer pair (n_gamma, n_plus).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

from .hexlattice import LatticeTopology, SpinConfiguration

_EPS = 1e-12


@dataclass(frozen=True)
class ModelParams:
    J: float
    h: float
    beta: float = 1.0

    def __post_init__(self):
        for name in ("J", "h", "beta"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite real, got {v!r}")
            object.__setattr__(self, name, v)

    def with_beta(self, beta: float) -> "ModelParams":
        return ModelParams(self.J, self.h, beta)


@dataclass(frozen=True, order=True)
class EnergyLevel:
    n_gamma: int
    n_plus: int

    def realize(self, params: ModelParams) -> float:
        return params.J * self.n_gamma - params.h * self.n_plus

    def __add__(self, other: "EnergyLevel") -> "EnergyLevel":
        return EnergyLevel(self.n_gamma + other.n_gamma, self.n_plus + other.n_plus)

    def __sub__(self, other: "EnergyLevel") -> "EnergyLevel":
        return EnergyLevel(self.n_gamma - other.n_gamma, self.n_plus - other.n_plus)

    def __neg__(self) -> "EnergyLevel":
        return EnergyLevel(-self.n_gamma, -self.n_plus)


def energy_level(config: SpinConfiguration, topo: LatticeTopology | None = None) -> EnergyLevel:
    return EnergyLevel(config.contour_length, config.plus_count)


def flip_delta(spin: int, a: int) -> EnergyLevel:
    """Pair change when flipping a site of the given spin with ``a`` plus neighbours."""
    if spin < 0:
        return EnergyLevel(3 - 2 * a, 1)
    return EnergyLevel(2 * a - 3, -1)


def delta_energy(config: SpinConfiguration, site: int, params: ModelParams) -> tuple[float, EnergyLevel]:
    d = flip_delta(int(config.spins[site]), config.plus_neighbors(site))
    return d.realize(params), d


@dataclass(frozen=True)
class ParamReport:
    h_in_range: bool
    J_at_least_2h: bool
    ratio_not_integer: bool
    torus_large_enough: bool
    delta_half: bool
    r_star_zero: bool
    r_star: int
    delta: float
    torus_sites: int
    torus_bound: float

    @property
    def condition_holds(self) -> bool:
        return self.h_in_range and self.J_at_least_2h and self.ratio_not_integer and self.torus_large_enough

    @property
    def degenerate(self) -> bool:
        return self.delta_half or self.r_star_zero

    def as_dict(self) -> dict:
        d = asdict(self)
        d["condition_holds"] = self.condition_holds
        return d


def critical_ratio(J: float, h: float) -> tuple[int, float]:
    """(r*, delta) with J/2h - 1/2 = r* + delta; values within 1e-12 of an integer snap to it."""
    x = J / (2.0 * h) - 0.5
    r = math.floor(x)
    d = x - r
    if d > 1.0 - _EPS:
        r, d = r + 1, 0.0
    elif d < _EPS:
        d = 0.0
    return int(r), d


def validate_params(params: ModelParams, L: int) -> ParamReport:
    J, h = params.J, params.h
    r, d = critical_ratio(J, h)
    n = 2 * L * L
    bound = (4.0 * J / h) ** 2
    return ParamReport(
        # field strength enters only through J/h; h = 1 is accepted (see README)
        h_in_range=0.0 < h <= 1.0,
        J_at_least_2h=J >= 2.0 * h,
        ratio_not_integer=d != 0.0,
        torus_large_enough=n >= bound,
        delta_half=abs(d - 0.5) < _EPS,
        r_star_zero=r <= 0,
        r_star=r,
        delta=d,
        torus_sites=n,
        torus_bound=bound,
    )
