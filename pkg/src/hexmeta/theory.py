"""Closed-form metastability predictions for the hexagonal Ising model."""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

from .energy import EnergyLevel, ModelParams, critical_ratio
from .polyiamond import gate_shapes, quasi_regular_hexagon, standard_perimeter


class DegenerateRegimeError(ValueError):
    pass


class UnsupportedRegimeError(ValueError):
    pass


@dataclass(frozen=True)
class TheoryValues:
    r_star: int
    delta: float
    gamma_hex: float
    a_star: int
    k_prefactor: int
    l: int
    predicted_mean_tau: float
    predicted_log_mixing_exponent: float
    case: int  # 1 when delta < 1/2, 2 when delta > 1/2
    gamma_level: EnergyLevel  # (perimeter, area) of the critical droplet

    def as_dict(self) -> dict:
        d = asdict(self)
        d["gamma_level"] = [self.gamma_level.n_gamma, self.gamma_level.n_plus]
        return d


def gamma_closed_form(J: float, h: float, r: int, case: int) -> float:
    if case == 1:
        return -6 * r * r * h + 6 * r * J - 10 * r * h + 7 * J - 5 * h
    s = r + 1
    return -6 * s * s * h + 6 * s * J - 2 * s * h + 3 * J - h


def critical_area(r: int, case: int) -> int:
    if case == 1:
        return 6 * r * r + 10 * r + 5
    s = r + 1
    return 6 * s * s + 2 * s + 1


def _exp_or_inf(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def theory_values(params: ModelParams) -> TheoryValues:
    J, h = params.J, params.h
    if J < 2 * h:
        raise UnsupportedRegimeError("requires J >= 2h")
    r, delta = critical_ratio(J, h)
    if delta == 0.0:
        raise UnsupportedRegimeError("J/2h - 1/2 is an integer")
    if abs(delta - 0.5) < 1e-12:
        raise DegenerateRegimeError("delta = 1/2: the two critical areas tie")
    if r < 1:
        raise UnsupportedRegimeError("critical radius r* = 0 is not covered")
    case = 1 if delta < 0.5 else 2
    a_star = critical_area(r, case)
    level = EnergyLevel(standard_perimeter(a_star), a_star)
    gamma = level.realize(params)
    k = 5 * (r + 1) if case == 1 else 10 * (r + 1)
    return TheoryValues(
        r_star=r,
        delta=delta,
        gamma_hex=gamma,
        a_star=a_star,
        k_prefactor=k,
        l=r + 2,
        predicted_mean_tau=_exp_or_inf(params.beta * gamma) / k,
        predicted_log_mixing_exponent=gamma,
        case=case,
        gamma_level=level,
    )


def standard_energy(A: int, params: ModelParams) -> float:
    return EnergyLevel(standard_perimeter(A), A).realize(params)


def standard_energy_closed_forms(r: int, params: ModelParams) -> dict[int, float]:
    """The six special standard energies between E(r) and E(r+1), keyed by area."""
    J, h = params.J, params.h
    return {
        6 * r * r + 2: -6 * r * r * h + 6 * r * J + 2 * J - 2 * h,
        6 * r * r + 2 * r + 1: -6 * r * r * h + 6 * r * J - 2 * r * h + 3 * J - h,
        6 * r * r + 4 * r + 2: -6 * r * r * h + 6 * r * J - 4 * r * h + 4 * J - 2 * h,
        6 * r * r + 6 * r + 3: -6 * r * r * h + 6 * r * J - 6 * r * h + 5 * J - 3 * h,
        6 * r * r + 8 * r + 4: -6 * r * r * h + 6 * r * J - 8 * r * h + 6 * J - 4 * h,
        6 * r * r + 10 * r + 5: -6 * r * r * h + 6 * r * J - 10 * r * h + 7 * J - 5 * h,
    }


def gate_cardinalities(params: ModelParams, L: int) -> tuple[int, int]:
    tv = theory_values(params)
    n = 2 * L * L
    if tv.case == 1:
        return 6 * (tv.l - 1) * n, 3 * (tv.l - 1) * n
    return 12 * (tv.l - 1) * n, 6 * (tv.l - 1) * n


def gate_hexagon(params: ModelParams):
    """Quasi-regular hexagon underlying the critical droplets."""
    tv = theory_values(params)
    if tv.case == 1:
        return quasi_regular_hexagon(tv.r_star, 5)
    return quasi_regular_hexagon(tv.r_star + 1, 1)


def critical_gate_shapes(params: ModelParams) -> tuple[set, set]:
    return gate_shapes(theory_values(params).a_star)
