"""The reference path from all-minus to all-plus and its energy profile.

Standard phase: grow the standard polyiamond face by face along the
spiral order as long as the spiral prefix embeds in the torus with its
planar neighbourhood intact.  Wrap phase: repeatedly flip the minus site
with the most plus neighbours (ties: adjacent to the previous flip, then
lowest index) until the torus is all plus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .energy import EnergyLevel, ModelParams, flip_delta
from .hexlattice import LatticeTopology, SpinConfiguration, build_topology
from .polyiamond import quasi_regular_area, spiral
from .theory import theory_values
from .trigrid import face_neighbors


class LatticeTooSmallError(ValueError):
    pass


@dataclass
class FlipPath:
    start: SpinConfiguration
    flips: np.ndarray
    n_gamma: np.ndarray  # profile, length len(flips) + 1
    n_plus: np.ndarray
    standard_length: int  # number of flips in the standard phase

    @property
    def profile(self) -> list[EnergyLevel]:
        return [EnergyLevel(int(g), int(p)) for g, p in zip(self.n_gamma, self.n_plus)]

    def realized(self, params: ModelParams) -> np.ndarray:
        return params.J * self.n_gamma - params.h * self.n_plus

    def configuration(self, index: int) -> SpinConfiguration:
        cfg = self.start.copy()
        cfg.spins[self.flips[:index]] *= -1
        cfg.recompute()
        return cfg

    def __len__(self) -> int:
        return len(self.flips)


def default_lattice_size(params: ModelParams) -> int:
    """Smallest L meeting the torus-size clause, and large enough for E(r*+3)."""
    r = theory_values(params).r_star
    return max(math.ceil(4 * params.J / (params.h * math.sqrt(2))), 2 * (r + 3) + 2)


def build_reference_path(
    params: ModelParams, topo: LatticeTopology | None = None, min_radius: int | None = None
) -> FlipPath:
    """Reference path on ``topo`` (default: ``default_lattice_size``).

    The standard phase must reach E(min_radius) (default r* + 3) before the
    spiral first interacts with its own periodic image.
    """
    if topo is None:
        topo = build_topology(default_lattice_size(params))
    if min_radius is None:
        min_radius = theory_values(params).r_star + 3
    n = topo.site_count
    L = topo.L
    ox = oy = L // 2
    cfg = SpinConfiguration.all_minus(topo)
    spins = cfg.spins.copy()
    nbr = topo.neighbor_table
    plus_nbrs = np.zeros(n, dtype=np.int64)
    flips: list[int] = []
    gam = [0]
    plus = [0]

    def do_flip(s: int):
        a = int(plus_nbrs[s])
        d = flip_delta(-1, a)
        spins[s] = 1
        plus_nbrs[nbr[s]] += 1
        flips.append(s)
        gam.append(gam[-1] + d.n_gamma)
        plus.append(plus[-1] + 1)

    # standard phase
    planar: set = set()
    max_area = n
    faces = spiral(min(max_area, _spiral_budget(L)))
    for f in faces:
        s = topo.site_of_face((f[0] + ox, f[1] + oy, f[2]))
        a_planar = sum(g in planar for g in face_neighbors(f))
        if spins[s] > 0 or plus_nbrs[s] != a_planar:
            break
        # a neighbour already plus through the periodic image also breaks planarity
        do_flip(s)
        planar.add(f)
    standard_length = len(flips)
    needed = quasi_regular_area(min_radius, 0)
    if standard_length < needed:
        raise LatticeTooSmallError(
            f"L={L}: standard phase stops at area {standard_length} < |E({min_radius})| = {needed}"
        )

    # wrap phase
    while len(flips) < n:
        score = np.where(spins < 0, plus_nbrs, -1)
        best = score.max()
        cand = np.flatnonzero(score == best)
        if len(cand) > 1:
            last = flips[-1]
            adj = [c for c in cand if last in nbr[c]]
            if adj:
                cand = adj
        do_flip(int(cand[0]))

    return FlipPath(
        start=cfg,
        flips=np.asarray(flips, dtype=np.int64),
        n_gamma=np.asarray(gam, dtype=np.int64),
        n_plus=np.asarray(plus, dtype=np.int64),
        standard_length=standard_length,
    )


def _spiral_budget(L: int) -> int:
    # the spiral cannot embed beyond the hexagon inscribed in the torus
    return 6 * (L // 2 + 1) ** 2


def _exact(params: ModelParams, g: int, p: int) -> Fraction:
    return Fraction(params.J) * g - Fraction(params.h) * p


def segment_max(path: FlipPath, params: ModelParams, lo: int, hi: int) -> tuple[float, list[int]]:
    """Maximum realized energy over profile indices lo..hi (inclusive) and all argmax indices."""
    vals = [_exact(params, int(path.n_gamma[i]), int(path.n_plus[i])) for i in range(lo, hi + 1)]
    m = max(vals)
    return float(m), [lo + k for k, v in enumerate(vals) if v == m]


def barrier(path: FlipPath, params: ModelParams) -> tuple[float, frozenset]:
    """Path maximum relative to all-minus and the profile indices attaining it.

    Every flip adds one plus, so the index equals the plus count (area).
    """
    m, idx = segment_max(path, params, 0, len(path))
    return m, frozenset(idx)


def communication_heights(path: FlipPath, params: ModelParams) -> dict[tuple[int, int], float]:
    """Profile maximum between E_{B_i}(r) and E_{B_{i+1}}(r), keyed by (r, i)."""
    out = {}
    r = 1
    while quasi_regular_area(r, 6) <= path.standard_length:
        for i in range(6):
            lo, hi = quasi_regular_area(r, i), quasi_regular_area(r, i + 1)
            out[(r, i)] = segment_max(path, params, lo, hi)[0]
        r += 1
    return out


def hexagon_heights(path: FlipPath, params: ModelParams) -> dict[int, tuple[float, list[int]]]:
    """Profile maximum between E(r) and E(r+1) with its argmax areas; r = 0 starts at all-minus."""
    out = {}
    r = 0
    while 6 * (r + 1) ** 2 <= path.standard_length:
        out[r] = segment_max(path, params, 6 * r * r, 6 * (r + 1) ** 2)
        r += 1
    return out


def predicted_hexagon_argmax(r: int, r_star: int) -> int:
    """Area of the saddle between E(r) and E(r+1) along the reference path."""
    if r <= r_star:
        return 6 * r * r + 10 * r + 5
    if r == r_star + 1:
        s = r_star + 1
        return 6 * s * s + 2 * s + 1
    return 6 * r * r + 2


def predicted_bar_argmax(r: int, i: int) -> int:
    """Saddle area between E_{B_i}(r) and E_{B_{i+1}}(r): two faces into the new bar."""
    lo, hi = quasi_regular_area(r, i), quasi_regular_area(r, i + 1)
    return min(lo + 2, hi)
