"""Periodic hexagonal lattice on an L x L rhombus torus.

Sites are the triangular faces of the torus.  Cell ``(row, col)`` holds an
up-face and a down-face; ``site = 2 * (row * L + col) + orientation``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .trigrid import NEIGHBOR_OFFSETS, Face

CLUSTER = "cluster"
PLUS_STRIP = "plus-strip"
TORUS_SPANNING = "torus-spanning"
HOLE = "hole"
MINUS_STRIP = "minus-strip"
SEA = "sea-of-minuses"

_PLUS_CLASSES = (CLUSTER, PLUS_STRIP, TORUS_SPANNING)
_MINUS_CLASSES = (HOLE, MINUS_STRIP, SEA)


@dataclass(frozen=True, eq=False)
class LatticeTopology:
    L: int
    site_count: int
    neighbor_table: np.ndarray  # (n, 3) int64
    neighbor_shift: np.ndarray  # (n, 3, 2) planar offset (dx, dy) of each neighbour cell
    face_coords: np.ndarray  # (n, 3) rows of (row, col, orientation)
    edges: np.ndarray  # (3n/2, 2) unordered neighbour pairs, i < j

    def site_of(self, row: int, col: int, orientation: int) -> int:
        L = self.L
        return 2 * ((row % L) * L + (col % L)) + orientation

    def site_of_face(self, f: Face) -> int:
        """Torus site of a planar face ``(x, y, o)`` (x is the column, y the row)."""
        x, y, o = f
        return self.site_of(y, x, o)

    def planar_face(self, site: int) -> Face:
        row, col, o = self.face_coords[site]
        return (int(col), int(row), int(o))


def build_topology(L: int) -> LatticeTopology:
    if not isinstance(L, (int, np.integer)) or L < 2:
        raise ValueError(f"lattice side must be an integer >= 2, got {L!r}")
    L = int(L)
    n = 2 * L * L
    nbr = np.empty((n, 3), dtype=np.int64)
    shift = np.empty((n, 3, 2), dtype=np.int64)
    coords = np.empty((n, 3), dtype=np.int64)
    for row in range(L):
        for col in range(L):
            for o in (0, 1):
                s = 2 * (row * L + col) + o
                coords[s] = (row, col, o)
                for k, (dx, dy) in enumerate(NEIGHBOR_OFFSETS[o]):
                    nbr[s, k] = 2 * (((row + dy) % L) * L + (col + dx) % L) + (1 - o)
                    shift[s, k] = (dx, dy)
    up = np.arange(0, n, 2)
    edges = np.stack([np.repeat(up, 3), nbr[up].ravel()], axis=1)
    edges.sort(axis=1)
    for arr in (nbr, shift, coords, edges):
        arr.setflags(write=False)
    return LatticeTopology(L, n, nbr, shift, coords, edges)


@dataclass(eq=False)
class SpinConfiguration:
    """Spins in {-1, +1} with cached plus count and contour length."""

    topo: LatticeTopology
    spins: np.ndarray
    plus_count: int = field(init=False)
    contour_length: int = field(init=False)

    def __post_init__(self):
        self.spins = np.ascontiguousarray(self.spins, dtype=np.int8)
        if self.spins.shape != (self.topo.site_count,):
            raise ValueError("spin array does not match the lattice")
        if not np.all(np.abs(self.spins) == 1):
            raise ValueError("spins must be +1 or -1")
        self.recompute()

    @classmethod
    def all_minus(cls, topo: LatticeTopology) -> "SpinConfiguration":
        return cls(topo, -np.ones(topo.site_count, dtype=np.int8))

    @classmethod
    def all_plus(cls, topo: LatticeTopology) -> "SpinConfiguration":
        return cls(topo, np.ones(topo.site_count, dtype=np.int8))

    @classmethod
    def from_plus_sites(cls, topo: LatticeTopology, sites) -> "SpinConfiguration":
        s = -np.ones(topo.site_count, dtype=np.int8)
        s[np.asarray(list(sites), dtype=np.int64)] = 1
        return cls(topo, s)

    def recompute(self) -> None:
        self.plus_count = int(np.count_nonzero(self.spins > 0))
        self.contour_length = contour_length(self, self.topo)

    def plus_neighbors(self, site: int) -> int:
        return int(np.count_nonzero(self.spins[self.topo.neighbor_table[site]] > 0))

    def flip(self, site: int) -> None:
        a = self.plus_neighbors(site)
        if self.spins[site] < 0:
            self.plus_count += 1
            self.contour_length += 3 - 2 * a
        else:
            self.plus_count -= 1
            self.contour_length += 2 * a - 3
        self.spins[site] = -self.spins[site]

    def copy(self) -> "SpinConfiguration":
        return SpinConfiguration(self.topo, self.spins.copy())

    def plus_sites(self) -> np.ndarray:
        return np.flatnonzero(self.spins > 0)


def contour_length(config: SpinConfiguration, topo: LatticeTopology | None = None) -> int:
    topo = topo or config.topo
    e = topo.edges
    return int(np.count_nonzero(config.spins[e[:, 0]] != config.spins[e[:, 1]]))


@dataclass
class ClusterDecomposition:
    components: list[frozenset[int]]
    wrap_class: list[str]
    lifted: list[dict[int, Face]]  # unwrapped planar face of each site, per component
    minus_components: list[frozenset[int]]
    minus_wrap_class: list[str]


def _winding_rank(vectors: list[tuple[int, int]]) -> int:
    vs = [v for v in vectors if v != (0, 0)]
    if not vs:
        return 0
    a = vs[0]
    for b in vs[1:]:
        if a[0] * b[1] - a[1] * b[0] != 0:
            return 2
    return 1


def _components(spins: np.ndarray, topo: LatticeTopology, sign: int):
    """Edge-connected components of sites with the given spin, with lifts and winding rank."""
    L = topo.L
    nbr = topo.neighbor_table
    shift = topo.neighbor_shift
    coords = topo.face_coords
    seen = np.zeros(topo.site_count, dtype=bool)
    out = []
    for s0 in np.flatnonzero(spins == sign):
        s0 = int(s0)
        if seen[s0]:
            continue
        row, col, o = coords[s0]
        lift = {s0: (int(col), int(row), int(o))}
        seen[s0] = True
        windings: set[tuple[int, int]] = set()
        q = deque([s0])
        while q:
            s = q.popleft()
            x, y, _ = lift[s]
            for k in range(3):
                t = int(nbr[s, k])
                if spins[t] != sign:
                    continue
                dx, dy = shift[s, k]
                target = (x + int(dx), y + int(dy), 1 - lift[s][2])
                if t in lift:
                    if lift[t] != target:
                        tx, ty, _ = lift[t]
                        windings.add(((target[0] - tx) // L, (target[1] - ty) // L))
                else:
                    lift[t] = target
                    seen[t] = True
                    q.append(t)
        out.append((frozenset(lift), _winding_rank(sorted(windings)), lift))
    return out


def clusters(config: SpinConfiguration, topo: LatticeTopology | None = None) -> ClusterDecomposition:
    """Plus and minus components with their wrap classes.

    The winding vectors collected along non-tree edges of a BFS tree span
    the homology of each component: rank 0 means contractible, rank 1 a
    strip, rank 2 a component wrapping both directions.
    """
    topo = topo or config.topo
    plus = _components(config.spins, topo, 1)
    minus = _components(config.spins, topo, -1)
    return ClusterDecomposition(
        components=[c for c, _, _ in plus],
        wrap_class=[_PLUS_CLASSES[r] for _, r, _ in plus],
        lifted=[lf for _, _, lf in plus],
        minus_components=[c for c, _, _ in minus],
        minus_wrap_class=[_MINUS_CLASSES[r] for _, r, _ in minus],
    )
