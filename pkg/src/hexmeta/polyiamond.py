"""Polyiamonds: finite edge-connected sets of triangular faces.

Covers perimeters, internal angles and holes, the standard spiral
construction with its bars and quasi-regular hexagons, the corner-cut
hexagon family T^d_{a,b,c}, and an exhaustive enumeration oracle.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable

from .trigrid import (
    DOWN,
    UP,
    Face,
    canonical_key,
    face_centroid,
    face_neighbors,
    face_vertices,
    faces_around_vertex,
    shared_edge,
    vertex_xy,
)

ENUMERATION_CAP = 13

# outward side normals in degrees, in the clockwise order bars are attached
BAR_NORMALS = (90, 30, -30, -90, -150, 150)


@dataclass(frozen=True)
class Polyiamond:
    faces: frozenset

    def __post_init__(self):
        fs = frozenset((int(x), int(y), int(o)) for x, y, o in self.faces)
        if not fs:
            raise ValueError("a polyiamond needs at least one face")
        if any(o not in (UP, DOWN) for _, _, o in fs):
            raise ValueError("orientation must be 0 (up) or 1 (down)")
        object.__setattr__(self, "faces", fs)
        if not _connected(fs):
            raise ValueError("faces are not edge-connected")

    @classmethod
    def of(cls, faces: Iterable[Face]) -> "Polyiamond":
        return cls(frozenset(faces))

    def __len__(self) -> int:
        return len(self.faces)

    def __contains__(self, f) -> bool:
        return f in self.faces

    def union(self, extra: Iterable[Face]) -> "Polyiamond":
        return Polyiamond(self.faces | frozenset(extra))

    def sorted_faces(self) -> list[Face]:
        return sorted(self.faces)


def _connected(fs: frozenset) -> bool:
    start = next(iter(fs))
    seen = {start}
    q = deque([start])
    while q:
        for g in face_neighbors(q.popleft()):
            if g in fs and g not in seen:
                seen.add(g)
                q.append(g)
    return len(seen) == len(fs)


# --- basic measures ----------------------------------------------------------

def area(P: Polyiamond) -> int:
    return len(P.faces)


def boundary_pairs(P: Polyiamond) -> list[tuple[Face, Face]]:
    """(inside, outside) face pairs, one per boundary edge."""
    fs = P.faces
    return [(f, g) for f in fs for g in face_neighbors(f) if g not in fs]


def edge_perimeter(P: Polyiamond) -> int:
    return len(boundary_pairs(P))


def site_perimeter(P: Polyiamond) -> int:
    return len({g for _, g in boundary_pairs(P)})


def holes(P: Polyiamond) -> list[frozenset]:
    """Finite edge-connected components of empty faces."""
    fs = P.faces
    xs = [f[0] for f in fs]
    ys = [f[1] for f in fs]
    x0, x1, y0, y1 = min(xs) - 2, max(xs) + 2, min(ys) - 2, max(ys) + 2

    def inside(f):
        return x0 <= f[0] <= x1 and y0 <= f[1] <= y1

    empty = {
        (x, y, o)
        for x in range(x0, x1 + 1)
        for y in range(y0, y1 + 1)
        for o in (UP, DOWN)
        if (x, y, o) not in fs
    }
    outer = {f for f in empty if f[0] in (x0, x1) or f[1] in (y0, y1)}
    q = deque(outer)
    while q:
        for g in face_neighbors(q.popleft()):
            if g in empty and g not in outer and inside(g):
                outer.add(g)
                q.append(g)
    rest = empty - outer
    out = []
    while rest:
        s = rest.pop()
        comp = {s}
        q = deque([s])
        while q:
            for g in face_neighbors(q.popleft()):
                if g in rest:
                    rest.discard(g)
                    comp.add(g)
                    q.append(g)
        out.append(frozenset(comp))
    out.sort(key=lambda c: min(c))
    return out


@dataclass(frozen=True)
class AngleCensus:
    """Internal angles counted in units of pi/3 (index 0 is pi/3, index 4 is 5pi/3)."""

    counts: tuple[int, int, int, int, int]
    nu: int
    e: int
    hole_count: int

    def count(self, units: int) -> int:
        return self.counts[units - 1]

    def turning_sum(self) -> int:
        """Sum of (pi - angle) in units of pi/3; equals 6 * (1 - hole_count)."""
        return sum((3 - u) * c for u, c in zip(range(1, 6), self.counts))


def angle_census(P: Polyiamond) -> AngleCensus:
    """Internal angles read off the empty runs around each boundary vertex.

    At a vertex, every maximal cyclic run of m empty faces (m < 6) closes one
    corner of the boundary with internal angle (6 - m) pi/3.  Pairing by empty
    runs keeps pinch vertices correct.
    """
    fs = P.faces
    hs = holes(P)
    elementary = {next(iter(c)) for c in hs if len(c) == 1}
    counts = [0] * 5
    nu = 0
    verts = {v for f in fs for v in face_vertices(f)}
    for v in verts:
        ring = faces_around_vertex(v)
        filled = [f in fs for f in ring]
        if all(filled):
            continue
        s = filled.index(True)
        run: list[Face] = []
        for k in range(1, 7):
            idx = (s + k) % 6
            if filled[idx]:
                if run:
                    m = len(run)
                    counts[6 - m - 1] += 1
                    if m == 1 and run[0] not in elementary:
                        nu += 1
                    run = []
            else:
                run.append(ring[idx])
    return AngleCensus(tuple(counts), nu, len(elementary), len(hs))


def site_edge_relation_check(P: Polyiamond) -> bool:
    c = angle_census(P)
    return edge_perimeter(P) == site_perimeter(P) + c.nu + 2 * c.e


# --- canonical form and enumeration -----------------------------------------

def canonical_form(P: Polyiamond) -> Polyiamond:
    return Polyiamond(frozenset(canonical_key(P.faces)))


def canonical_tuple(P: Polyiamond | Iterable[Face]) -> tuple[Face, ...]:
    faces = P.faces if isinstance(P, Polyiamond) else P
    return canonical_key(faces)


_LEVELS: list[set] = [set(), {((0, 0, UP),)}]


def enumerate_polyiamonds(A: int, cap: int = ENUMERATION_CAP) -> set[tuple[Face, ...]]:
    """All free polyiamonds of area ``A`` as canonical face tuples.

    Grows each canonical (A-1)-iamond by one edge-adjacent face, then
    deduplicates under translations and the 12 lattice isometries.
    """
    if A < 1:
        raise ValueError("area must be >= 1")
    if A > cap:
        raise ValueError(f"area {A} exceeds the enumeration cap {cap}")
    while len(_LEVELS) <= A:
        prev = _LEVELS[-1]
        nxt = set()
        for shape in prev:
            fs = set(shape)
            tried = set()
            for f in shape:
                for g in face_neighbors(f):
                    if g in fs or g in tried:
                        continue
                    tried.add(g)
                    fs.add(g)
                    nxt.add(canonical_key(fs))
                    fs.discard(g)
        _LEVELS.append(nxt)
    return set(_LEVELS[A])


def export_shapes(shapes: Iterable[tuple[Face, ...]], path: str | Path) -> None:
    lines = sorted(" ".join(f"{x},{y},{o}" for x, y, o in s) for s in shapes)
    Path(path).write_text("\n".join(lines) + "\n")


def load_shapes(path: str | Path) -> set[tuple[Face, ...]]:
    out = set()
    for line in Path(path).read_text().splitlines():
        if line.strip():
            out.add(tuple(tuple(int(t) for t in tok.split(",")) for tok in line.split()))
    return out


# --- sides and bars -----------------------------------------------------------

def _normal_of(inside: Face, outside: Face) -> int:
    (ax, ay), (bx, by) = face_centroid(inside), face_centroid(outside)
    ang = math.degrees(math.atan2(by - ay, bx - ax))
    k = round((ang - 30.0) / 60.0) % 6
    n = 30 + 60 * k
    return n - 360 if n > 180 else n


def sides(P: Polyiamond) -> dict[int, list[tuple[Face, Face]]]:
    """Boundary (inside, outside) pairs grouped by outward normal, ordered clockwise.

    Meaningful for convex polyiamonds, where each normal direction carries
    one straight side.
    """
    groups: dict[int, list] = {n: [] for n in BAR_NORMALS}
    for f, g in boundary_pairs(P):
        groups[_normal_of(f, g)].append((f, g))
    for n, pairs in groups.items():
        nx, ny = math.cos(math.radians(n)), math.sin(math.radians(n))
        tx, ty = ny, -nx  # clockwise tangent: the polyiamond stays on the right

        def key(pair):
            a, b = shared_edge(*pair)
            (ax, ay), (bx, by) = vertex_xy(a), vertex_xy(b)
            return (ax + bx) * tx + (ay + by) * ty

        pairs.sort(key=key)
    return groups


def side_lengths(P: Polyiamond) -> dict[int, int]:
    return {n: len(v) for n, v in sides(P).items()}


def longest_sides(P: Polyiamond) -> list[int]:
    lens = side_lengths(P)
    best = max(lens.values())
    return [n for n in BAR_NORMALS if lens[n] == best]


def bar_slots(P: Polyiamond, normal: int) -> tuple[list[Face], list[Face]]:
    """The t-faces across the side with the given normal and the b-faces between them."""
    fs = P.faces
    t = [g for _, g in sides(P)[normal]]
    b = []
    for t0, t1 in zip(t, t[1:]):
        common = [g for g in face_neighbors(t0) if g in set(face_neighbors(t1)) and g not in fs]
        if len(common) != 1:
            raise ValueError("side is not straight; bar undefined")
        b.append(common[0])
    return t, b


def bar_faces(P: Polyiamond, normal: int) -> list[Face]:
    """Faces of the bar on a side in fill order t0, b0, t1, b1, ..., t_{l-1}."""
    t, b = bar_slots(P, normal)
    out = []
    for j, f in enumerate(t):
        out.append(f)
        if j < len(b):
            out.append(b[j])
    return out


# --- the standard spiral -----------------------------------------------------

# clockwise fan around the origin vertex, starting at the up-face to its upper right
_FAN = ((0, 0, UP), (0, -1, DOWN), (0, -1, UP), (-1, -1, DOWN), (-1, 0, UP), (-1, 0, DOWN))
_SPIRAL: list[Face] = list(_FAN)
_SPIRAL_RADIUS = [1]


def bar_sizes(r: int) -> tuple[int, ...]:
    return (2 * r - 1, 2 * r + 1, 2 * r + 1, 2 * r + 1, 2 * r + 1, 2 * r + 3)


def quasi_regular_area(r: int, m: int) -> int:
    if r < 1 or not 0 <= m <= 6:
        raise ValueError("need r >= 1 and 0 <= m <= 6")
    return 6 * r * r + sum(bar_sizes(r)[:m])


def spiral(n: int) -> list[Face]:
    """First ``n`` faces of the standard growth order."""
    while len(_SPIRAL) < n:
        r = _SPIRAL_RADIUS[0]
        cur = Polyiamond(frozenset(_SPIRAL))
        for normal in BAR_NORMALS:
            bar = bar_faces(cur, normal)
            _SPIRAL.extend(bar)
            cur = Polyiamond(cur.faces | frozenset(bar))
        _SPIRAL_RADIUS[0] = r + 1
    return _SPIRAL[:n]


def regular_hexagon(r: int) -> Polyiamond:
    """E(r): faces whose vertices all lie within hexagonal distance r of the origin."""
    if r < 1:
        raise ValueError("r >= 1")
    out = set()
    for x in range(-r - 1, r + 1):
        for y in range(-r - 1, r + 1):
            for o in (UP, DOWN):
                f = (x, y, o)
                if all((abs(i) + abs(j) + abs(i + j)) // 2 <= r for i, j in face_vertices(f)):
                    out.add(f)
    return Polyiamond(frozenset(out))


def quasi_regular_hexagon(r: int, m: int) -> Polyiamond:
    return Polyiamond(frozenset(spiral(quasi_regular_area(r, m))))


@lru_cache(maxsize=None)
def quasi_regular_index(A: int) -> tuple[int, int] | None:
    """(r, m) with m in 0..5 such that E_{B_m}(r) has area A, or None."""
    r = 1
    while 6 * r * r <= A:
        for m in range(6):
            if quasi_regular_area(r, m) == A:
                return r, m
        r += 1
    return None


@dataclass(frozen=True)
class StandardDecomposition:
    r: int
    i: int
    k: int
    inner: tuple[int, int] | None  # (r, m) of R'_A; None for the empty polyiamond
    outer: tuple[int, int]  # (r, m) of R_A
    inner_area: int
    outer_area: int


def standard_decomposition(A: int) -> StandardDecomposition:
    if A < 1:
        raise ValueError("area must be >= 1")
    if A < 6:
        # fan convention: S(A) is part of the clockwise build of E(1)
        return StandardDecomposition(0, 0, A, None, (1, 0), 0, 6)
    r = math.isqrt(A // 6)
    while 6 * (r + 1) ** 2 <= A:
        r += 1
    while 6 * r * r > A:
        r -= 1
    rest = A - 6 * r * r
    cum = [0]
    for s in bar_sizes(r):
        cum.append(cum[-1] + s)
    i = max(m for m in range(6) if cum[m] <= rest)
    k = rest - cum[i]
    inner = (r, i)
    outer = (r, i + 1) if k > 0 else (r, i)
    return StandardDecomposition(r, i, k, inner, outer, 6 * r * r + cum[i], quasi_regular_area(*outer))


def perimeter_formula(r: int, i: int, k: int) -> int:
    return 6 * r + i + (k > 0) + (k > 0 and k % 2 == 0)


def standard_perimeter(A: int) -> int:
    d = standard_decomposition(A)
    if d.r == 0:
        return A + 2
    return perimeter_formula(d.r, d.i, d.k)


def standard_polyiamond(A: int) -> Polyiamond:
    if A < 1:
        raise ValueError("area must be >= 1")
    return Polyiamond(frozenset(spiral(A)))


def is_quasi_regular(P: Polyiamond) -> bool:
    idx = quasi_regular_index(area(P))
    if idx is None:
        return False
    return canonical_tuple(P) == canonical_tuple(quasi_regular_hexagon(*idx))


# --- gate-type attachments -----------------------------------------------------

def rhombus_attachments(H: Polyiamond, normal: int) -> list[Polyiamond]:
    """H plus an elementary rhombus (t_j, b_j) or (b_j, t_{j+1}) on one side."""
    t, b = bar_slots(H, normal)
    out = []
    for j in range(len(b)):
        out.append(H.union((t[j], b[j])))
        out.append(H.union((b[j], t[j + 1])))
    return out


def gap_attachments(H: Polyiamond, normal: int) -> list[Polyiamond]:
    """H plus two t-faces at triangular distance 2 on one side (b_j left empty)."""
    t, _ = bar_slots(H, normal)
    return [H.union((t[j], t[j + 1])) for j in range(len(t) - 1)]


def _hexagon_below(A: int) -> Polyiamond:
    idx = quasi_regular_index(A - 2)
    if idx is None:
        raise ValueError(f"{A - 2} is not the area of a quasi-regular hexagon")
    return quasi_regular_hexagon(*idx)


def defective_polyiamond(A: int) -> Polyiamond:
    H = _hexagon_below(A)
    normal = longest_sides(H)[0]
    shapes = gap_attachments(H, normal)
    if not shapes:
        raise ValueError("longest side too short for two units at distance 2")
    return shapes[0]


@lru_cache(maxsize=None)
def gate_shapes(A: int) -> tuple[frozenset, frozenset]:
    """Canonical tuples of every rhombus-type and gap-type attachment on a longest side."""
    H = _hexagon_below(A)
    s_type, d_type = set(), set()
    for n in longest_sides(H):
        s_type |= {canonical_tuple(P) for P in rhombus_attachments(H, n)}
        d_type |= {canonical_tuple(P) for P in gap_attachments(H, n)}
    return frozenset(s_type), frozenset(d_type)


# --- corner-cut hexagons ----------------------------------------------------------

@dataclass(frozen=True)
class HexagonParams:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        if min(a, b, c, d) < 0:
            raise ValueError("cut sizes must be non-negative")
        if a + b > d or a + c > d or b + c > d:
            raise ValueError("corner cuts overlap")
        if self.area < 1:
            raise ValueError("empty hexagon")

    @property
    def area(self) -> int:
        return self.d ** 2 - self.a ** 2 - self.b ** 2 - self.c ** 2

    @property
    def site_perimeter(self) -> int:
        return 3 * self.d - self.a - self.b - self.c


def valid_hexagon_params(d_max: int) -> list[HexagonParams]:
    out = []
    for d in range(1, d_max + 1):
        for a in range(d + 1):
            for b in range(d + 1 - a):
                for c in range(d + 1 - max(a, b)):
                    if d * d - a * a - b * b - c * c >= 1:
                        out.append(HexagonParams(a, b, c, d))
    return out


def hexagon_from_params(hp: HexagonParams) -> Polyiamond:
    a, b, c, d = hp.a, hp.b, hp.c, hp.d
    out = set()
    for x in range(d):
        for y in range(d - x):
            for o in (UP, DOWN):
                f = (x, y, o)
                vs = face_vertices(f)
                if any(i < 0 or j < 0 or i + j > d for i, j in vs):
                    continue
                if all(i + j <= a for i, j in vs):
                    continue
                if all(i >= d - b for i, _ in vs):
                    continue
                if all(j >= d - c for _, j in vs):
                    continue
                out.add(f)
    return Polyiamond(frozenset(out))


def hex_deficit(hp: HexagonParams) -> int:
    a, b, c, d = hp.a, hp.b, hp.c, hp.d
    return 3 * (d - a - b - c) ** 2 + 2 * ((a - b) ** 2 + (a - c) ** 2 + (b - c) ** 2)
