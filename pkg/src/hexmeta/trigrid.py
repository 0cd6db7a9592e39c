"""Planar triangular-lattice primitives.

A face is a tuple ``(x, y, o)`` where ``o = 0`` is an up-triangle and
``o = 1`` a down-triangle.  Vertices live on the integer lattice with
basis ``e1 = (1, 0)`` and ``e2 = (1/2, sqrt(3)/2)``.

    up(x, y)   has vertices (x, y), (x+1, y), (x, y+1)
    down(x, y) has vertices (x+1, y), (x, y+1), (x+1, y+1)

The hexagonal lattice sites are the face centres; two sites are
neighbours iff their faces share an edge.
"""

from __future__ import annotations

import math
from typing import Iterable

Face = tuple[int, int, int]
Vertex = tuple[int, int]
Edge = tuple[Vertex, Vertex]

UP = 0
DOWN = 1

SQRT3_2 = math.sqrt(3.0) / 2.0

# neighbour offsets (dx, dy) per orientation; the neighbour has the other orientation
NEIGHBOR_OFFSETS = (
    ((0, 0), (-1, 0), (0, -1)),
    ((0, 0), (1, 0), (0, 1)),
)


def face_vertices(f: Face) -> tuple[Vertex, Vertex, Vertex]:
    x, y, o = f
    if o == UP:
        return (x, y), (x + 1, y), (x, y + 1)
    return (x + 1, y), (x, y + 1), (x + 1, y + 1)


def face_neighbors(f: Face) -> tuple[Face, Face, Face]:
    x, y, o = f
    (a, b), (c, d), (e, g) = NEIGHBOR_OFFSETS[o]
    q = 1 - o
    return (x + a, y + b, q), (x + c, y + d, q), (x + e, y + g, q)


def face_from_vertices(v0: Vertex, v1: Vertex, v2: Vertex) -> Face:
    sx = v0[0] + v1[0] + v2[0]
    sy = v0[1] + v1[1] + v2[1]
    if sx % 3 == 1 and sy % 3 == 1:
        return ((sx - 1) // 3, (sy - 1) // 3, UP)
    if sx % 3 == 2 and sy % 3 == 2:
        return ((sx - 2) // 3, (sy - 2) // 3, DOWN)
    raise ValueError("vertices do not span a unit triangle")


def faces_around_vertex(v: Vertex) -> tuple[Face, ...]:
    """The six faces incident to ``v`` in counter-clockwise order."""
    i, j = v
    return (
        (i, j, UP),
        (i - 1, j, DOWN),
        (i - 1, j, UP),
        (i - 1, j - 1, DOWN),
        (i, j - 1, UP),
        (i, j - 1, DOWN),
    )


def shared_edge(f: Face, g: Face) -> Edge:
    common = sorted(set(face_vertices(f)) & set(face_vertices(g)))
    if len(common) != 2:
        raise ValueError("faces are not edge-adjacent")
    return common[0], common[1]


def vertex_xy(v: Vertex) -> tuple[float, float]:
    return v[0] + 0.5 * v[1], SQRT3_2 * v[1]


def face_centroid(f: Face) -> tuple[float, float]:
    x, y, o = f
    if o == UP:
        return x + 0.5 + 0.5 * y, SQRT3_2 * (y + 1.0 / 3.0)
    return x + 1.0 + 0.5 * y, SQRT3_2 * (y + 2.0 / 3.0)


def hex_norm(v: Vertex) -> int:
    """Graph distance from the origin vertex on the triangular lattice."""
    i, j = v
    return (abs(i) + abs(j) + abs(i + j)) // 2


# --- point group -----------------------------------------------------------

def rotate60(f: Face) -> Face:
    # vertex map (i, j) -> (-j, i + j)
    x, y, o = f
    if o == UP:
        return (-y - 1, x + y, DOWN)
    return (-y - 1, x + y + 1, UP)


def reflect(f: Face) -> Face:
    # vertex map (i, j) -> (j, i)
    x, y, o = f
    return (y, x, o)


def isometry(f: Face, k: int) -> Face:
    """Apply point-group element ``k`` in 0..11 (rotations, then reflected rotations)."""
    if k >= 6:
        f = reflect(f)
        k -= 6
    for _ in range(k):
        f = rotate60(f)
    return f


def transform(faces: Iterable[Face], k: int) -> list[Face]:
    return [isometry(f, k) for f in faces]


def translate(faces: Iterable[Face], dx: int, dy: int) -> list[Face]:
    return [(x + dx, y + dy, o) for x, y, o in faces]


def normalize(faces: Iterable[Face]) -> tuple[Face, ...]:
    """Translate so the minimal x and minimal y are both 0, then sort."""
    fs = list(faces)
    mx = min(f[0] for f in fs)
    my = min(f[1] for f in fs)
    return tuple(sorted((x - mx, y - my, o) for x, y, o in fs))


def canonical_key(faces: Iterable[Face]) -> tuple[Face, ...]:
    fs = list(faces)
    return min(normalize(transform(fs, k)) for k in range(12))
