import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hexmeta.hexlattice import (
    CLUSTER,
    HOLE,
    MINUS_STRIP,
    PLUS_STRIP,
    SEA,
    TORUS_SPANNING,
    SpinConfiguration,
    build_topology,
    clusters,
    contour_length,
)
from hexmeta.polyiamond import Polyiamond, canonical_tuple, regular_hexagon
from hexmeta.trigrid import face_vertices


def _vertex_faces_oracle(L):
    """Torus faces as sets of vertices mod L; adjacency = two shared vertices."""
    faces = {}
    for row in range(L):
        for col in range(L):
            for o in (0, 1):
                vs = frozenset(((i % L), (j % L)) for i, j in face_vertices((col, row, o)))
                faces[2 * (row * L + col) + o] = vs
    return faces


@pytest.mark.parametrize("L,pairs", [(2, 12), (3, 27), (5, 75)])
def test_counts(L, pairs):
    topo = build_topology(L)
    assert topo.site_count == 2 * L * L
    assert len(topo.edges) == pairs
    assert len({tuple(e) for e in topo.edges}) == pairs


@pytest.mark.parametrize("L", [3, 4, 7])
def test_neighbors_match_shared_edges(L):
    # for L >= 3 two distinct torus faces share at most one edge
    topo = build_topology(L)
    oracle = _vertex_faces_oracle(L)
    for s in range(topo.site_count):
        nb = set(topo.neighbor_table[s].tolist())
        assert len(nb) == 3
        expected = {t for t in oracle if t != s and len(oracle[s] & oracle[t]) == 2}
        assert nb == expected
        for t in nb:
            assert s in topo.neighbor_table[t]


def test_face_bijection():
    topo = build_topology(4)
    coords = {tuple(c) for c in topo.face_coords.tolist()}
    assert len(coords) == topo.site_count
    for s in range(topo.site_count):
        assert topo.site_of_face(topo.planar_face(s)) == s


def test_invalid_size():
    with pytest.raises(ValueError):
        build_topology(1)


def test_deterministic_tables():
    a, b = build_topology(5), build_topology(5)
    assert np.array_equal(a.neighbor_table, b.neighbor_table)
    assert not a.neighbor_table.flags.writeable


def _place(topo, faces, dx=3, dy=3):
    return SpinConfiguration.from_plus_sites(topo, [topo.site_of_face((x + dx, y + dy, o)) for x, y, o in faces])


def test_contour_examples():
    topo = build_topology(6)
    assert contour_length(SpinConfiguration.all_minus(topo)) == 0
    assert contour_length(SpinConfiguration.from_plus_sites(topo, [5])) == 3
    assert _place(topo, regular_hexagon(1).faces).contour_length == 6


def test_clusters_trivial():
    topo = build_topology(5)
    dec = clusters(SpinConfiguration.all_minus(topo))
    assert dec.components == [] and dec.minus_wrap_class == [SEA]
    dec = clusters(SpinConfiguration.from_plus_sites(topo, [7]))
    assert [len(c) for c in dec.components] == [1] and dec.wrap_class == [CLUSTER]
    dec = clusters(SpinConfiguration.all_plus(topo))
    assert dec.wrap_class == [TORUS_SPANNING] and dec.minus_components == []


def test_row_strip():
    L = 6
    topo = build_topology(L)
    row = [topo.site_of(2, c, o) for c in range(L) for o in (0, 1)]
    cfg = SpinConfiguration.from_plus_sites(topo, row)
    dec = clusters(cfg)
    assert dec.wrap_class == [PLUS_STRIP]
    assert dec.minus_wrap_class == [MINUS_STRIP]
    # a strip has straight boundaries of length L on both sides
    assert cfg.contour_length == 2 * L


def test_diagonal_strip():
    L = 5
    topo = build_topology(L)
    # the faces around the line x + y = const wrap along the (1, -1) direction
    sites = [topo.site_of(r, (3 - r) % L, o) for r in range(L) for o in (0, 1)]
    sites += [topo.site_of(r, (4 - r) % L, 0) for r in range(L)]
    dec = clusters(SpinConfiguration.from_plus_sites(topo, sites))
    assert len(dec.components) == 1 and dec.wrap_class == [PLUS_STRIP]


def test_hole_detection():
    topo = build_topology(6)
    ring = [g for g in regular_hexagon(2).faces if g != (0, 0, 0)]
    dec = clusters(_place(topo, ring))
    assert sorted(dec.minus_wrap_class) == sorted([HOLE, SEA])
    assert any(len(c) == 1 for c in dec.minus_components)


def test_vertex_touching_faces_are_separate():
    topo = build_topology(6)
    # up(0,0) and up(1,0) share only a vertex
    dec = clusters(_place(topo, [(0, 0, 0), (1, 0, 0)]))
    assert len(dec.components) == 2


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.05, 0.6))
def test_incremental_contour_matches_recompute(seed, p):
    topo = build_topology(4)
    rng = np.random.default_rng(seed)
    cfg = SpinConfiguration(topo, np.where(rng.random(topo.site_count) < p, 1, -1))
    for s in rng.integers(0, topo.site_count, 50):
        cfg.flip(int(s))
        assert cfg.contour_length == contour_length(cfg)
        assert cfg.plus_count == int((cfg.spins > 0).sum())


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 7), st.integers(0, 7))
def test_clusters_translation_invariant(seed, dx, dy):
    L = 8
    topo = build_topology(L)
    rng = np.random.default_rng(seed)
    plus = rng.choice(topo.site_count, size=int(rng.integers(1, 30)), replace=False)
    cfg = SpinConfiguration.from_plus_sites(topo, plus)
    shifted = []
    for s in plus:
        x, y, o = topo.planar_face(int(s))
        shifted.append(topo.site_of_face((x + dx, y + dy, o)))
    cfg2 = SpinConfiguration.from_plus_sites(topo, shifted)

    def shapes(c):
        dec = clusters(c)
        return sorted(
            (w, canonical_tuple(lf.values()) if w == CLUSTER else len(comp))
            for comp, w, lf in zip(dec.components, dec.wrap_class, dec.lifted)
        )

    assert shapes(cfg) == shapes(cfg2)
    dec = clusters(cfg)
    if all(w == CLUSTER for w in dec.wrap_class):
        assert sum(len(c) for c in dec.components) == cfg.plus_count
        for lf in dec.lifted:
            Polyiamond.of(lf.values())  # lifted faces stay edge-connected in the plane
