import itertools

import numpy as np
import pytest
import scipy.sparse as sp
import scipy.sparse.csgraph as csgraph
from hypothesis import given, settings, strategies as st

from hexmeta.energy import ModelParams
from hexmeta.exactchain import (
    build_state_space,
    capacity,
    communication_height,
    dirichlet_form,
    equilibrium_potential,
    exact_mean_hitting,
    flip_graph,
    gibbs,
    gibbs_and_balance_check,
    hitting_from_capacity,
    mean_hitting_times,
    minimax_heights,
    spectral_gap,
    stability_level,
    stability_levels,
    transition_matrix,
)
from hexmeta.hexlattice import SpinConfiguration

PARAMS = ModelParams(1.0, 0.5, 1.0)


@pytest.fixture(scope="module")
def space2():
    return build_state_space(2)


def test_invalid_size():
    for L in (1, 4):
        with pytest.raises(ValueError):
            build_state_space(L)


def test_state_space_energies(space2):
    rng = np.random.default_rng(0)
    for s in rng.integers(0, space2.n_states, 200):
        cfg = SpinConfiguration(space2.topo, space2.spins(int(s)))
        assert cfg.contour_length == space2.n_gamma[s]
        assert cfg.plus_count == space2.n_plus[s]
    assert space2.n_gamma[space2.minus] == space2.n_gamma[space2.plus] == 0


def test_transition_matrix_stochastic(space2):
    P = transition_matrix(space2, PARAMS)
    row = np.asarray(P.sum(axis=1)).ravel()
    assert np.allclose(row, 1.0, atol=1e-14)
    assert P.min() >= 0
    # at most n_sites + 1 entries per row
    assert np.diff(P.indptr).max() <= space2.n_sites + 1


def test_detailed_balance(space2):
    assert gibbs_and_balance_check(space2, PARAMS) <= 1e-12
    mu = gibbs(space2, PARAMS)
    P = transition_matrix(space2, PARAMS)
    assert np.allclose(mu @ P, mu, atol=1e-15)


def test_mean_hitting_matches_fundamental_matrix(space2):
    # independent route: E_x tau_y = (Z_yy - Z_xy) / mu_y with Z = (I - P + 1 mu^T)^{-1}
    P = transition_matrix(space2, PARAMS).toarray()
    mu = gibbs(space2, PARAMS)
    N = len(mu)
    Z = np.linalg.inv(np.eye(N) - P + np.outer(np.ones(N), mu))
    x, y = space2.minus, space2.plus
    ref = (Z[y, y] - Z[x, y]) / mu[y]
    got = exact_mean_hitting(space2, PARAMS, x, y)
    assert got == pytest.approx(ref, rel=1e-9)
    assert got == pytest.approx(85.98712951271236, rel=1e-12)
    m = mean_hitting_times(space2, PARAMS, y)
    assert m[y] == 0 and np.all(m[np.arange(N) != y] >= 1)


def test_mean_hitting_errors(space2):
    with pytest.raises(ValueError):
        exact_mean_hitting(space2, PARAMS, 3, 3)


def test_capacity_identities(space2):
    a, b = {space2.minus}, {space2.plus}
    c_ab = capacity(space2, PARAMS, a, b)
    c_ba = capacity(space2, PARAMS, b, a)
    assert abs(c_ab - c_ba) / c_ab <= 1e-10
    m = exact_mean_hitting(space2, PARAMS, space2.minus, space2.plus)
    assert abs(hitting_from_capacity(space2, PARAMS, space2.minus, space2.plus) - m) / m <= 1e-8


def test_equilibrium_potential_is_harmonic(space2):
    A, B = {space2.minus}, {space2.plus}
    P = transition_matrix(space2, PARAMS)
    h = equilibrium_potential(space2, PARAMS, A, B, P)
    assert h[space2.minus] == 1 and h[space2.plus] == 0
    assert np.all((h >= -1e-12) & (h <= 1 + 1e-12))
    free = np.ones(space2.n_states, dtype=bool)
    free[[space2.minus, space2.plus]] = False
    assert np.allclose((P @ h)[free], h[free], atol=1e-12)
    with pytest.raises(ValueError):
        equilibrium_potential(space2, PARAMS, A, A)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_dirichlet_principle(seed):
    # the equilibrium potential minimises the Dirichlet form under the boundary values
    space = build_state_space(2)
    P = transition_matrix(space, PARAMS)
    h = equilibrium_potential(space, PARAMS, {space.minus}, {space.plus}, P)
    cap = dirichlet_form(space, PARAMS, h, P)
    rng = np.random.default_rng(seed)
    f = h + 0.05 * rng.standard_normal(space.n_states)
    f[space.minus], f[space.plus] = 1.0, 0.0
    assert dirichlet_form(space, PARAMS, f, P) >= cap * (1 - 1e-12)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_capacity_monotone_in_sets(seed):
    space = build_state_space(2)
    rng = np.random.default_rng(seed)
    others = rng.choice(np.arange(1, space.n_states - 1), size=6, replace=False).tolist()
    A = {space.minus}
    A2 = A | set(others[:3])
    B = {space.plus}
    B2 = B | set(others[3:])
    c = capacity(space, PARAMS, A, B)
    assert capacity(space, PARAMS, A2, B) >= c * (1 - 1e-12)
    assert capacity(space, PARAMS, A, B2) >= c * (1 - 1e-12)


def test_mean_hitting_increases_with_beta(space2):
    vals = [exact_mean_hitting(space2, PARAMS.with_beta(b), space2.minus, space2.plus) for b in np.linspace(1, 3, 9)]
    assert all(x < y for x, y in zip(vals, vals[1:]))
    # at high temperature the walk is entropy-dominated and the curve dips first
    hot = [exact_mean_hitting(space2, PARAMS.with_beta(b), space2.minus, space2.plus) for b in (0.1, 0.7)]
    assert hot[0] > hot[1]


def test_spectral_gap(space2):
    g = spectral_gap(space2, PARAMS)
    assert 0 < g <= 1
    assert g == pytest.approx(0.021445, abs=5e-6)
    with pytest.raises(ValueError):
        spectral_gap(build_state_space(3), PARAMS)


def _brute_minimax(H, edges, s, t):
    """Minimax over all simple paths by depth-first enumeration."""
    adj = {i: set() for i in range(len(H))}
    for u, v in zip(*edges):
        adj[int(u)].add(int(v))
        adj[int(v)].add(int(u))
    best = np.inf
    stack = [(s, (s,), H[s])]
    while stack:
        x, seen, m = stack.pop()
        if x == t:
            best = min(best, m)
            continue
        for y in adj[x]:
            if y not in seen:
                stack.append((y, seen + (y,), max(m, H[y])))
    return best


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.15, 0.6))
def test_minimax_vs_simple_paths(seed, p):
    rng = np.random.default_rng(seed)
    n = 10
    H = rng.integers(-5, 6, n).astype(float)
    pairs = [(i, j) for i, j in itertools.combinations(range(n), 2) if rng.random() < p]
    edges = (np.array([a for a, _ in pairs], dtype=np.int64), np.array([b for _, b in pairs], dtype=np.int64))
    phi = minimax_heights(H, edges, 0)
    for t in range(n):
        assert phi[t] == _brute_minimax(H, edges, 0, t)


def _threshold_oracle(space, params, s, t):
    """Smallest level c such that s and t connect inside {H <= c}."""
    H = space.energies(params)
    u, v = flip_graph(space)
    for c in np.unique(H):
        keep = (H[u] <= c) & (H[v] <= c)
        G = sp.coo_matrix((np.ones(keep.sum()), (u[keep], v[keep])), shape=(len(H), len(H)))
        _, lab = csgraph.connected_components(G, directed=False)
        if H[s] <= c and H[t] <= c and lab[s] == lab[t]:
            return c
    return np.inf


def test_communication_height(space2):
    phi = communication_height(space2, PARAMS, space2.minus, space2.plus)
    assert phi == pytest.approx(_threshold_oracle(space2, PARAMS, space2.minus, space2.plus))
    assert phi == pytest.approx(3.5)
    assert communication_height(space2, PARAMS, 5, 5) == space2.energies(PARAMS)[5]


def test_stability_levels(space2):
    levels = stability_levels(space2, PARAMS)
    assert levels[space2.plus] == np.inf
    rng = np.random.default_rng(3)
    for s in [space2.minus] + rng.integers(0, space2.n_states, 40).tolist():
        assert levels[s] == pytest.approx(stability_level(space2, PARAMS, int(s)))
    assert np.all(levels[np.arange(space2.n_states) != space2.plus] >= 0)


def test_l3_mean_hitting():
    space = build_state_space(3)
    m = exact_mean_hitting(space, PARAMS, space.minus, space.plus)
    assert m == pytest.approx(226.6295, rel=1e-6)
    via = hitting_from_capacity(space, PARAMS, space.minus, space.plus)
    assert abs(via - m) / m <= 1e-8
    assert communication_height(space, PARAMS, space.minus, space.plus) == pytest.approx(4.5)
