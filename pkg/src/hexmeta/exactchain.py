"""Exact computations on the full state space of a tiny torus (L = 2 or 3).

States are integers whose bit ``i`` is set when site ``i`` carries a plus
spin.  For L = 2 everything is dense; for L = 3 (2^18 states) the
transition matrix is sparse and linear systems are solved by conjugate
gradients on the symmetrised generator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.csgraph as csgraph
import scipy.sparse.linalg as spla

from .energy import ModelParams
from .hexlattice import LatticeTopology, build_topology


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class StateSpace:
    L: int
    topo: LatticeTopology
    n_sites: int
    n_states: int
    n_gamma: np.ndarray  # per state
    n_plus: np.ndarray

    @property
    def minus(self) -> int:
        return 0

    @property
    def plus(self) -> int:
        return self.n_states - 1

    def energies(self, params: ModelParams) -> np.ndarray:
        return params.J * self.n_gamma - params.h * self.n_plus

    def spins(self, state: int) -> np.ndarray:
        bits = (state >> np.arange(self.n_sites)) & 1
        return np.where(bits == 1, 1, -1).astype(np.int8)


def build_state_space(L: int) -> StateSpace:
    if L not in (2, 3):
        raise ValueError("exact state spaces are supported for L in {2, 3}")
    topo = build_topology(L)
    n = topo.site_count
    states = np.arange(1 << n, dtype=np.int64)
    bits = ((states[:, None] >> np.arange(n)) & 1).astype(np.int8)
    n_plus = bits.sum(axis=1).astype(np.int64)
    e = topo.edges
    n_gamma = (bits[:, e[:, 0]] != bits[:, e[:, 1]]).sum(axis=1).astype(np.int64)
    return StateSpace(L, topo, n, 1 << n, n_gamma, n_plus)


def gibbs(space: StateSpace, params: ModelParams) -> np.ndarray:
    H = space.energies(params)
    w = np.exp(-params.beta * (H - H.min()))
    return w / w.sum()


def transition_matrix(space: StateSpace, params: ModelParams) -> sp.csr_matrix:
    """Metropolis kernel: uniform site, accept with min(1, exp(-beta dH))."""
    N, n = space.n_states, space.n_sites
    H = space.energies(params)
    src = np.arange(N, dtype=np.int64)
    rows, cols, vals = [], [], []
    for i in range(n):
        dst = src ^ (1 << i)
        p = np.exp(-params.beta * np.maximum(H[dst] - H, 0.0)) / n
        rows.append(src)
        cols.append(dst)
        vals.append(p)
    off = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(N, N))
    diag = 1.0 - np.asarray(off.sum(axis=1)).ravel()
    return (off + sp.diags(diag)).tocsr()


def gibbs_and_balance_check(space: StateSpace, params: ModelParams) -> float:
    """Largest relative detailed-balance violation over all single-flip pairs."""
    mu = gibbs(space, params)
    P = transition_matrix(space, params).tocoo()
    mask = P.row != P.col
    r, c, v = P.row[mask], P.col[mask], P.data[mask]
    flow = mu[r] * v
    back = mu[c] * np.asarray(transition_matrix(space, params)[c, r]).ravel()
    scale = np.maximum(np.abs(flow), np.abs(back))
    ok = scale > 0
    return float(np.max(np.abs(flow - back)[ok] / scale[ok]))


def _solve_restricted(
    space: StateSpace, params: ModelParams, free: np.ndarray, rhs: np.ndarray, P: sp.csr_matrix | None = None
) -> np.ndarray:
    """Solve (I - P)_{free,free} x = rhs."""
    if P is None:
        P = transition_matrix(space, params)
    idx = np.flatnonzero(free)
    Pff = P[idx][:, idx]
    M = sp.identity(len(idx), format="csr") - Pff
    if space.L == 2:
        x = np.linalg.solve(M.toarray(), rhs)
    else:
        # symmetrise with the Gibbs weights: S = D^{1/2} M D^{-1/2}
        mu = gibbs(space, params)[idx]
        d = np.sqrt(mu)
        dinv = 1.0 / d
        S = sp.diags(d) @ M @ sp.diags(dinv)
        S = ((S + S.T) * 0.5).tocsr()
        b = d * rhs
        y, info = spla.cg(S, b, rtol=1e-13, atol=0.0, maxiter=200000)
        if info != 0:
            raise SolverError(f"conjugate gradient did not converge (info={info})")
        x = dinv * y
    res = np.linalg.norm(M @ x - rhs) / max(np.linalg.norm(rhs), 1e-300)
    if res > 1e-10:
        raise SolverError(f"relative residual {res:.2e} exceeds 1e-10")
    return x


def mean_hitting_times(space: StateSpace, params: ModelParams, target: set | int) -> np.ndarray:
    """Expected number of steps to hit ``target`` from every state (0 on the target)."""
    tgt = np.zeros(space.n_states, dtype=bool)
    tgt[list(target) if isinstance(target, (set, frozenset, list, tuple)) else [target]] = True
    free = ~tgt
    m = np.zeros(space.n_states)
    m[free] = _solve_restricted(space, params, free, np.ones(int(free.sum())))
    return m


def exact_mean_hitting(space: StateSpace, params: ModelParams, source: int, target: int) -> float:
    if source == target:
        raise ValueError("source and target must differ")
    return float(mean_hitting_times(space, params, target)[source])


def equilibrium_potential(space: StateSpace, params: ModelParams, A, B, P=None) -> np.ndarray:
    A = np.asarray(sorted(A), dtype=np.int64)
    B = np.asarray(sorted(B), dtype=np.int64)
    if len(A) == 0 or len(B) == 0 or np.intersect1d(A, B).size:
        raise ValueError("A and B must be disjoint and non-empty")
    if P is None:
        P = transition_matrix(space, params)
    hA = np.zeros(space.n_states)
    hA[A] = 1.0
    free = np.ones(space.n_states, dtype=bool)
    free[A] = False
    free[B] = False
    if free.any():
        idx = np.flatnonzero(free)
        rhs = np.asarray(P[idx][:, A].sum(axis=1)).ravel()
        hA[idx] = _solve_restricted(space, params, free, rhs, P)
    return hA


def dirichlet_form(space: StateSpace, params: ModelParams, f: np.ndarray, P=None) -> float:
    if P is None:
        P = transition_matrix(space, params)
    mu = gibbs(space, params)
    C = P.tocoo()
    mask = C.row != C.col
    r, c, v = C.row[mask], C.col[mask], C.data[mask]
    return float(0.5 * np.sum(mu[r] * v * (f[r] - f[c]) ** 2))


def capacity(space: StateSpace, params: ModelParams, A, B) -> float:
    P = transition_matrix(space, params)
    return dirichlet_form(space, params, equilibrium_potential(space, params, A, B, P), P)


def hitting_from_capacity(space: StateSpace, params: ModelParams, source: int, target: int) -> float:
    """sum_x mu(x) h(x) / CAP(source, target), h the equilibrium potential of (source, target)."""
    P = transition_matrix(space, params)
    hA = equilibrium_potential(space, params, {source}, {target}, P)
    mu = gibbs(space, params)
    return float(np.dot(mu, hA) / dirichlet_form(space, params, hA, P))


def spectral_gap(space: StateSpace, params: ModelParams) -> float:
    if space.L != 2:
        raise ValueError("spectral gap is computed only for L = 2")
    mu = gibbs(space, params)
    P = transition_matrix(space, params).toarray()
    d = np.sqrt(mu)
    S = (d[:, None] * P) / d[None, :]
    ev = np.linalg.eigvalsh((S + S.T) / 2)
    return float(1.0 - ev[-2])


# --- bottleneck landscape -------------------------------------------------------

def flip_graph(space: StateSpace) -> tuple[np.ndarray, np.ndarray]:
    """All undirected single-flip edges (u, v) with u < v."""
    src = np.arange(space.n_states, dtype=np.int64)
    us, vs = [], []
    for i in range(space.n_sites):
        dst = src ^ (1 << i)
        keep = src < dst
        us.append(src[keep])
        vs.append(dst[keep])
    return np.concatenate(us), np.concatenate(vs)


def minimax_heights(H: np.ndarray, edges: tuple[np.ndarray, np.ndarray], source: int) -> np.ndarray:
    """Phi(source, x) for every node x: min over paths of the max node weight.

    A node-weighted minimax path is an edge-weighted one with weight
    max(H(u), H(v)); a minimum spanning tree contains such a path between
    every pair.  Nodes unreachable from ``source`` get +inf.
    """
    u, v = edges
    w = np.maximum(H[u], H[v])
    shift = w.min() - 1.0 if len(w) else 0.0
    n = len(H)
    G = sp.coo_matrix((w - shift, (u, v)), shape=(n, n)).tocsr()
    T = csgraph.minimum_spanning_tree(G)
    T = (T + T.T).tocsr()
    order, pred = csgraph.breadth_first_order(T, source, directed=False, return_predecessors=True)
    phi = np.full(n, np.inf)
    phi[source] = H[source]
    for x in order[1:]:
        phi[x] = max(phi[pred[x]], H[x])
    return phi


def communication_height(space: StateSpace, params: ModelParams, s: int, t: int) -> float:
    if s == t:
        return float(space.energies(params)[s])
    H = space.energies(params)
    return float(minimax_heights(H, flip_graph(space), s)[t])


def stability_level(space: StateSpace, params: ModelParams, s: int, tol: float = 1e-9) -> float:
    """Phi(s, I_s) - H(s) with I_s the states strictly below H(s); +inf if none."""
    H = space.energies(params)
    lower = H < H[s] - tol
    if not lower.any():
        return float("inf")
    phi = minimax_heights(H, flip_graph(space), s)
    return float(phi[lower].min() - H[s])


def stability_levels(space: StateSpace, params: ModelParams, tol: float = 1e-9) -> np.ndarray:
    """Stability level of every state in one Kruskal sweep.

    Edges are merged in increasing order of max(H(u), H(v)).  A component's
    unresolved states are exactly its minima; when it merges with a
    component whose minimum is strictly lower, they get level w - H.
    """
    H = space.energies(params)
    n = space.n_states
    u, v = flip_graph(space)
    w = np.maximum(H[u], H[v])
    parent = np.arange(n)
    low = H.copy()
    pending: dict[int, list[int]] = {i: [i] for i in range(n)}
    out = np.full(n, np.inf)

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for k in np.argsort(w, kind="stable"):
        a, b = find(int(u[k])), find(int(v[k]))
        if a == b:
            continue
        if low[b] < low[a] - tol:
            a, b = b, a
        # now low[a] <= low[b] + tol
        if low[a] < low[b] - tol:
            for s in pending.pop(b):
                out[s] = w[k] - H[s]
        else:
            pending[a].extend(pending.pop(b))
        parent[b] = a
        low[a] = min(low[a], low[b])
    return out
