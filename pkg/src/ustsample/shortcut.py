"""Exit-edge samplers for vertex sets.

For a set S and a start vertex v in S, ``P_v(e)`` is the probability that a
walk from v first leaves S through the boundary edge e. For fixed e the map
v -> P_v(e) is harmonic inside S, with boundary value 1 on the far side of e
and 0 across every other boundary edge, so one grounded Laplacian solve per
boundary edge gives a whole column of the table.

Solves are approximate. Each column carries a proven bound on its entrywise
error, and a draw only commits once the uniform threshold is outside every
uncertainty band; otherwise the tolerance is halved and the same threshold
is tried again.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import splu

from .graph import GraphError, Multigraph, as_mask, boundary, connected_components
from .linalg import DirichletSolver, dirichlet_matrix, pcg

EPS = np.finfo(float).eps


@dataclass
class SamplerStats:
    built: int = 0
    refinements: int = 0
    floor_hits: int = 0
    draws: int = 0
    solver_iterations: int = 0


class _Piece:
    """One connected piece of the interior of S and the boundary edges it touches."""

    def __init__(self, g: Multigraph, verts: np.ndarray, edges: np.ndarray, inner: np.ndarray,
                 tol: float, direct_limit: int, stats: SamplerStats):
        self.verts = verts
        self.edges = edges  # boundary edge ids, in increasing id order
        self.pos = {int(v): k for k, v in enumerate(verts.tolist())}
        M = dirichlet_matrix(g, verts)
        k = verts.size
        B = np.zeros((k, edges.size))
        B[[self.pos[int(u)] for u in inner], np.arange(edges.size)] = 1.0
        self.B = B
        self.M = M
        self.stats = stats
        self.direct = k <= direct_limit
        if self.direct:
            self._lu = splu(M.tocsc())
            t = self._lu.solve(np.ones(k))
        else:
            self._solver = DirichletSolver(M, precond="jacobi")
            t, _ = self._solver.solve_atol(np.ones(k), 1e-12 * np.sqrt(k))
            stats.solver_iterations += self._solver.iterations
        # entrywise |M^-1 r| <= max(M^-1 1) * ||r||_inf since M^-1 is nonnegative
        self.amplifier = 1.05 * float(np.max(np.abs(t)))
        self.floor = max(2.0**-40 * tol, 1e3 * EPS)
        self.X = None
        self._solve(tol)

    def _solve(self, tol: float):
        if self.direct:
            if self.X is None:
                X = self._lu.solve(self.B)
            else:
                # one round of iterative refinement
                X = self.X + self._lu.solve(self.B - self.M @ self.X)
        else:
            atol = tol / self.amplifier
            # a short-of-target solve is still usable: the bound below uses the true residual
            X, _, its = pcg(self.M.dot, self.B, self._solver._apply, atol,
                            self._solver.maxiter, x0=self.X)
            self.stats.solver_iterations += its
        R = self.B - self.M @ X
        err = self.amplifier * np.max(np.abs(R), axis=0) if R.size else np.zeros(0)
        self.X = X
        self.err = err
        self.prefix = np.cumsum(X, axis=1)
        self.band = np.cumsum(err)
        self.tol = tol

    def refine(self) -> bool:
        """Halve the tolerance and re-solve; False once the floor is reached."""
        if self.tol / 2 < self.floor:
            return False
        before = self.err.max() if self.err.size else 0.0
        self.stats.refinements += 1
        self._solve(self.tol / 2)
        if self.direct and self.err.size and self.err.max() >= before:
            # a direct solve that stopped improving is at working precision
            self.tol = 0.0
            return False
        return True

    def pick(self, row: int, r: float) -> tuple[int, bool]:
        """Index of the edge selected by threshold r, and whether it is certain."""
        prefix = self.prefix[row]
        band = self.band
        last = prefix.size - 1
        k = int(np.searchsorted(prefix, r, side="right"))
        k = min(k, last)
        lo_ok = k == 0 or r >= prefix[k - 1] + band[k - 1]
        # the last boundary is exactly 1 in truth
        hi_ok = k == last or r < prefix[k] - band[k]
        return k, bool(lo_ok and hi_ok)


class ShortcutSampler:
    """Samples the first exit edge of a walk started inside ``S``.

    Pieces are solved lazily, on the first request from a vertex inside
    them. Pieces up to ``direct_limit`` vertices use a sparse LU factorisation
    (refined iteratively); larger ones use Jacobi-preconditioned CG.
    """

    def __init__(self, g: Multigraph, S, tol: float = 1e-8, direct_limit: int = 50_000,
                 stats: SamplerStats | None = None):
        mask = as_mask(g, S).copy()
        if mask.all():
            raise GraphError("cannot exit the whole vertex set")
        self.g = g
        self.mask = mask
        self.tol = tol
        self.direct_limit = direct_limit
        self.stats = SamplerStats() if stats is None else stats
        bnd = boundary(g, mask)
        if bnd.size == 0:
            raise GraphError("set has no boundary edges")
        self.boundary_edges = bnd
        inner = np.where(mask[g.edge_u[bnd]], g.edge_u[bnd], g.edge_v[bnd])
        self._inner = inner
        comps = connected_components(g, restricted_to=mask)
        self.piece_of = np.full(g.n, -1, dtype=np.int64)
        for k, c in enumerate(comps):
            self.piece_of[c] = k
        self._comps = comps
        self._pieces: dict[int, _Piece] = {}
        self.stats.built += 1

    def piece(self, v: int) -> _Piece:
        k = int(self.piece_of[v])
        if k < 0:
            raise ValueError(f"vertex {v} is not in the set")
        p = self._pieces.get(k)
        if p is None:
            verts = self._comps[k]
            sel = self.piece_of[self._inner] == k
            p = _Piece(self.g, verts, self.boundary_edges[sel], self._inner[sel],
                       self.tol, self.direct_limit, self.stats)
            self._pieces[k] = p
        return p

    def probabilities(self, v: int) -> dict[int, float]:
        """Current estimate of P_v(e) over all of the boundary of S."""
        p = self.piece(v)
        out = dict.fromkeys(self.boundary_edges.tolist(), 0.0)
        out.update(zip(p.edges.tolist(), p.X[p.pos[v]].tolist()))
        return out

    def refine_to(self, v: int, tol: float) -> float:
        """Refine v's piece until every entry error bound is at most ``tol``."""
        p = self.piece(v)
        while p.err.size and p.err.max() > tol:
            if not p.refine():
                break
        return float(p.err.max()) if p.err.size else 0.0

    def sample_exit(self, v: int, rng) -> tuple[int, int]:
        """Draw a first-exit edge for a walk at v; returns (edge id, vertex outside S)."""
        p = self.piece(v)
        row = p.pos[v]
        r = rng.random()
        self.stats.draws += 1
        while True:
            k, certain = p.pick(row, r)
            if certain:
                break
            if not p.refine():
                self.stats.floor_hits += 1
                break
        e = int(p.edges[k])
        a, b = int(self.g.edge_u[e]), int(self.g.edge_v[e])
        return e, (b if self.mask[a] else a)


def first_exit_monte_carlo(g: Multigraph, S, v: int, rng, trials: int) -> dict[int, int]:
    """Exit-edge counts of faithful walks from v until they leave S."""
    mask = as_mask(g, S).tolist()
    adj_e, adj_n = g.adj_edges, g.adj_nbrs
    counts: dict[int, int] = {}
    rand = rng.random
    for _ in range(trials):
        w = v
        while True:
            edges = adj_e[w]
            k = int(rand() * len(edges))
            x = adj_n[w][k]
            if not mask[x]:
                e = edges[k]
                counts[e] = counts.get(e, 0) + 1
                break
            w = x
    return counts
