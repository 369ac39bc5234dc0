"""Laplacians, preconditioned conjugate gradient, voltages and resistances."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spilu, splu

from .graph import Multigraph

DEFAULT_TOL = 1e-8
DIRECT_LIMIT = 200_000


def _auto_precond(n: int) -> str:
    if n <= 200:
        return "jacobi"
    return "lu" if n <= DIRECT_LIMIT else "ilu"


class SolveError(RuntimeError):
    """The iteration cap was hit before the residual target was met."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(f"{message} (residual {residual:.3e} after {iterations} iterations)")
        self.residual = residual
        self.iterations = iterations


@dataclass
class SolveReport:
    x: np.ndarray
    residual: float
    iterations: int


def build_laplacian(g: Multigraph) -> sp.csr_matrix:
    """Graph Laplacian; parallel edges add to the off-diagonal weight."""
    live = g.edge_ids()
    a, b = g.edge_u[live], g.edge_v[live]
    rows = np.r_[a, b, a, b]
    cols = np.r_[b, a, a, b]
    ones = np.ones(live.size)
    data = np.r_[-ones, -ones, ones, ones]
    return sp.coo_matrix((data, (rows, cols)), shape=(g.n, g.n)).tocsr()


def default_maxiter(n: int) -> int:
    return int(20 * np.sqrt(n) + 200)


def _project(x: np.ndarray) -> np.ndarray:
    return x - x.mean(axis=0)


def pcg(
    matvec: Callable[[np.ndarray], np.ndarray],
    b: np.ndarray,
    precond: Callable[[np.ndarray], np.ndarray],
    atol: np.ndarray | float,
    maxiter: int,
    project: bool = False,
    x0: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Block-column PCG; stops each column once its residual 2-norm <= atol.

    With ``project`` the iteration is confined to the complement of the
    all-ones vector (singular Laplacian systems). Returns (x, residual norms,
    iterations).
    """
    squeeze = b.ndim == 1
    B = b.reshape(b.shape[0], -1).astype(float)
    k = B.shape[1]
    targets = np.broadcast_to(np.asarray(atol, dtype=float), (k,))
    X = np.zeros_like(B) if x0 is None else x0.reshape(B.shape).astype(float).copy()
    if project:
        X = _project(X)
    total = 0
    for _restart in range(3):
        R = B - matvec(X)
        if project:
            R = _project(R)
        norms = np.linalg.norm(R, axis=0)
        if np.all(norms <= targets):
            break
        Z = precond(R)
        P = Z.copy()
        rz = np.einsum("ij,ij->j", R, Z)
        it = 0
        while it < maxiter - total:
            done = norms <= targets
            if np.all(done):
                break
            AP = matvec(P)
            pap = np.einsum("ij,ij->j", P, AP)
            safe = (~done) & (pap > 0)
            alpha = np.where(safe, rz / np.where(safe, pap, 1.0), 0.0)
            X += alpha * P
            R -= alpha * AP
            if project:
                R = _project(R)
            norms = np.linalg.norm(R, axis=0)
            Z = precond(R)
            rz_new = np.einsum("ij,ij->j", R, Z)
            beta = np.where(rz > 0, rz_new / np.where(rz > 0, rz, 1.0), 0.0)
            P = Z + beta * P
            rz = rz_new
            it += 1
        total += it
        if total >= maxiter:
            break
    # recompute the true residual; recurrences drift
    R = B - matvec(X)
    if project:
        X = _project(X)
        R = _project(R)
    norms = np.linalg.norm(R, axis=0)
    if squeeze:
        return X[:, 0], norms, total
    return X, norms, total


class LaplacianSolver:
    """Reusable PCG solver for one Laplacian (pseudo-inverse representative).

    ``precond`` is ``"jacobi"``, ``"ilu"`` (incomplete LU of the matrix
    grounded at vertex 0), ``"lu"`` (its exact sparse LU, so PCG finishes in
    a step or two) or ``"auto"`` (Jacobi up to 200 vertices, then LU up to
    ``DIRECT_LIMIT``, then ILU).
    """

    def __init__(self, L: sp.spmatrix, precond: str = "auto", maxiter: int | None = None):
        self.L = sp.csr_matrix(L)
        self.n = self.L.shape[0]
        self.maxiter = default_maxiter(self.n) if maxiter is None else maxiter
        if precond == "auto":
            precond = _auto_precond(self.n)
        self.precond_kind = precond
        diag = self.L.diagonal().astype(float)
        diag[diag == 0] = 1.0
        if precond == "jacobi":
            inv = 1.0 / diag

            def apply(r):
                return _project(r * (inv if r.ndim == 1 else inv[:, None]))

        elif precond in ("ilu", "lu"):
            grounded = self.L[1:, 1:].tocsc()
            if precond == "lu":
                fact = splu(grounded)
            else:
                fact = spilu(grounded, drop_tol=1e-6, fill_factor=30)

            def apply(r):
                z = np.zeros_like(r)
                z[1:] = fact.solve(r[1:])
                return _project(z)

        else:
            raise ValueError(f"unknown preconditioner {precond!r}")
        self._apply = apply
        self.iterations = 0

    def solve(self, b: np.ndarray, tol: float = DEFAULT_TOL, x0=None) -> SolveReport:
        b = np.asarray(b, dtype=float)
        scale = np.abs(b).sum(axis=0)
        if np.any(np.abs(b.sum(axis=0)) > 1e-9 * (scale + 1.0)):
            raise ValueError("right-hand side must sum to zero")
        if self.n <= 1:
            return SolveReport(np.zeros_like(b), 0.0, 0)
        bnorm = np.linalg.norm(b, axis=0)
        x, res, its = pcg(
            self.L.dot, b, self._apply, tol * bnorm, self.maxiter, project=True, x0=x0
        )
        self.iterations += its
        worst = float(np.max(res / np.where(bnorm > 0, bnorm, 1.0))) if res.size else 0.0
        if np.any(res > tol * bnorm * (1 + 1e-6) + 1e-300):
            raise SolveError("Laplacian solve did not converge", worst, its)
        return SolveReport(x, worst, its)


def solve(L: sp.spmatrix, b: np.ndarray, tol: float = DEFAULT_TOL) -> SolveReport:
    """Solve ``L x = b`` for ``b`` orthogonal to the all-ones vector.

    The returned ``x`` is the mean-zero representative, with
    ``||Lx - b|| <= tol * ||b||`` per column.
    """
    return LaplacianSolver(L).solve(b, tol)


def effective_resistance(g: Multigraph, u: int, v: int, tol: float = DEFAULT_TOL) -> float:
    if u == v:
        raise ValueError("u and v must differ")
    b = np.zeros(g.n)
    b[u], b[v] = 1.0, -1.0
    x = solve(build_laplacian(g), b, tol).x
    return float(x[u] - x[v])


def effective_resistances(g: Multigraph, pairs, tol: float = DEFAULT_TOL, solver=None) -> np.ndarray:
    """Resistances for many (u, v) pairs with one block solve."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if solver is None:
        solver = LaplacianSolver(build_laplacian(g))
    out = np.zeros(len(pairs))
    nz = pairs[:, 0] != pairs[:, 1]
    if not np.any(nz):
        return out
    idx = np.flatnonzero(nz)
    B = np.zeros((g.n, idx.size))
    B[pairs[idx, 0], np.arange(idx.size)] += 1.0
    B[pairs[idx, 1], np.arange(idx.size)] -= 1.0
    X = solver.solve(B, tol).x
    cols = np.arange(idx.size)
    out[idx] = X[pairs[idx, 0], cols] - X[pairs[idx, 1], cols]
    return out


def dirichlet_matrix(g: Multigraph, inside: np.ndarray) -> sp.csr_matrix:
    """``D - A`` restricted to the vertices ``inside`` (in the given order).

    Degrees are full degrees in g, so the matrix is the Laplacian with every
    outside vertex grounded. Nonsingular when each connected piece of
    ``inside`` has an edge leaving it.
    """
    inside = np.asarray(inside, dtype=np.int64)
    pos = np.full(g.n, -1, dtype=np.int64)
    pos[inside] = np.arange(inside.size)
    live = g.edge_ids()
    a, b = pos[g.edge_u[live]], pos[g.edge_v[live]]
    both = (a >= 0) & (b >= 0)
    a, b = a[both], b[both]
    deg = g.degrees()[inside].astype(float)
    rows = np.r_[a, b, np.arange(inside.size)]
    cols = np.r_[b, a, np.arange(inside.size)]
    data = np.r_[-np.ones(a.size), -np.ones(b.size), deg]
    return sp.coo_matrix((data, (rows, cols)), shape=(inside.size, inside.size)).tocsr()


class DirichletSolver:
    """PCG for a nonsingular grounded Laplacian ``M``."""

    def __init__(self, M: sp.spmatrix, precond: str = "auto", maxiter: int | None = None):
        self.M = sp.csr_matrix(M)
        self.n = self.M.shape[0]
        self.maxiter = default_maxiter(self.n) if maxiter is None else maxiter
        if precond == "auto":
            precond = _auto_precond(self.n)
        self.precond_kind = precond
        if precond == "jacobi":
            inv = 1.0 / self.M.diagonal()

            def apply(r):
                return r * (inv if r.ndim == 1 else inv[:, None])

        elif precond == "lu":
            apply = splu(self.M.tocsc()).solve
        elif precond == "ilu":
            apply = spilu(self.M.tocsc(), drop_tol=1e-6, fill_factor=30).solve
        else:
            raise ValueError(f"unknown preconditioner {precond!r}")
        self._apply = apply
        self.iterations = 0

    def solve_atol(self, B: np.ndarray, atol, x0=None) -> tuple[np.ndarray, np.ndarray]:
        """Solve to absolute residual 2-norm ``atol`` per column."""
        X, res, its = pcg(self.M.dot, np.asarray(B, dtype=float), self._apply, atol, self.maxiter, x0=x0)
        self.iterations += its
        if np.any(res > np.asarray(atol) * (1 + 1e-6) + 1e-300):
            raise SolveError("grounded solve did not converge", float(np.max(res)), its)
        return X, res


def harmonic_voltages(g: Multigraph, source: int, sink: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Voltages with ``source`` held at 1 and ``sink`` at 0, harmonic elsewhere."""
    if source == sink:
        raise ValueError("source and sink must differ")
    q = np.zeros(g.n)
    q[source] = 1.0
    inner = np.array([v for v in range(g.n) if v != source and v != sink], dtype=np.int64)
    if inner.size == 0:
        return q
    M = dirichlet_matrix(g, inner)
    rhs = np.zeros(inner.size)
    pos = np.full(g.n, -1, dtype=np.int64)
    pos[inner] = np.arange(inner.size)
    for w in g.adj_nbrs[source]:
        if pos[w] >= 0:
            rhs[pos[w]] += 1.0
    solver = DirichletSolver(M)
    x, _ = solver.solve_atol(rhs, tol * max(np.linalg.norm(rhs), 1.0))
    q[inner] = x
    return q
