"""Random-projection embedding of the effective resistance metric.

Each vertex gets ``k`` coordinates; squared distances between coordinate
vectors approximate effective resistances up to a (1 +- eps) factor with
high probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Multigraph
from .linalg import LaplacianSolver, build_laplacian


def embedding_dimension(m: int, epsilon: float, c: float = 4.0) -> int:
    return max(1, math.ceil(c * math.log(max(m, 1)) / epsilon**2))


@dataclass(frozen=True)
class ResistanceEmbedding:
    coords: np.ndarray  # (n, k)
    epsilon: float
    seed: object
    solver_iterations: int = 0

    @property
    def dimension(self) -> int:
        return self.coords.shape[1]

    def distance(self, u: int, v: int) -> float:
        if u == v:
            return 0.0
        d = self.coords[u] - self.coords[v]
        return float(d @ d)

    def distances_from(self, u: int, vs) -> np.ndarray:
        d = self.coords[np.asarray(vs, dtype=np.int64)] - self.coords[u]
        return np.einsum("ij,ij->i", d, d)


def build_embedding(
    g: Multigraph, epsilon: float = 0.5, seed=0, c: float = 4.0, tol: float = 1e-8
) -> ResistanceEmbedding:
    """Project signed edge incidences with a random +-1/sqrt(k) matrix and
    map them through the Laplacian pseudo-inverse (one solve per coordinate)."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    k = embedding_dimension(g.m, epsilon, c)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    live = g.edge_ids()
    if g.n <= 1 or live.size == 0:
        return ResistanceEmbedding(np.zeros((g.n, k)), epsilon, seed)
    signs = rng.integers(0, 2, size=(live.size, k)) * 2.0 - 1.0
    signs /= math.sqrt(k)
    # column j of rhs is B^T q_j with B the signed incidence matrix
    rhs = np.zeros((g.n, k))
    np.add.at(rhs, g.edge_u[live], signs)
    np.add.at(rhs, g.edge_v[live], -signs)
    solver = LaplacianSolver(build_laplacian(g))
    report = solver.solve(rhs, tol)
    return ResistanceEmbedding(report.x, epsilon, seed, report.iterations)


def approx_resistance(emb: ResistanceEmbedding, u: int, v: int) -> float:
    return emb.distance(u, v)
