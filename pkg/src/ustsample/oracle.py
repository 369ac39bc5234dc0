"""Exact ground truth for small graphs and the statistics used to compare against it."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np
from scipy import stats

from .graph import Multigraph, UnionFind, is_connected

ENUMERATION_LIMIT = 1_000_000


class OracleError(ValueError):
    pass


def _laplacian_int(g: Multigraph) -> list[list[int]]:
    L = [[0] * g.n for _ in range(g.n)]
    for a, b in g.edge_pairs():
        L[a][a] += 1
        L[b][b] += 1
        L[a][b] -= 1
        L[b][a] -= 1
    return L


def bareiss_determinant(M: list[list[int]]) -> int:
    """Exact integer determinant by fraction-free elimination."""
    A = [row[:] for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if A[r][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def count_spanning_trees(g: Multigraph) -> int:
    """Matrix-tree count: determinant of the Laplacian with row/column 0 removed."""
    if g.n <= 1:
        return 1
    L = _laplacian_int(g)
    return bareiss_determinant([row[1:] for row in L[1:]])


@dataclass
class TreeCatalog:
    trees: list[tuple[int, ...]]
    index: dict[tuple[int, ...], int]

    @property
    def count(self) -> int:
        return len(self.trees)

    def lookup(self, edges: Iterable[int]) -> int:
        return self.index[tuple(sorted(int(e) for e in edges))]


def enumerate_spanning_trees(g: Multigraph, limit: int = ENUMERATION_LIMIT) -> TreeCatalog:
    """All spanning trees as sorted edge-id tuples (include/exclude backtracking)."""
    total = count_spanning_trees(g)
    if total > limit:
        raise OracleError(f"{total} spanning trees exceeds the enumeration limit {limit}")
    edges = g.edge_ids().tolist()
    n = g.n
    out: list[tuple[int, ...]] = []

    def connected_without(banned: set) -> bool:
        uf = UnionFind(n)
        comps = n
        for e in edges:
            if e not in banned and uf.union(int(g.edge_u[e]), int(g.edge_v[e])):
                comps -= 1
        return comps == 1

    def rec(pos: int, chosen: list[int], uf_parent: list[int], banned: set):
        if len(chosen) == n - 1:
            out.append(tuple(sorted(chosen)))
            return
        if pos == len(edges):
            return
        e = edges[pos]
        a, b = int(g.edge_u[e]), int(g.edge_v[e])
        uf = UnionFind(n)
        uf.parent = uf_parent[:]
        ra, rb = uf.find(a), uf.find(b)
        if ra != rb:
            uf.parent[ra] = rb
            rec(pos + 1, chosen + [e], uf.parent, banned)
        banned.add(e)
        if connected_without(banned):
            rec(pos + 1, chosen, uf_parent, banned)
        banned.discard(e)

    if n <= 1:
        out.append(())
    else:
        rec(0, [], list(range(n)), set())
    out.sort()
    if len(out) != total:
        raise OracleError("enumeration disagrees with the matrix-tree count")
    return TreeCatalog(out, {t: k for k, t in enumerate(out)})


def exact_solve(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Gauss-Jordan over the rationals for a nonsingular system."""
    n = len(A)
    M = [list(map(Fraction, row)) + [Fraction(x)] for row, x in zip(A, b)]
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [x / piv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [M[r][n] for r in range(n)]


def exact_resistance(g: Multigraph, u: int, v: int) -> Fraction:
    """R_eff(u, v) by a rational solve of the Laplacian grounded at v."""
    if u == v:
        return Fraction(0)
    if not is_connected(g):
        raise OracleError("graph must be connected")
    L = _laplacian_int(g)
    keep = [w for w in range(g.n) if w != v]
    A = [[Fraction(L[i][j]) for j in keep] for i in keep]
    b = [Fraction(1 if w == u else 0) for w in keep]
    x = exact_solve(A, b)
    return x[keep.index(u)]


def exact_edge_marginals(g: Multigraph, catalog: TreeCatalog | None = None) -> dict[int, Fraction]:
    """P(e in T) for each live edge, counted over the enumerated trees."""
    catalog = enumerate_spanning_trees(g) if catalog is None else catalog
    c = Counter(e for t in catalog.trees for e in t)
    return {int(e): Fraction(c[int(e)], catalog.count) for e in g.edge_ids()}


def exact_marginal_distribution(g: Multigraph, f_star, catalog: TreeCatalog | None = None) -> dict:
    """Distribution of T intersected with ``f_star`` (keys are sorted tuples)."""
    catalog = enumerate_spanning_trees(g) if catalog is None else catalog
    fs = set(int(e) for e in f_star)
    c = Counter(tuple(e for e in t if e in fs) for t in catalog.trees)
    return {k: Fraction(v, catalog.count) for k, v in c.items()}


def exact_exit_probabilities(g: Multigraph, inside, v: int) -> dict[int, Fraction]:
    """Probability that a walk from v in ``inside`` first leaves it via each boundary edge."""
    inside = sorted(int(x) for x in inside)
    pos = {w: k for k, w in enumerate(inside)}
    n = len(inside)
    A = [[Fraction(0)] * n for _ in range(n)]
    bnd = []
    for e in g.edge_ids().tolist():
        a, b = int(g.edge_u[e]), int(g.edge_v[e])
        if a in pos and b in pos:
            A[pos[a]][pos[b]] -= 1
            A[pos[b]][pos[a]] -= 1
        elif a in pos or b in pos:
            bnd.append((e, a if a in pos else b))
    for w in inside:
        A[pos[w]][pos[w]] += g.degree(w)
    out = {}
    for e, u in bnd:
        rhs = [Fraction(0)] * n
        rhs[pos[u]] = Fraction(1)
        out[e] = exact_solve(A, rhs)[pos[v]]
    return out


def chi_square_uniformity(observed) -> tuple[float, float]:
    """Chi-square statistic and p-value against the uniform distribution."""
    obs = np.asarray(observed, dtype=float)
    if obs.size < 2:
        raise OracleError("need at least two bins")
    if obs.sum() / obs.size < 5:
        raise OracleError("expected count per bin must be at least 5")
    res = stats.chisquare(obs)
    return float(res.statistic), float(res.pvalue)


def chi_square_goodness(observed, expected_probs) -> tuple[float, float]:
    """Chi-square against arbitrary bin probabilities (bins with zero mass must be empty)."""
    obs = np.asarray(observed, dtype=float)
    p = np.asarray(expected_probs, dtype=float)
    exp = p * obs.sum()
    if np.any(obs[p == 0] > 0):
        return float("inf"), 0.0
    mask = p > 0
    if mask.sum() < 2:
        return 0.0, 1.0
    res = stats.chisquare(obs[mask], exp[mask] * obs[mask].sum() / exp[mask].sum())
    return float(res.statistic), float(res.pvalue)


def chi_square_two_sample(a, b) -> tuple[float, float]:
    """Homogeneity test of two count vectors over the same bins."""
    table = np.vstack([np.asarray(a, float), np.asarray(b, float)])
    table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] < 2:
        return 0.0, 1.0
    res = stats.chi2_contingency(table, correction=False)
    return float(res.statistic), float(res.pvalue)


def tree_histogram(catalog: TreeCatalog, samples) -> np.ndarray:
    counts = np.zeros(catalog.count, dtype=np.int64)
    for t in samples:
        counts[catalog.lookup(t)] += 1
    return counts
