"""Undirected multigraphs with stable edge ids.

Edges are addressed by integer ids that never change. Deleting an edge
(or contracting it, which turns it into a loop) leaves a tombstone, so a
graph obtained by conditioning still speaks the edge vocabulary of the
graph it was derived from.
"""

from __future__ import annotations

import io
import os
from collections import deque
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _cc


class GraphError(ValueError):
    """Raised for malformed graphs and invalid structural operations."""


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        """Merge the classes of a and b; False if they were already merged."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


class Multigraph:
    """Immutable undirected multigraph.

    ``edge_u``/``edge_v`` are indexed by stable edge id; ``alive`` marks the
    ids that are present. Parallel edges are allowed, live self-loops are not.
    """

    __slots__ = ("n", "edge_u", "edge_v", "alive", "adj_edges", "adj_nbrs", "_m")

    def __init__(self, n: int, edge_u, edge_v, alive=None):
        self.n = int(n)
        self.edge_u = np.asarray(edge_u, dtype=np.int64).reshape(-1)
        self.edge_v = np.asarray(edge_v, dtype=np.int64).reshape(-1)
        if self.edge_u.shape != self.edge_v.shape:
            raise GraphError("endpoint arrays differ in length")
        if alive is None:
            alive = np.ones(self.edge_u.shape[0], dtype=bool)
        self.alive = np.asarray(alive, dtype=bool).copy()
        if self.alive.shape != self.edge_u.shape:
            raise GraphError("alive mask has wrong length")
        for arr in (self.edge_u, self.edge_v, self.alive):
            arr.setflags(write=False)

        live = np.flatnonzero(self.alive)
        eu, ev = self.edge_u[live], self.edge_v[live]
        if live.size and (eu.min() < 0 or ev.min() < 0 or max(eu.max(), ev.max()) >= self.n):
            raise GraphError("edge endpoint out of range")
        if np.any(eu == ev):
            raise GraphError("self-loops are not allowed")
        self._m = int(live.size)

        adj_edges: list[list[int]] = [[] for _ in range(self.n)]
        adj_nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for e, a, b in zip(live.tolist(), eu.tolist(), ev.tolist()):
            adj_edges[a].append(e)
            adj_nbrs[a].append(b)
            adj_edges[b].append(e)
            adj_nbrs[b].append(a)
        self.adj_edges = adj_edges
        self.adj_nbrs = adj_nbrs

    @classmethod
    def from_edges(cls, n: int, pairs: Iterable[Sequence[int]]) -> "Multigraph":
        pairs = [tuple(p) for p in pairs]
        if pairs:
            u, v = zip(*pairs)
        else:
            u, v = (), ()
        return cls(n, u, v)

    @property
    def m(self) -> int:
        """Number of live edges."""
        return self._m

    @property
    def id_space(self) -> int:
        """Number of edge ids, including tombstones."""
        return int(self.edge_u.shape[0])

    def edge_ids(self) -> np.ndarray:
        return np.flatnonzero(self.alive)

    def endpoints(self, e: int) -> tuple[int, int]:
        return int(self.edge_u[e]), int(self.edge_v[e])

    def degree(self, v: int) -> int:
        return len(self.adj_edges[v])

    def degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self.adj_edges), dtype=np.int64, count=self.n)

    def edge_pairs(self) -> list[tuple[int, int]]:
        """Live edges as (u, v) pairs in edge-id order."""
        live = self.edge_ids()
        return list(zip(self.edge_u[live].tolist(), self.edge_v[live].tolist()))

    def __repr__(self) -> str:
        return f"Multigraph(n={self.n}, m={self.m})"


def as_mask(g: Multigraph, s) -> np.ndarray:
    """Boolean vertex mask for ``s`` (a mask or an iterable of vertex ids)."""
    arr = np.asarray(s)
    if arr.dtype == bool:
        if arr.shape != (g.n,):
            raise GraphError("vertex mask has wrong length")
        return arr
    mask = np.zeros(g.n, dtype=bool)
    if arr.size:
        mask[arr.astype(np.int64).reshape(-1)] = True
    return mask


def as_edge_mask(g: Multigraph, f) -> np.ndarray:
    arr = np.asarray(f)
    if arr.dtype == bool:
        return arr
    mask = np.zeros(g.id_space, dtype=bool)
    if arr.size:
        mask[arr.astype(np.int64).reshape(-1)] = True
    return mask


def interior(g: Multigraph, s) -> np.ndarray:
    """Edge ids with both endpoints in ``s``."""
    mask = as_mask(g, s)
    return np.flatnonzero(g.alive & mask[g.edge_u] & mask[g.edge_v])


def boundary(g: Multigraph, s) -> np.ndarray:
    """Edge ids with exactly one endpoint in ``s``."""
    mask = as_mask(g, s)
    return np.flatnonzero(g.alive & (mask[g.edge_u] != mask[g.edge_v]))


def _sparse_adjacency(g: Multigraph, edges: np.ndarray):
    a, b = g.edge_u[edges], g.edge_v[edges]
    data = np.ones(2 * edges.size, dtype=np.int8)
    return coo_matrix((data, (np.r_[a, b], np.r_[b, a])), shape=(g.n, g.n)).tocsr()


def connected_components(g: Multigraph, restricted_to=None) -> list[np.ndarray]:
    """Connected pieces of ``g`` (or of the subgraph induced by ``restricted_to``).

    Components are sorted id arrays, ordered by their smallest vertex.
    """
    if restricted_to is None:
        mask = np.ones(g.n, dtype=bool)
        edges = g.edge_ids()
    else:
        mask = as_mask(g, restricted_to)
        edges = interior(g, mask)
    if g.n == 0:
        return []
    _, labels = _cc(_sparse_adjacency(g, edges), directed=False)
    verts = np.flatnonzero(mask)
    labs = labels[verts]
    order = np.argsort(labs, kind="stable")
    verts, labs = verts[order], labs[order]
    cuts = np.flatnonzero(np.diff(labs)) + 1
    comps = np.split(verts, cuts) if verts.size else []
    comps.sort(key=lambda c: int(c[0]))
    return comps


def component_labels(g: Multigraph, edges=None) -> tuple[int, np.ndarray]:
    if edges is None:
        edges = g.edge_ids()
    return _cc(_sparse_adjacency(g, np.asarray(edges, dtype=np.int64)), directed=False)


def is_connected(g: Multigraph) -> bool:
    if g.n <= 1:
        return True
    count, _ = component_labels(g)
    return count == 1


def condition(g: Multigraph, f_star, f_prime) -> tuple[Multigraph, np.ndarray]:
    """Contract ``f_prime`` and delete ``f_star \\ f_prime``.

    Returns the new graph and the old-vertex -> new-vertex map. Edge ids of
    surviving edges are unchanged; loops created by contraction are dropped.
    """
    star = as_edge_mask(g, f_star)
    prime = as_edge_mask(g, f_prime)
    if np.any(prime & ~star):
        raise GraphError("f_prime must be a subset of f_star")
    if np.any(star & ~g.alive):
        raise GraphError("f_star refers to dead edges")

    uf = UnionFind(g.n)
    for e in np.flatnonzero(prime).tolist():
        if not uf.union(int(g.edge_u[e]), int(g.edge_v[e])):
            raise GraphError(f"f_prime contains a cycle (edge {e})")

    roots = np.fromiter((uf.find(v) for v in range(g.n)), dtype=np.int64, count=g.n)
    # relabel classes in order of their smallest member
    _, first, inverse = np.unique(roots, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    mapping = rank[inverse]

    new_u = mapping[g.edge_u]
    new_v = mapping[g.edge_v]
    alive = g.alive & ~star & (new_u != new_v)
    g2 = Multigraph(first.size, new_u, new_v, alive)
    if not is_connected(g2):
        raise GraphError("conditioned graph is disconnected")
    return g2, mapping


def bfs_distances(g: Multigraph, source: int, within=None) -> np.ndarray:
    """Hop distances from ``source``; -1 for unreachable (or outside ``within``)."""
    mask = None if within is None else as_mask(g, within)
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    nbrs = g.adj_nbrs
    while queue:
        v = queue.popleft()
        dv = dist[v] + 1
        for w in nbrs[v]:
            if dist[w] < 0 and (mask is None or mask[w]):
                dist[w] = dv
                queue.append(w)
    return dist


def induced_diameter(g: Multigraph, vertices) -> float:
    """Graph diameter of the subgraph induced by ``vertices`` (inf if disconnected)."""
    mask = as_mask(g, vertices)
    verts = np.flatnonzero(mask)
    best = 0
    for v in verts.tolist():
        d = bfs_distances(g, v, mask)[verts]
        if np.any(d < 0):
            return float("inf")
        best = max(best, int(d.max()))
    return float(best)


def is_spanning_tree(g: Multigraph, edges) -> bool:
    """True iff ``edges`` are n-1 live edges of g forming an acyclic spanning set."""
    edges = [int(e) for e in edges]
    if len(edges) != max(g.n - 1, 0) or len(set(edges)) != len(edges):
        return False
    uf = UnionFind(g.n)
    for e in edges:
        if e < 0 or e >= g.id_space or not g.alive[e]:
            return False
        if not uf.union(int(g.edge_u[e]), int(g.edge_v[e])):
            return False
    return True


def parse_edgelist(text: str) -> Multigraph:
    """Parse the edge-list format: optional ``n m`` header, then ``u v`` lines.

    The first line is read as a header only when the remaining line count
    equals its second number and every id is below its first number.
    Duplicate lines give parallel edges. The graph must be connected.
    """
    rows: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected two integers, got {line!r}")
        try:
            rows.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise GraphError(f"line {lineno}: expected two integers, got {line!r}") from None
    if not rows:
        raise GraphError("empty graph")
    n = None
    head, rest = rows[0], rows[1:]
    if len(rest) == head[1] and all(max(a, b) < head[0] for a, b in rest) and head[0] > 0:
        n, rows = head[0], rest
    if any(a < 0 or b < 0 for a, b in rows):
        raise GraphError("negative vertex id")
    if n is None:
        n = 1 + max(max(a, b) for a, b in rows) if rows else 1
    if any(a == b for a, b in rows):
        raise GraphError("self-loops are not allowed in the input")
    g = Multigraph.from_edges(n, rows)
    if not is_connected(g):
        raise GraphError("input graph is disconnected")
    return g


def read_edgelist(path: str | os.PathLike) -> Multigraph:
    with open(path) as fh:
        return parse_edgelist(fh.read())


def format_edgelist(g: Multigraph, header: bool = True) -> str:
    out = io.StringIO()
    if header:
        out.write(f"{g.n} {g.m}\n")
    for a, b in g.edge_pairs():
        out.write(f"{a} {b}\n")
    return out.getvalue()
