"""Random walks: Aldous-Broder, Wilson, and instrumented covering walks."""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from .graph import GraphError, Multigraph, as_edge_mask, as_mask

_BATCH = 4096


class Rng:
    """Seeded uniform stream with cheap scalar draws.

    Streams are keyed by ``(seed, tag path)``; ``child(tag)`` gives an
    independent, reproducible sub-stream.
    """

    def __init__(self, seed: int = 0, path: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.path = tuple(path)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        self.gen = np.random.Generator(np.random.PCG64(ss))
        self._buf: list[float] = []

    @staticmethod
    def _key(tag) -> int:
        if isinstance(tag, (int, np.integer)):
            return int(tag)
        return zlib.crc32(str(tag).encode())

    def child(self, *tags) -> "Rng":
        return Rng(self.seed, self.path + tuple(self._key(t) for t in tags))

    def random(self) -> float:
        buf = self._buf
        if not buf:
            buf.extend(self.gen.random(_BATCH)[::-1].tolist())
        return buf.pop()

    def randrange(self, k: int) -> int:
        return int(self.random() * k)


def as_rng(rng) -> Rng:
    if isinstance(rng, Rng):
        return rng
    return Rng(0 if rng is None else int(rng))


def step(g: Multigraph, v: int, rng: Rng) -> tuple[int, int]:
    """One walk step: a uniform incident edge (parallel edges count separately)."""
    edges = g.adj_edges[v]
    if not edges:
        raise GraphError(f"vertex {v} is isolated")
    k = rng.randrange(len(edges))
    return edges[k], g.adj_nbrs[v][k]


@dataclass
class WalkState:
    current: int
    steps: int
    first_edge: np.ndarray  # -1 where unvisited or at the start vertex
    visited: np.ndarray
    counts: dict = field(default_factory=dict)

    def tree_edges(self) -> list[int]:
        return sorted(int(e) for e in self.first_edge[self.first_edge >= 0])


@dataclass
class WalkStats:
    steps: int = 0


def aldous_broder(g: Multigraph, start: int = 0, rng=None, stats: WalkStats | None = None) -> list[int]:
    """Edges through which each vertex was first entered by a covering walk."""
    rng = as_rng(rng)
    n = g.n
    if n <= 1:
        return []
    adj_e, adj_n = g.adj_edges, g.adj_nbrs
    visited = [False] * n
    visited[start] = True
    tree = []
    remaining = n - 1
    v = start
    steps = 0
    rand = rng.random
    while remaining:
        edges = adj_e[v]
        k = int(rand() * len(edges))
        w = adj_n[v][k]
        steps += 1
        if not visited[w]:
            visited[w] = True
            tree.append(edges[k])
            remaining -= 1
        v = w
    if stats is not None:
        stats.steps += steps
    return sorted(tree)


def wilson(g: Multigraph, root: int = 0, rng=None, stats: WalkStats | None = None) -> list[int]:
    """Loop-erased random walk construction rooted at ``root``."""
    rng = as_rng(rng)
    n = g.n
    if n <= 1:
        return []
    adj_e, adj_n = g.adj_edges, g.adj_nbrs
    in_tree = [False] * n
    in_tree[root] = True
    nxt_e = [-1] * n
    nxt_v = [-1] * n
    rand = rng.random
    steps = 0
    for s in range(n):
        v = s
        while not in_tree[v]:
            edges = adj_e[v]
            k = int(rand() * len(edges))
            nxt_e[v] = edges[k]
            nxt_v[v] = adj_n[v][k]
            v = nxt_v[v]
            steps += 1
        v = s
        while not in_tree[v]:
            in_tree[v] = True
            v = nxt_v[v]
    if stats is not None:
        stats.steps += steps
    return sorted(nxt_e[v] for v in range(n) if v != root)


def covering_walk_with_counters(
    g: Multigraph, start: int, rng, stop_set, counted_edges=None
) -> WalkState:
    """Walk from ``start`` until every vertex of ``stop_set`` is visited.

    ``counts`` maps each counted edge id to its number of traversals.
    """
    rng = as_rng(rng)
    stop = as_mask(g, stop_set)
    counted = np.zeros(g.id_space, dtype=bool) if counted_edges is None else as_edge_mask(g, counted_edges)
    counted_list = counted.tolist()
    visited = np.zeros(g.n, dtype=bool)
    first = np.full(g.n, -1, dtype=np.int64)
    vis = [False] * g.n
    vis[start] = True
    pending = int(stop.sum()) - int(stop[start])
    stop_l = stop.tolist()
    counts: dict[int, int] = {}
    adj_e, adj_n = g.adj_edges, g.adj_nbrs
    rand = rng.random
    v = start
    steps = 0
    while pending > 0:
        edges = adj_e[v]
        k = int(rand() * len(edges))
        e = edges[k]
        w = adj_n[v][k]
        steps += 1
        if counted_list[e]:
            counts[e] = counts.get(e, 0) + 1
        if not vis[w]:
            vis[w] = True
            first[w] = e
            if stop_l[w]:
                pending -= 1
        v = w
    visited[:] = vis
    return WalkState(v, steps, first, visited, counts)


def cover_time_sample(g: Multigraph, start: int, rng) -> int:
    """Steps a walk from ``start`` takes to visit every vertex."""
    stats = WalkStats()
    aldous_broder(g, start, rng, stats)
    return stats.steps
