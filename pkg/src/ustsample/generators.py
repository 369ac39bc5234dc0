"""Graph families and small fixtures."""

from __future__ import annotations

import math

import numpy as np

from .graph import Multigraph, is_connected


def path(n: int) -> Multigraph:
    return Multigraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Multigraph:
    return Multigraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Multigraph:
    return Multigraph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def grid(rows: int, cols: int | None = None) -> Multigraph:
    cols = rows if cols is None else cols
    pairs = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                pairs.append((v, v + 1))
            if r + 1 < rows:
                pairs.append((v, v + cols))
    return Multigraph.from_edges(rows * cols, pairs)


def star(leaves: int) -> Multigraph:
    return Multigraph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def random_connected(n: int, m: int, seed=0, multi: bool = False) -> Multigraph:
    """Random spanning tree (random attachment) plus m - n + 1 extra random edges."""
    if m < n - 1:
        raise ValueError("need m >= n - 1")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    pairs = [(int(perm[i]), int(perm[rng.integers(0, i)])) for i in range(1, n)]
    seen = {tuple(sorted(p)) for p in pairs}
    while len(pairs) < m:
        a, b = (int(x) for x in rng.integers(0, n, size=2))
        if a == b:
            continue
        key = (min(a, b), max(a, b))
        if not multi and key in seen:
            continue
        seen.add(key)
        pairs.append((a, b))
    return Multigraph.from_edges(n, pairs)


def random_regular_pairs(n: int, d: int, rng: np.random.Generator, max_tries: int = 1000) -> list[tuple[int, int]]:
    """Configuration-model d-regular multigraph without loops, connected."""
    if n * d % 2:
        raise ValueError("n * d must be even")
    for _ in range(max_tries):
        stubs = np.repeat(np.arange(n), d)
        rng.shuffle(stubs)
        a, b = stubs[0::2], stubs[1::2]
        if np.any(a == b):
            continue
        pairs = list(zip(a.tolist(), b.tolist()))
        if is_connected(Multigraph.from_edges(n, pairs)):
            return pairs
    raise RuntimeError("could not draw a connected loop-free regular multigraph")


def random_regular(n: int, d: int = 3, seed=0) -> Multigraph:
    return Multigraph.from_edges(n, random_regular_pairs(n, d, np.random.default_rng(seed)))


def dumbbell(n: int, seed: int = 2024, paths: int | None = None, length: int | None = None) -> Multigraph:
    """Two random 3-regular halves of n // 2 vertices each, linked by disjoint paths.

    By default there are floor(sqrt(n)) paths of floor(sqrt(n)) edges, each
    joining a distinct vertex of the first half to a distinct vertex of the
    second. Internal path vertices come after the two halves.
    """
    half = n // 2
    if half % 2:
        half += 1
    k = math.isqrt(n) if paths is None else paths
    length = math.isqrt(n) if length is None else length
    if k > half:
        raise ValueError("more paths than vertices per half")
    rng = np.random.default_rng(seed)
    left = random_regular_pairs(half, 3, rng)
    right = [(a + half, b + half) for a, b in random_regular_pairs(half, 3, rng)]
    ends_l = rng.choice(half, size=k, replace=False)
    ends_r = rng.choice(half, size=k, replace=False) + half
    pairs = left + right
    nxt = 2 * half
    for a, b in zip(ends_l.tolist(), ends_r.tolist()):
        prev = a
        for _ in range(length - 1):
            pairs.append((prev, nxt))
            prev = nxt
            nxt += 1
        pairs.append((prev, b))
    return Multigraph.from_edges(nxt, pairs)


def barbell_path(clique: int, length: int) -> Multigraph:
    """Two cliques joined by a single path of ``length`` edges."""
    pairs = [(i, j) for i in range(clique) for j in range(i + 1, clique)]
    pairs += [(clique + i, clique + j) for i in range(clique) for j in range(i + 1, clique)]
    nxt = 2 * clique
    prev = 0
    for _ in range(length - 1):
        pairs.append((prev, nxt))
        prev = nxt
        nxt += 1
    pairs.append((prev, clique))
    return Multigraph.from_edges(nxt, pairs)


def expander_path(half: int, length: int, seed: int = 7) -> Multigraph:
    """Two random 3-regular halves joined by one path of ``length`` edges."""
    return dumbbell(2 * half, seed=seed, paths=1, length=length)


def cliques_with_bridges(k: int, bridges: int = 1) -> Multigraph:
    """Two k-cliques joined by ``bridges`` parallel edges between vertex 0 and vertex k."""
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    pairs += [(k + i, k + j) for i in range(k) for j in range(i + 1, k)]
    pairs += [(0, k)] * bridges
    return Multigraph.from_edges(2 * k, pairs)


def k4() -> Multigraph:
    return complete(4)


def c5() -> Multigraph:
    return cycle(5)


def k4_minus_edge() -> Multigraph:
    return Multigraph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])


def grid3() -> Multigraph:
    return grid(3, 3)


def two_triangles_bridge() -> Multigraph:
    return Multigraph.from_edges(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)])


def pendant_triangle_host() -> Multigraph:
    """Eight vertices: a triangle 0-1-2 hanging by one edge off a denser five-vertex part."""
    pairs = [(0, 1), (1, 2), (0, 2), (2, 3)]
    pairs += [(3, 4), (3, 5), (4, 5), (4, 6), (5, 7), (6, 7), (3, 7), (4, 7)]
    return Multigraph.from_edges(8, pairs)


FIXTURES = {
    "K4": k4,
    "C5": c5,
    "K4-e": k4_minus_edge,
    "grid3x3": grid3,
    "two-triangles-bridge": two_triangles_bridge,
}


def family(name: str, n: int, seed: int = 0) -> Multigraph:
    """Benchmark families: dumbbell(n), grid(n) with side floor(sqrt(n)), random(n, 2n)."""
    if name == "dumbbell":
        return dumbbell(n)
    if name == "grid":
        side = max(2, math.isqrt(n))
        return grid(side, side)
    if name == "random":
        return random_connected(n, 2 * n, seed)
    raise ValueError(f"unknown family {name!r}")
