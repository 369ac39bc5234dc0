"""Constructed instances shared by the cutter tests and the acceptance suite."""

from __future__ import annotations

import numpy as np

from ustsample.decomp import CoveringFamily, level_count, overlay
from ustsample.graph import Multigraph, bfs_distances, interior


def clique_chain(a: int, b: int, paths: int, length: int, extra: int = 0, seed: int = 0):
    """Cliques K_a and K_b joined by ``paths`` disjoint paths of ``length`` edges.

    ``extra`` random chords are added inside each clique side's path ends to
    vary the geometry. Returns (graph, A vertices, B vertices).
    """
    rng = np.random.default_rng(seed)
    pairs = [(i, j) for i in range(a) for j in range(i + 1, a)]
    pairs += [(a + i, a + j) for i in range(b) for j in range(i + 1, b)]
    nxt = a + b
    for p in range(paths):
        prev = p % a
        for _ in range(length - 1):
            pairs.append((prev, nxt))
            prev = nxt
            nxt += 1
        pairs.append((prev, a + p % b))
    for _ in range(extra):
        x, y = rng.integers(0, a, size=2)
        if x != y:
            pairs.append((int(x), int(y)))
    return Multigraph.from_edges(nxt, pairs), np.arange(a), np.arange(a, a + b)


def dense_resistance(g: Multigraph) -> np.ndarray:
    """All-pairs effective resistance from the dense pseudo-inverse."""
    L = np.zeros((g.n, g.n))
    for x, y in g.edge_pairs():
        L[x, x] += 1
        L[y, y] += 1
        L[x, y] -= 1
        L[y, x] -= 1
    P = np.linalg.pinv(L)
    d = np.diag(P)
    return d[:, None] + d[None, :] - 2 * P


def resistance_diameter(R: np.ndarray, s) -> float:
    s = np.asarray(s)
    return float(R[np.ix_(s, s)].max()) if s.size > 1 else 0.0


def good_cut_instances(count: int, seed: int = 0):
    """Instances (g, U, W, gamma_uw) with gamma_uw > 0 for the good-cut bound.

    Mixes clique chains with random sparse graphs whose U and W are small
    BFS balls around two far-apart vertices.
    """
    rng = np.random.default_rng(seed)
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 50 * count:
            raise RuntimeError("could not build enough instances")
        if len(out) % 2 == 0:
            a, b = (int(x) for x in rng.integers(4, 12, size=2))
            k = int(rng.integers(1, 5))
            length = int(rng.integers(6, 40))
            g, U, W = clique_chain(a, b, k, length, extra=int(rng.integers(0, 4)), seed=int(rng.integers(1 << 30)))
        else:
            from ustsample.generators import random_connected

            n = int(rng.integers(30, 120))
            g = random_connected(n, int(n * rng.uniform(1.0, 1.3)), seed=int(rng.integers(1 << 30)))
            d0 = bfs_distances(g, 0)
            far = int(np.argmax(d0))
            U = np.flatnonzero(d0 <= 1)
            W = np.flatnonzero(bfs_distances(g, far) <= 1)
            if np.intersect1d(U, W).size:
                continue
        R = dense_resistance(g)
        u, w = int(U[0]), int(W[0])
        gamma = R[u, w] / 3 - resistance_diameter(R, U) - resistance_diameter(R, W)
        if gamma > 0:
            out.append((g, U, W, float(gamma)))
    return out


def refine_instances(count: int, seed: int = 0):
    """Instances (g, cf, P, p1, p2, K) meeting the refinement hypotheses.

    Two cliques whose interiors exceed m / 2**ell, joined by one long path
    cut at a random edge. Some instances pre-load sets on path stretches at
    random levels so the refinement has to remove or step past them.
    """
    rng = np.random.default_rng(seed)
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 200 * count:
            raise RuntimeError("could not build enough instances")
        a = int(rng.integers(8, 30))
        b = int(rng.integers(8, 30))
        length = int(rng.integers(20, 400))
        g, A, B = clique_chain(a, b, 1, length)
        m = g.m
        ell = level_count(m)
        if ell < 2:
            continue
        if min(interior(g, A).size, interior(g, B).size) <= m / 2**ell:
            continue
        cf = CoveringFamily.trivial(g)
        path_vs = np.arange(a + b, g.n)
        if len(out) % 3 and path_vs.size > 6:
            for _ in range(int(rng.integers(1, 4))):
                i = int(rng.integers(1, ell + 1))
                lo = int(rng.integers(0, path_vs.size - 3))
                hi = int(min(path_vs.size, lo + rng.integers(2, max(3, path_vs.size // 3))))
                seg = path_vs[lo:hi]
                if np.any(cf.labels[i, seg] >= 0) or interior(g, seg).size > cf.size_bound(i):
                    continue
                cf.add_set(g, i, seg)
        ov = overlay(cf)
        P = ov.components[int(ov.comp_of[0])]
        if not (np.isin(A, P).all() and np.isin(B, P).all()):
            continue
        # path edges come last; cut one of them
        path_edges = np.arange(g.id_space - length, g.id_space)
        K = np.array([int(rng.choice(path_edges))])
        out.append((g, cf, P, A, B, K))
    return out


def random_extension(g: Multigraph, cf: CoveringFamily, rng: np.random.Generator, density: float = 0.5):
    """A copy of ``cf`` with random new disjoint sets on levels 1..ell.

    Sets are grown as random BFS-ish clumps and kept only when they respect
    the per-level interior bound, so the result is a valid extension.
    """
    out = cf.copy()
    for i in range(1, out.ell + 1):
        for _ in range(int(rng.integers(0, 4))):
            free = np.flatnonzero(out.labels[i] < 0)
            if free.size == 0 or rng.random() > density:
                continue
            seed = int(rng.choice(free))
            size = int(rng.integers(1, max(2, free.size // 2) + 1))
            clump = [seed]
            taken = {seed}
            frontier = [seed]
            while frontier and len(clump) < size:
                v = frontier.pop(int(rng.integers(len(frontier))))
                for w in g.adj_nbrs[v]:
                    if w not in taken and out.labels[i, w] < 0 and len(clump) < size:
                        taken.add(w)
                        clump.append(w)
                        frontier.append(w)
            if interior(g, clump).size <= out.size_bound(i):
                out.add_set(g, i, clump)
    return out
