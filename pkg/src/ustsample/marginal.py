"""Sampling the restriction of a uniform spanning tree to the minimum-age interior.

The walk is simulated step by step only inside minimum-age components that
are not yet fully visited. Everywhere else it jumps straight to the exit
edge of a set that contains no unvisited vertex of interest, so the
first-visit edges of those vertices keep their exact joint law.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .decomp import CoveringFamily, Overlay, ball_grow, minimum_age_interior, overlay, partition_level
from .graph import Multigraph, boundary
from .shortcut import SamplerStats, ShortcutSampler
from .walker import as_rng


@dataclass
class EscapeMap:
    """Escape set per overlay component.

    ``key[k]`` names the set used to jump out of component k:
    ``("level", j)`` for component j of the minimum-age level partition,
    ``("witness", (age, label))`` for a witness set, or ``None``.
    """

    r_star: int
    key: list
    sets: dict  # key -> vertex id array

    def escape_set(self, k: int) -> np.ndarray | None:
        key = self.key[k]
        return None if key is None else self.sets[key]


def build_escape_map(cf: CoveringFamily, g: Multigraph, ov: Overlay | None = None) -> EscapeMap:
    ov = overlay(cf) if ov is None else ov
    r = int(ov.ages.min())
    keys: list = []
    sets: dict = {}
    level = partition_level(cf, r) if r > 0 else None
    for k, comp in enumerate(ov.components):
        age = int(ov.ages[k])
        if age == r:
            if r == 0:
                keys.append(None)
                continue
            j = int(level.comp_of[comp[0]])
            key = ("level", j)
            if key not in sets:
                sets[key] = level.components[j]
        else:
            key = ("witness", (age, int(ov.witness[k])))
            if key not in sets:
                sets[key] = cf.set_of(age, int(ov.witness[k]))
        keys.append(key)
    return EscapeMap(r, keys, sets)


@dataclass
class LargeDiameterCover:
    piece_of: np.ndarray
    pieces: list[np.ndarray]
    cross_edges: np.ndarray
    phi: float
    gamma: float


def build_large_diameter_cover(g: Multigraph, m_original: int, phi: float | None = None) -> LargeDiameterCover:
    if phi is None:
        m = max(m_original, 2)
        phi = min(0.25, 4.0 * math.log(m + 1) / m ** (2.0 / 3.0))
    dec = ball_grow(g, None, phi)
    piece_of = np.empty(g.n, dtype=np.int64)
    for k, c in enumerate(dec.components):
        piece_of[c] = k
    live = g.edge_ids()
    cross = live[piece_of[g.edge_u[live]] != piece_of[g.edge_v[live]]]
    return LargeDiameterCover(piece_of, dec.components, cross, phi, dec.gamma)


@dataclass
class MarginalStats:
    faithful_steps: int = 0
    jumps_over_escape: int = 0
    jumps_over_F: int = 0
    samplers_built: int = 0
    solver_iterations: int = 0
    refinements: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class MarginalSample:
    f_star: np.ndarray
    f_prime: np.ndarray
    r_star: int
    star_vertices: np.ndarray
    first_edge: np.ndarray
    stats: MarginalStats = field(default_factory=MarginalStats)


def first_visit_restriction(first_edge: np.ndarray, f_star) -> np.ndarray:
    fe = first_edge[first_edge >= 0]
    return np.intersect1d(fe, np.asarray(f_star, dtype=np.int64))


def sample_marginal(
    g: Multigraph,
    cf: CoveringFamily,
    rng=None,
    shortcut_tol: float = 1e-8,
    direct_limit: int = 50_000,
    use_cover: bool = True,
    cover_phi: float | None = None,
) -> MarginalSample:
    """Draw T intersected with the minimum-age interior, T a uniform spanning tree of g."""
    rng = as_rng(rng)
    ov = overlay(cf)
    ma = minimum_age_interior(ov, g)
    stats = MarginalStats()
    first = np.full(g.n, -1, dtype=np.int64)
    if ma.f_star.size == 0:
        return MarginalSample(ma.f_star, ma.f_star.copy(), ma.r_star, ma.vertices, first, stats)

    esc = build_escape_map(cf, g, ov)
    sstats = SamplerStats()
    samplers: dict = {}

    def sampler_for(key, verts):
        s = samplers.get(key)
        if s is None:
            s = ShortcutSampler(g, verts, shortcut_tol, direct_limit, sstats)
            samplers[key] = s
        return s

    if use_cover:
        cover = build_large_diameter_cover(g, cf.m_original, cover_phi)
    else:
        cover = LargeDiameterCover(np.zeros(g.n, dtype=np.int64), [np.arange(g.n)], np.zeros(0, np.int64), 0.0, 0.0)

    comp_of = ov.comp_of.tolist()
    star = np.zeros(len(ov), dtype=bool)
    star[ma.components] = True
    is_star = star.tolist()
    in_vstar = star[ov.comp_of]
    comp_left = [int(c.size) if star[k] else 0 for k, c in enumerate(ov.components)]
    piece_of = cover.piece_of.tolist()
    piece_left = np.bincount(cover.piece_of[in_vstar], minlength=len(cover.pieces)).tolist()
    in_vstar_l = in_vstar.tolist()
    keys = esc.key

    visited = [False] * g.n
    first_l = [-1] * g.n
    pending = len(ma.components)

    def visit(w, e):
        nonlocal pending
        visited[w] = True
        first_l[w] = e
        if in_vstar_l[w]:
            c = comp_of[w]
            comp_left[c] -= 1
            if comp_left[c] == 0:
                pending -= 1
            piece_left[piece_of[w]] -= 1

    fu, fv = g.edge_u[ma.f_star], g.edge_v[ma.f_star]
    start = int(min(fu.min(), fv.min()))
    visit(start, -1)
    adj_e, adj_n = g.adj_edges, g.adj_nbrs
    rand = rng.random
    v = start
    faithful = jumps_s = jumps_f = 0
    while pending:
        f = piece_of[v]
        if piece_left[f] == 0:
            s = sampler_for(("piece", f), cover.pieces[f])
            e, w = s.sample_exit(v, rng)
            jumps_f += 1
        else:
            c = comp_of[v]
            if is_star[c] and comp_left[c] > 0:
                edges = adj_e[v]
                k = int(rand() * len(edges))
                e = edges[k]
                w = adj_n[v][k]
                faithful += 1
            else:
                key = keys[c]
                s = sampler_for(key, esc.sets[key])
                e, w = s.sample_exit(v, rng)
                jumps_s += 1
        if not visited[w]:
            visit(w, e)
        v = w

    first[:] = first_l
    stats.faithful_steps = faithful
    stats.jumps_over_escape = jumps_s
    stats.jumps_over_F = jumps_f
    stats.samplers_built = sstats.built
    stats.solver_iterations = sstats.solver_iterations
    stats.refinements = sstats.refinements
    f_prime = first_visit_restriction(first, ma.f_star)
    return MarginalSample(ma.f_star, f_prime, ma.r_star, ma.vertices, first, stats)
