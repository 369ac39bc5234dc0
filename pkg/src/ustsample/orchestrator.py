"""The full sampler: refine, sample a marginal, condition, repeat, then finish."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .cutter import CutterConfig, extend_to_shattering
from .decomp import (
    CoveringFamily,
    FamilyError,
    MinimumAge,
    i_based_boundary_counts,
    level_boundary_totals,
    minimum_age_interior,
    overlay,
)
from .embedding import build_embedding
from .graph import GraphError, Multigraph, condition, is_spanning_tree
from .marginal import sample_marginal
from .walker import Rng, WalkStats, aldous_broder, wilson


@dataclass
class SamplerConfig:
    bailout_edges: int = 512
    embed_epsilon: float = 0.5
    embed_c: float = 4.0
    embed_tol: float = 1e-8
    shortcut_tol: float = 1e-8
    direct_limit: int = 50_000
    use_cover: bool = True
    cutter_overrides: dict = field(default_factory=dict)
    # replaces the refinement step; called as extend(g, cf, rng) -> (cf, info dict)
    extend: Optional[Callable] = None
    check_invariants: bool = True


@dataclass
class TreeSample:
    edges: list[int]
    iterations: int
    log: list[dict]
    faithful_steps: int = 0
    jumps: int = 0
    samplers_built: int = 0
    residual_steps: int = 0
    seconds: float = 0.0

    @property
    def events(self) -> int:
        return self.faithful_steps + self.jumps


@dataclass
class ConditionReport:
    r_star: int
    counts_before: list[int]
    counts_after: list[int]
    age_after: int
    all_boundary: bool


def _all_edges_on_boundaries(g: Multigraph, cf: CoveringFamily) -> bool:
    live = g.edge_ids()
    a = cf.labels[:, g.edge_u[live]]
    b = cf.labels[:, g.edge_v[live]]
    return bool(np.all(np.any(a != b, axis=0)))


def condition_family(
    g: Multigraph, cf: CoveringFamily, ma: MinimumAge, f_prime, check: bool = True
) -> tuple[Multigraph, CoveringFamily, np.ndarray, ConditionReport]:
    """Contract ``f_prime``, delete the rest of the minimum-age interior, and carry the family over."""
    counts_before = i_based_boundary_counts(cf, g).tolist()
    g2, mapping = condition(g, ma.f_star, f_prime)
    labels = np.full((cf.ell + 1, g2.n), -1, dtype=np.int64)
    labels[:, mapping] = cf.labels
    if np.any(labels[:, mapping] != cf.labels):
        raise FamilyError("contracted vertices disagree on family membership")
    cf2 = CoveringFamily(g2.n, cf.m_original, cf.ell, labels)
    if ma.r_star < cf.ell:
        newv = np.unique(mapping[ma.vertices])
        if np.any(cf2.labels[cf.ell, newv] >= 0):
            raise FamilyError("minimum-age vertex already on the top level")
        for w in newv.tolist():
            cf2.add_set(g2, cf.ell, [w])
    counts_after = i_based_boundary_counts(cf2, g2).tolist()
    age_after = int(overlay(cf2).ages.min()) if g2.n else cf.ell
    all_bnd = _all_edges_on_boundaries(g2, cf2)
    report = ConditionReport(ma.r_star, counts_before, counts_after, age_after, all_bnd)
    if check:
        cf2.check(g2)
        if counts_after != counts_before:
            raise FamilyError("conditioning changed the boundary-edge counts")
        if ma.r_star < cf.ell and age_after < ma.r_star + 1:
            raise FamilyError("conditioning did not raise the age")
        if ma.r_star == cf.ell and not all_bnd:
            raise FamilyError("an edge survived inside an overlay component")
    return g2, cf2, mapping, report


def _validate(g0: Multigraph, edges) -> None:
    if not is_spanning_tree(g0, edges):
        raise GraphError("stitched edge set is not a spanning tree")


def sample_spanning_tree(
    g0: Multigraph, seed: int = 0, config: SamplerConfig | None = None, log_file=None
) -> TreeSample:
    """A uniformly random spanning tree of g0, as sorted original edge ids."""
    config = SamplerConfig() if config is None else config
    t0 = time.perf_counter()
    master = Rng(seed)
    g = g0
    cf = CoveringFamily.trivial(g0)
    cutter_cfg = CutterConfig.from_m(cf.m_original, cf.ell, **config.cutter_overrides)
    contracted: list[int] = []
    log: list[dict] = []
    it = 0
    out = TreeSample([], 0, log)
    while g.m > config.bailout_edges and g.n > 1 and not _all_edges_on_boundaries(g, cf):
        it += 1
        if it > cf.ell + 1:
            raise AssertionError(f"main loop exceeded {cf.ell + 1} iterations")
        rec: dict = {"iteration": it, "n": g.n, "m": g.m}
        if config.extend is not None:
            cf, info = config.extend(g, cf, master.child("extend", it))
            rec["cut"] = info
        elif cf.ell == 0:
            # nothing to refine below the whole vertex set
            rec["cut"] = {"skipped": True}
        else:
            emb = build_embedding(
                g, config.embed_epsilon, master.child("embed", it).gen, c=config.embed_c, tol=config.embed_tol
            )
            cf, cutlog = extend_to_shattering(g, cf, emb, cutter_cfg, check=config.check_invariants)
            rec["cut"] = cutlog.summary()
            rec["embedding_dimension"] = emb.dimension
        ov = overlay(cf)
        ma = minimum_age_interior(ov, g)
        ms = sample_marginal(
            g, cf, master.child("walk", it), config.shortcut_tol, config.direct_limit, config.use_cover
        )
        g, cf, _, rep = condition_family(g, cf, ma, ms.f_prime, check=config.check_invariants)
        contracted.extend(int(e) for e in ms.f_prime)
        out.faithful_steps += ms.stats.faithful_steps
        out.jumps += ms.stats.jumps_over_escape + ms.stats.jumps_over_F
        out.samplers_built += ms.stats.samplers_built
        rec.update(
            r_star=ms.r_star,
            f_star=int(ms.f_star.size),
            f_prime=int(ms.f_prime.size),
            edges_remaining=g.m,
            age_after=rep.age_after,
            all_boundary=rep.all_boundary,
            boundary_counts_before=rep.counts_before,
            boundary_counts=rep.counts_after,
            level_boundary_totals=level_boundary_totals(cf, g).tolist(),
            **ms.stats.to_dict(),
        )
        log.append(rec)
        if log_file is not None:
            log_file.write(json.dumps(rec) + "\n")
    stats = WalkStats()
    residual = aldous_broder(g, 0, master.child("residual"), stats) if g.n > 1 else []
    out.residual_steps = stats.steps
    out.faithful_steps += stats.steps
    edges = sorted(contracted + residual)
    _validate(g0, edges)
    out.edges = edges
    out.iterations = it
    out.seconds = time.perf_counter() - t0
    if log_file is not None:
        log_file.write(json.dumps({"final": True, "iterations": it, "residual_edges": g.m,
                                   "residual_steps": stats.steps}) + "\n")
    return out


BASELINES = {"ab": "aldous-broder", "aldous-broder": "aldous-broder", "wilson": "wilson"}


def sample_spanning_tree_baseline(g0: Multigraph, seed: int = 0, algo: str = "aldous-broder") -> TreeSample:
    name = BASELINES.get(algo)
    if name is None:
        raise ValueError(f"unknown baseline {algo!r}")
    t0 = time.perf_counter()
    stats = WalkStats()
    rng = Rng(seed).child(name)
    if name == "aldous-broder":
        edges = aldous_broder(g0, 0, rng, stats)
    else:
        edges = wilson(g0, 0, rng, stats)
    _validate(g0, edges)
    return TreeSample(edges, 0, [], faithful_steps=stats.steps, seconds=time.perf_counter() - t0)
