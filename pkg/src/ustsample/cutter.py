"""Refining a covering family until every overlay component is close-knit.

Each overlay component is first split by ball growing. When the large
pieces are all near one another in the resistance embedding, the small
pieces go to the top level and the component is done. Otherwise two far
apart large pieces are separated by a minimum cut in the whole graph, the
cut is turned into a new family set at some level strictly between 0 and
the top, and both sides are processed again.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import breadth_first_order, maximum_flow

from .decomp import (
    CoveringFamily,
    FamilyError,
    ball_grow,
    i_based_boundary_counts,
    overlay,
)
from .embedding import ResistanceEmbedding
from .graph import Multigraph, as_mask, component_labels, interior


@dataclass
class CutterConfig:
    m: int
    ell: int
    gamma_star: float
    large_threshold: float
    far_threshold: float
    ball_phi: float
    strict_ledger: bool = True

    @classmethod
    def from_m(cls, m: int, ell: int | None = None, **overrides) -> "CutterConfig":
        from .decomp import level_count

        ell = level_count(m) if ell is None else ell
        c = m ** (1.0 / 3.0)
        base = dict(
            m=m,
            ell=ell,
            gamma_star=56.0 * c,
            large_threshold=m / 2.0**ell,
            far_threshold=13.5 * c,
            ball_phi=min(0.25, 2.0 * math.log(m + 1) / c) if m > 0 else 0.25,
        )
        base.update(overrides)
        return cls(**base)


class LedgerError(AssertionError):
    pass


@dataclass
class InsertionLedger:
    ell: int
    counts: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.counts:
            self.counts = [0] * (self.ell + 1)

    def record(self, i: int, strict: bool = True) -> None:
        self.counts[i] += 1
        if strict and 0 < i < self.ell and self.counts[i] >= 2 ** (i + 1):
            raise LedgerError(f"{self.counts[i]} insertions at level {i}")

    def within_bounds(self) -> bool:
        return all(self.counts[i] < 2 ** (i + 1) for i in range(1, self.ell))


@dataclass
class Certificate:
    """Upper bound on the resistance diameter of a vertex set, and why."""

    vertices: np.ndarray
    bound: float
    kind: str  # "small" or "large-union"


@dataclass
class CutLog:
    ledger: InsertionLedger
    successes: int = 0
    failures: int = 0
    top_additions: int = 0
    cut_sizes: list[int] = field(default_factory=list)
    cut_bound_exceeded: int = 0
    certificates: list[Certificate] = field(default_factory=list)
    alpha_counts_before: list[int] = field(default_factory=list)
    alpha_counts_after: list[int] = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "insertions": list(self.ledger.counts),
            "successes": self.successes,
            "failures": self.failures,
            "top_additions": self.top_additions,
            "cut_sizes": list(self.cut_sizes),
            "cut_bound_exceeded": self.cut_bound_exceeded,
            "max_certificate": max((c.bound for c in self.certificates), default=0.0),
            "boundary_counts_before": list(self.alpha_counts_before),
            "boundary_counts_after": list(self.alpha_counts_after),
        }


def find_separating_cut(g: Multigraph, p1, p2) -> np.ndarray:
    """Edge ids of a minimum cut separating ``p1`` from ``p2`` in g.

    Both sets are contracted to single terminals and an exact maximum flow
    is computed; the cut is read off the residual graph.
    """
    m1, m2 = as_mask(g, p1), as_mask(g, p2)
    if np.any(m1 & m2) or not m1.any() or not m2.any():
        raise ValueError("terminal sets must be nonempty and disjoint")
    # node 0 = p1, node 1 = p2, others shifted
    node = np.empty(g.n, dtype=np.int64)
    others = np.flatnonzero(~(m1 | m2))
    node[m1] = 0
    node[m2] = 1
    node[others] = 2 + np.arange(others.size)
    k = 2 + others.size
    live = g.edge_ids()
    a, b = node[g.edge_u[live]], node[g.edge_v[live]]
    keep = a != b
    a, b = a[keep], b[keep]
    cap = sp.coo_matrix(
        (np.ones(2 * a.size, dtype=np.int32), (np.r_[a, b], np.r_[b, a])), shape=(k, k)
    ).tocsr()
    cap.sum_duplicates()
    res = maximum_flow(cap, 0, 1)
    resid = (cap - res.flow).tocsr()
    resid.data[resid.data < 0] = 0
    resid.eliminate_zeros()
    reach = breadth_first_order(resid, 0, directed=True, return_predecessors=False)
    side = np.zeros(k, dtype=bool)
    side[reach] = True
    if side[1]:
        raise RuntimeError("max-flow residual still connects the terminals")
    sv = side[node]
    cut = live[sv[g.edge_u[live]] != sv[g.edge_v[live]]]
    if cut.size != res.flow_value:
        raise RuntimeError("cut size differs from the flow value")
    return cut


@dataclass
class RefineResult:
    S: np.ndarray
    i: int
    contains: int  # 1 or 2: which piece lies inside S


def refine_set(g: Multigraph, cf: CoveringFamily, P, p1, p2, K) -> RefineResult:
    """Turn a separating cut into a set insertable at some level 0 < i < ell."""
    m = cf.m_original
    pm = as_mask(g, P)
    m1, m2 = as_mask(g, p1), as_mask(g, p2)
    if np.any(m1 & ~pm) or np.any(m2 & ~pm):
        raise ValueError("pieces must lie inside the component")
    kmask = np.zeros(g.id_space, dtype=bool)
    kmask[np.asarray(K, dtype=np.int64)] = True
    rest = g.edge_ids()
    rest = rest[~kmask[rest]]
    _, lab = component_labels(g, rest)
    hit1 = np.unique(lab[m1])
    hit2 = np.unique(lab[m2])
    if np.intersect1d(hit1, hit2).size:
        raise FamilyError("cut does not separate the two pieces")
    a1 = np.isin(lab, hit1)

    # witness of P: the deepest family set containing it
    rep = int(np.flatnonzero(pm)[0])
    col = cf.labels[:, rep]
    age = int(np.flatnonzero(col >= 0).max())
    wit = cf.labels[age] == col[age]
    if np.any(pm & ~wit):
        raise FamilyError("component is not inside its witness")

    u1 = wit & a1
    u2 = wit & ~a1
    contains = 1
    if interior(g, u1).size > interior(g, u2).size:
        u1, contains = u2, 2
    inner_m, other_m = (m1, m2) if contains == 1 else (m2, m1)

    i = 1
    S = u1.copy()
    while True:
        size = interior(g, S).size
        if i >= cf.ell:
            raise FamilyError("refinement ran past the top level")
        if size <= m / 2.0 ** (i + 1):
            i += 1
            continue
        taken = S & (cf.labels[i] >= 0)
        if taken.any():
            S &= ~taken
            continue
        break

    out = RefineResult(np.flatnonzero(S), i, contains)
    check_refinement(g, cf, out, inner_m, other_m, kmask)
    return out


def check_refinement(g, cf, res: RefineResult, inner_m, other_m, kmask) -> None:
    """The five conditions a refined set must meet."""
    m = cf.m_original
    S = as_mask(g, res.S)
    i = res.i
    if not 0 < i < cf.ell:
        raise FamilyError(f"level {i} outside (0, {cf.ell})")
    size = interior(g, S).size
    if not m / 2.0 ** (i + 1) < size <= m / 2.0**i:
        raise FamilyError(f"interior {size} outside the level-{i} band")
    if np.any(cf.labels[i, S] >= 0):
        raise FamilyError("refined set meets an existing set on its level")
    if np.any(inner_m & ~S) or np.any(other_m & S):
        raise FamilyError("refined set does not separate the pieces")
    live = g.edge_ids()
    u, v = g.edge_u[live], g.edge_v[live]
    bnd = S[u] != S[v]
    lower = np.any(cf.labels[: i + 1, u] != cf.labels[: i + 1, v], axis=0)
    bad = bnd & ~lower & ~kmask[live]
    if bad.any():
        raise FamilyError(f"boundary edge {int(live[bad][0])} is neither old nor from the cut")


def _place_small_pieces(g, cf, P_mask, pieces, log):
    rep = int(np.flatnonzero(P_mask)[0])
    top = cf.labels[cf.ell, rep]
    if top >= 0:
        cf.carve(g, cf.ell, int(top), pieces)
    else:
        for piece in pieces:
            cf.add_set(g, cf.ell, piece)
    log.top_additions += len(pieces)


def cut_component(g, cf, emb: ResistanceEmbedding, P, config: CutterConfig, log: CutLog) -> list:
    """Process one overlay component; returns sub-components still to process."""
    P_mask = as_mask(g, P)
    dec = ball_grow(g, P_mask, config.ball_phi)
    sizes = [interior(g, c).size for c in dec.components]
    large = [k for k, s in enumerate(sizes) if s > config.large_threshold]
    small = [k for k in range(len(sizes)) if k not in set(large)]
    reps = [int(dec.components[k][0]) for k in large]
    dists = [emb.distance(reps[0], r) for r in reps[1:]] if reps else []

    if not dists or max(dists) <= config.far_threshold:
        log.successes += 1
        if small:
            _place_small_pieces(g, cf, P_mask, [dec.components[k] for k in small], log)
        for k in small:
            log.certificates.append(Certificate(dec.components[k], 2.0 * dec.radii[k], "small"))
        if large:
            diam = max(2.0 * dec.radii[k] for k in large)
            bound = 4.0 * max(dists, default=0.0) + 2.0 * diam
            verts = np.concatenate([dec.components[k] for k in large])
            log.certificates.append(Certificate(np.sort(verts), bound, "large-union"))
        return []

    log.failures += 1
    far = int(np.argmax(dists))  # argmax takes the first, i.e. lowest representative, on ties
    p1 = dec.components[large[0]]
    p2 = dec.components[large[far + 1]]
    K = find_separating_cut(g, p1, p2)
    log.cut_sizes.append(int(K.size))
    if K.size > config.m ** (1.0 / 3.0):
        log.cut_bound_exceeded += 1
    res = refine_set(g, cf, P_mask, p1, p2, K)
    cf.add_set(g, res.i, res.S)
    log.ledger.record(res.i, config.strict_ledger)
    S = as_mask(g, res.S)
    return [np.flatnonzero(P_mask & S), np.flatnonzero(P_mask & ~S)]


def extend_to_shattering(
    g: Multigraph,
    cf: CoveringFamily,
    emb: ResistanceEmbedding,
    config: CutterConfig | None = None,
    check: bool = True,
) -> tuple[CoveringFamily, CutLog]:
    """Return a refined copy of ``cf`` whose overlay components all carry certificates."""
    cf = cf.copy()
    if config is None:
        config = CutterConfig.from_m(cf.m_original, cf.ell)
    log = CutLog(InsertionLedger(cf.ell))
    log.alpha_counts_before = i_based_boundary_counts(cf, g).tolist()
    if cf.ell == 0:
        # nothing can be added; the whole vertex set has resistance diameter below n
        log.certificates.append(Certificate(np.arange(g.n), float(max(g.n - 1, 0)), "small"))
        log.alpha_counts_after = list(log.alpha_counts_before)
        return cf, log
    seen = np.zeros(g.n, dtype=bool)
    for u in range(g.n):
        if seen[u]:
            continue
        ov = overlay(cf)
        stack = [ov.components[int(ov.comp_of[u])]]
        while stack:
            P = stack.pop()
            stack.extend(reversed(cut_component(g, cf, emb, P, config, log)))
            seen[P] = True
    log.alpha_counts_after = i_based_boundary_counts(cf, g).tolist()
    if check:
        cf.check(g)
        check_certified(cf, log)
    return cf, log


def check_certified(cf: CoveringFamily, log: CutLog) -> None:
    """Every overlay component must lie inside some certified set."""
    ov = overlay(cf)
    owner = np.full(cf.n, -1, dtype=np.int64)
    for k, c in enumerate(log.certificates):
        owner[c.vertices] = k
    for comp in ov.components:
        o = owner[comp]
        if o[0] < 0 or np.any(o != o[0]):
            raise FamilyError("overlay component without a diameter certificate")
