"""Ball-growing decompositions and covering families.

A covering family is stored as one label row per level: ``labels[i, v]``
is the index of the level-i set containing ``v`` or -1. Sets on one level
are disjoint, so this is lossless, and overlays become row-uniqueness
problems over the label columns.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .graph import Multigraph, as_mask, interior


def level_count(m: int) -> int:
    """ell = floor(log2(m) / 3), so 2**ell <= m**(1/3)."""
    if m <= 1:
        return 0
    ell = int(math.floor(math.log2(m) / 3.0))
    # guard against rounding at exact powers
    while 2 ** (3 * (ell + 1)) <= m:
        ell += 1
    while ell > 0 and 2 ** (3 * ell) > m:
        ell -= 1
    return ell


@dataclass
class Decomposition:
    components: list[np.ndarray]
    phi: float
    gamma: float
    radii: list[int]
    cut_edges: int
    m: int


def ball_grow(g: Multigraph, within=None, phi: float = 0.25) -> Decomposition:
    """Partition ``within`` (default: all vertices) by repeated ball growing.

    Grows a ball from the lowest-id unassigned vertex until its boundary
    (in the graph of still-unassigned vertices) is at most ``phi`` times its
    interior, then removes it. Radii are the number of growth rounds.
    """
    if not 0 < phi < 0.5:
        raise ValueError("phi must lie in (0, 1/2)")
    mask = np.ones(g.n, dtype=bool) if within is None else as_mask(g, within).copy()
    m_sub = int(interior(g, mask).size)
    remaining = mask.copy()
    in_ball = np.zeros(g.n, dtype=bool)
    nbrs = g.adj_nbrs
    components: list[np.ndarray] = []
    radii: list[int] = []
    cut_total = 0
    seen = np.zeros(g.n, dtype=bool)
    for seed in np.flatnonzero(mask).tolist():
        if not remaining[seed]:
            continue
        ball = []
        inner = 0
        bnd = 0
        frontier = [seed]
        seen[seed] = True
        radius = -1
        while frontier:
            # absorb the frontier one vertex at a time; an edge to a vertex
            # already absorbed switches from boundary to interior
            for w in frontier:
                in_ball[w] = True
                for x in nbrs[w]:
                    if not remaining[x]:
                        continue
                    if in_ball[x]:
                        inner += 1
                        bnd -= 1
                    else:
                        bnd += 1
            ball.extend(frontier)
            radius += 1
            if bnd <= phi * inner:
                break
            new = []
            for v in frontier:
                for w in nbrs[v]:
                    if remaining[w] and not seen[w]:
                        seen[w] = True
                        new.append(w)
            frontier = new
        for v in ball:
            remaining[v] = False
            in_ball[v] = False
        components.append(np.array(sorted(ball), dtype=np.int64))
        radii.append(radius)
        cut_total += bnd
    gamma = 2.0 * math.log(m_sub + 1) / phi
    components.sort(key=lambda c: int(c[0]))
    return Decomposition(components, phi, gamma, radii, cut_total, m_sub)


class FamilyError(AssertionError):
    """A covering-family invariant was violated."""


class CoveringFamily:
    """Levels 0..ell of pairwise-disjoint vertex sets over a graph's vertices.

    ``labels[i, v]`` is the id of the level-i set containing v, or -1.
    Level 0 always holds the single set of all vertices. ``m_original`` is
    the edge count of the input graph the family was first built for; size
    bounds always use it.
    """

    def __init__(self, n: int, m_original: int, ell: int | None = None, labels=None):
        self.n = int(n)
        self.m_original = int(m_original)
        self.ell = level_count(m_original) if ell is None else int(ell)
        if labels is None:
            labels = np.full((self.ell + 1, self.n), -1, dtype=np.int64)
            labels[0] = 0
        self.labels = np.asarray(labels, dtype=np.int64).copy()
        if self.labels.shape != (self.ell + 1, self.n):
            raise FamilyError("label matrix has wrong shape")
        self._next = [int(row.max()) + 1 if row.size else 0 for row in self.labels]

    @classmethod
    def trivial(cls, g: Multigraph, m_original: int | None = None) -> "CoveringFamily":
        return cls(g.n, g.m if m_original is None else m_original)

    def copy(self) -> "CoveringFamily":
        return CoveringFamily(self.n, self.m_original, self.ell, self.labels)

    def size_bound(self, i: int) -> float:
        return self.m_original / 2.0**i

    def sets(self, i: int) -> list[np.ndarray]:
        """Sets of level i as sorted id arrays, ordered by smallest vertex."""
        row = self.labels[i]
        verts = np.flatnonzero(row >= 0)
        if verts.size == 0:
            return []
        order = np.argsort(row[verts], kind="stable")
        verts = verts[order]
        cuts = np.flatnonzero(np.diff(row[verts])) + 1
        out = np.split(verts, cuts)
        out.sort(key=lambda c: int(c[0]))
        return out

    def set_of(self, i: int, label: int) -> np.ndarray:
        return np.flatnonzero(self.labels[i] == label)

    def add_set(self, g: Multigraph, i: int, vertices) -> int:
        """Insert a new set at level i; it must avoid every set already there."""
        if not 0 < i <= self.ell:
            raise FamilyError(f"cannot add sets at level {i}")
        vs = np.flatnonzero(as_mask(g, vertices))
        if vs.size == 0:
            raise FamilyError("empty set")
        if np.any(self.labels[i, vs] >= 0):
            raise FamilyError(f"new set intersects an existing level-{i} set")
        if interior(g, vs).size > self.size_bound(i):
            raise FamilyError(f"level-{i} set exceeds the interior size bound")
        lab = self._next[i]
        self._next[i] += 1
        self.labels[i, vs] = lab
        return lab

    def carve(self, g: Multigraph, i: int, label: int, pieces) -> list[int]:
        """Subdivide the level-i set ``label``: each piece becomes its own set."""
        if i != self.ell:
            raise FamilyError("only the top level may be subdivided")
        out = []
        for piece in pieces:
            vs = np.flatnonzero(as_mask(g, piece))
            if np.any(self.labels[i, vs] != label):
                raise FamilyError("piece is not inside the set being subdivided")
            lab = self._next[i]
            self._next[i] += 1
            self.labels[i, vs] = lab
            out.append(lab)
        return out

    def check(self, g: Multigraph) -> None:
        """Assert the structural invariants against graph g."""
        if self.labels.shape[1] != g.n:
            raise FamilyError("family and graph disagree on vertex count")
        if np.any(self.labels[0] != 0):
            raise FamilyError("level 0 must be the single set of all vertices")
        for i in range(1, self.ell + 1):
            row = self.labels[i]
            live = g.edge_ids()
            a, b = row[g.edge_u[live]], row[g.edge_v[live]]
            inside = (a >= 0) & (a == b)
            if inside.any():
                counts = np.bincount(a[inside])
                if counts.max() > self.size_bound(i):
                    raise FamilyError(f"level-{i} set exceeds the interior size bound")

    def to_json(self) -> str:
        levels = [[s.tolist() for s in self.sets(i)] for i in range(self.ell + 1)]
        return json.dumps(
            {"n": self.n, "m_original": self.m_original, "ell": self.ell, "levels": levels}
        )

    @classmethod
    def from_json(cls, text: str) -> "CoveringFamily":
        data = json.loads(text)
        cf = cls(data["n"], data["m_original"], data["ell"])
        cf.labels[1:] = -1
        for i, sets in enumerate(data["levels"]):
            if i == 0:
                continue
            for k, s in enumerate(sets):
                cf.labels[i, np.asarray(s, dtype=np.int64)] = k
            cf._next[i] = len(sets)
        return cf


@dataclass
class Overlay:
    """Overlay components with their ages and age witnesses.

    ``witness[k]`` is the label of the age-``ages[k]`` set containing
    component k. ``comp_of`` maps vertices to component indices.
    """

    comp_of: np.ndarray
    components: list[np.ndarray]
    ages: np.ndarray
    witness: np.ndarray

    def __len__(self) -> int:
        return len(self.components)


def _group_columns(rows: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    """Group vertices by identical label columns; groups ordered by min vertex."""
    n = rows.shape[1]
    if n == 0:
        return np.zeros(0, dtype=np.int64), []
    _, first, inverse = np.unique(rows.T, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    comp_of = rank[inverse]
    order = np.argsort(comp_of, kind="stable")
    cuts = np.flatnonzero(np.diff(comp_of[order])) + 1
    return comp_of, np.split(order, cuts)


def overlay(cf: CoveringFamily, g: Multigraph | None = None) -> Overlay:
    comp_of, comps = _group_columns(cf.labels)
    reps = np.array([int(c[0]) for c in comps], dtype=np.int64)
    col = cf.labels[:, reps] if reps.size else np.zeros((cf.ell + 1, 0), dtype=np.int64)
    member = col >= 0
    # highest level with a containing set
    ages = cf.ell - np.argmax(member[::-1], axis=0)
    witness = col[ages, np.arange(reps.size)]
    return Overlay(comp_of, comps, ages.astype(np.int64), witness)


@dataclass
class LevelPartition:
    comp_of: np.ndarray
    components: list[np.ndarray]
    modest: np.ndarray


def partition_level(cf: CoveringFamily, j: int, g: Multigraph | None = None) -> LevelPartition:
    """Superimpose levels 0..j; a component is modest when a level-j set holds it."""
    if not 0 <= j <= cf.ell:
        raise ValueError("level out of range")
    comp_of, comps = _group_columns(cf.labels[: j + 1])
    modest = np.array([cf.labels[j, c[0]] >= 0 for c in comps], dtype=bool)
    return LevelPartition(comp_of, comps, modest)


@dataclass
class MinimumAge:
    r_star: int
    components: list[int]  # indices into the overlay
    vertices: np.ndarray  # union of those components
    f_star: np.ndarray  # edge ids


def minimum_age_interior(ov: Overlay, g: Multigraph) -> MinimumAge:
    r = int(ov.ages.min())
    idx = np.flatnonzero(ov.ages == r).tolist()
    in_star = np.isin(ov.comp_of, idx)
    live = g.edge_ids()
    cu, cv = ov.comp_of[g.edge_u[live]], ov.comp_of[g.edge_v[live]]
    f_star = live[(cu == cv) & in_star[g.edge_u[live]]]
    return MinimumAge(r, idx, np.flatnonzero(in_star), f_star)


def boundary_levels(cf: CoveringFamily, g: Multigraph) -> tuple[np.ndarray, np.ndarray]:
    """For each live edge, the lowest level at which it leaves some set (-1 if none)."""
    live = g.edge_ids()
    a = cf.labels[:, g.edge_u[live]]
    b = cf.labels[:, g.edge_v[live]]
    crosses = a != b
    any_cross = crosses.any(axis=0)
    base = np.where(any_cross, np.argmax(crosses, axis=0), -1)
    return live, base


def i_based_boundary_counts(cf: CoveringFamily, g: Multigraph) -> np.ndarray:
    _, base = boundary_levels(cf, g)
    return np.bincount(base[base >= 0], minlength=cf.ell + 1)[: cf.ell + 1]


def alpha_of(cf: CoveringFamily, g: Multigraph) -> float:
    """Smallest alpha for which the family is alpha-bounded."""
    counts = i_based_boundary_counts(cf, g)
    scale = cf.m_original ** (1.0 / 3.0) * 2.0 ** np.arange(cf.ell + 1)
    return float(np.max(counts / scale))


def is_alpha_bounded(cf: CoveringFamily, g: Multigraph, alpha: float) -> bool:
    counts = i_based_boundary_counts(cf, g)
    scale = cf.m_original ** (1.0 / 3.0) * 2.0 ** np.arange(cf.ell + 1)
    return bool(np.all(counts <= alpha * scale + 1e-9))


def level_boundary_totals(cf: CoveringFamily, g: Multigraph) -> np.ndarray:
    """Number of live edges on the boundary of some level-i set, per level."""
    live = g.edge_ids()
    a = cf.labels[:, g.edge_u[live]]
    b = cf.labels[:, g.edge_v[live]]
    return (a != b).sum(axis=1)
