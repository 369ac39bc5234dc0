import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import connected_multigraphs
from ustsample.decomp import (
    CoveringFamily,
    FamilyError,
    alpha_of,
    ball_grow,
    boundary_levels,
    i_based_boundary_counts,
    is_alpha_bounded,
    level_count,
    minimum_age_interior,
    overlay,
    partition_level,
)
from ustsample.generators import complete, path, random_connected
from ustsample.graph import Multigraph, boundary, induced_diameter, interior


def test_level_count():
    assert level_count(1) == 0
    assert level_count(7) == 0
    assert level_count(8) == 1
    assert level_count(63) == 1
    assert level_count(64) == 2
    assert level_count(4096) == 4
    for m in range(1, 5000, 37):
        ell = level_count(m)
        assert 2 ** (3 * ell) <= m < 2 ** (3 * (ell + 1))


def test_ball_grow_single_vertex():
    g = Multigraph.from_edges(1, [])
    dec = ball_grow(g, None, 0.25)
    assert [c.tolist() for c in dec.components] == [[0]] and dec.cut_edges == 0


def test_ball_grow_short_path_stops_early():
    # growth stops once the boundary is small, even when the diameter budget would allow more
    g = path(10)
    dec = ball_grow(g, None, 0.4)
    assert [c.tolist() for c in dec.components] == [[0, 1, 2, 3], [4, 5, 6, 7], [8, 9]]
    assert dec.cut_edges == 2 <= 0.4 * g.m
    assert all(induced_diameter(g, c) <= dec.gamma for c in dec.components)


def test_ball_grow_long_path_meets_bounds():
    g = path(1000)
    dec = ball_grow(g, None, 0.01)
    assert dec.gamma == pytest.approx(2 * math.log(1000) / 0.01)
    assert dec.cut_edges <= 0.01 * 999
    for c in dec.components:
        assert induced_diameter(g, c) <= dec.gamma


def test_ball_grow_rejects_phi():
    with pytest.raises(ValueError):
        ball_grow(path(3), None, 0.7)


@given(connected_multigraphs(min_n=2, max_n=30, max_extra=40), st.sampled_from([0.3, 0.1, 0.03]))
def test_ball_grow_contract(g, phi):
    dec = ball_grow(g, None, phi)
    cover = np.concatenate(dec.components)
    assert sorted(cover.tolist()) == list(range(g.n))
    comp = np.empty(g.n, dtype=np.int64)
    for k, c in enumerate(dec.components):
        comp[c] = k
        assert induced_diameter(g, c) <= 2 * dec.radii[k] <= dec.gamma
    live = g.edge_ids()
    cut = int(np.sum(comp[g.edge_u[live]] != comp[g.edge_v[live]]))
    assert cut == dec.cut_edges <= phi * g.m


@given(connected_multigraphs(min_n=4, max_n=20, max_extra=20), st.data())
def test_ball_grow_within_subset(g, data):
    s = sorted(data.draw(st.sets(st.integers(0, g.n - 1), min_size=1)))
    dec = ball_grow(g, s, 0.25)
    assert sorted(np.concatenate(dec.components).tolist()) == s
    assert dec.cut_edges <= 0.25 * interior(g, s).size


def nested_family():
    g = path(9)  # m = 8, ell = 1
    cf = CoveringFamily.trivial(g, m_original=512)  # ell = 3, generous size bounds
    A = cf.add_set(g, 1, range(0, 6))
    B = cf.add_set(g, 2, range(0, 3))
    return g, cf, A, B


def test_overlay_examples():
    g = path(9)
    cf = CoveringFamily.trivial(g, m_original=512)
    ov = overlay(cf)
    assert len(ov) == 1 and ov.ages.tolist() == [0]
    cf.add_set(g, 1, range(6))
    ov = overlay(cf)
    assert [c.tolist() for c in ov.components] == [list(range(6)), [6, 7, 8]]
    assert ov.ages.tolist() == [1, 0]
    g, cf, A, B = nested_family()
    ov = overlay(cf)
    assert [c.tolist() for c in ov.components] == [[0, 1, 2], [3, 4, 5], [6, 7, 8]]
    assert ov.ages.tolist() == [2, 1, 0]
    assert ov.witness.tolist() == [B, A, 0]


def test_partition_level_examples():
    g, cf, _, _ = nested_family()
    p0 = partition_level(cf, 0)
    assert len(p0.components) == 1 and p0.modest.tolist() == [True]
    top = partition_level(cf, cf.ell)
    ov = overlay(cf)
    assert [c.tolist() for c in top.components] == [c.tolist() for c in ov.components]
    p1 = partition_level(cf, 1)
    assert [c.tolist() for c in p1.components] == [list(range(6)), [6, 7, 8]]
    assert p1.modest.tolist() == [True, False]


def test_minimum_age_examples():
    g = complete(4)
    cf = CoveringFamily.trivial(g, m_original=64)
    ma = minimum_age_interior(overlay(cf), g)
    assert ma.r_star == 0 and ma.components == [0] and ma.f_star.size == g.m
    cf.add_set(g, 1, [0, 1])
    cf.add_set(g, 1, [2, 3])
    ma = minimum_age_interior(overlay(cf), g)
    assert ma.r_star == 1 and ma.components == [0, 1]
    assert sorted(ma.f_star.tolist()) == sorted(interior(g, [0, 1]).tolist() + interior(g, [2, 3]).tolist())


def test_boundary_counts_examples():
    g, cf, _, _ = nested_family()
    triv = CoveringFamily.trivial(g, m_original=512)
    assert i_based_boundary_counts(triv, g).tolist() == [0, 0, 0, 0]
    only_a = CoveringFamily.trivial(g, m_original=512)
    only_a.add_set(g, 1, range(6))
    assert i_based_boundary_counts(only_a, g).tolist() == [0, boundary(g, range(6)).size, 0, 0]
    assert i_based_boundary_counts(cf, g).tolist() == [0, 1, 1, 0]
    live, base = boundary_levels(cf, g)
    assert base[live == 2].tolist() == [2]


def test_add_set_checks():
    g = path(9)
    cf = CoveringFamily.trivial(g, m_original=64)  # ell = 2, level-2 bound 16
    cf.add_set(g, 1, [0, 1])
    with pytest.raises(FamilyError):
        cf.add_set(g, 1, [1, 2])
    with pytest.raises(FamilyError):
        cf.add_set(g, 0, [5])
    with pytest.raises(FamilyError):
        cf.add_set(g, 3, [5])
    small = CoveringFamily.trivial(g, m_original=8)  # ell = 1, level-1 bound 4
    with pytest.raises(FamilyError):
        small.add_set(g, 1, range(7))


def test_carve_top_level_only():
    g = path(9)
    cf = CoveringFamily.trivial(g, m_original=64)
    lab = cf.add_set(g, 2, range(6))
    a, b = cf.carve(g, 2, lab, [[0, 1, 2], [3, 4, 5]])
    assert cf.set_of(2, a).tolist() == [0, 1, 2]
    with pytest.raises(FamilyError):
        cf.carve(g, 2, a, [[7]])
    low = cf.add_set(g, 1, [7, 8])
    with pytest.raises(FamilyError):
        cf.carve(g, 1, low, [[7]])


def test_json_roundtrip():
    g, cf, _, _ = nested_family()
    back = CoveringFamily.from_json(cf.to_json())
    assert back.ell == cf.ell and back.m_original == cf.m_original
    for i in range(cf.ell + 1):
        assert [s.tolist() for s in back.sets(i)] == [s.tolist() for s in cf.sets(i)]


def test_alpha():
    g, cf, _, _ = nested_family()
    a = alpha_of(cf, g)
    assert is_alpha_bounded(cf, g, a) and not is_alpha_bounded(cf, g, 0.99 * a)


@given(st.integers(0, 10_000))
def test_random_family_overlay_refines_every_level(seed):
    rng = np.random.default_rng(seed)
    g = random_connected(30, 60, seed)
    cf = CoveringFamily.trivial(g, m_original=4096)  # ell = 4
    for i in range(1, cf.ell + 1):
        for _ in range(3):
            free = np.flatnonzero(cf.labels[i] < 0)
            if free.size == 0:
                break
            pick = rng.choice(free, size=min(free.size, int(rng.integers(1, 8))), replace=False)
            cf.add_set(g, i, pick)
    cf.check(g)
    ov = overlay(cf)
    for comp in ov.components:
        cols = cf.labels[:, comp]
        assert np.all(cols == cols[:, :1])
    for j in range(cf.ell + 1):
        part = partition_level(cf, j)
        for comp in ov.components:
            assert np.unique(part.comp_of[comp]).size == 1
    # age witness holds the component
    for k, comp in enumerate(ov.components):
        assert np.all(cf.labels[ov.ages[k], comp] == ov.witness[k])
        assert np.all(cf.labels[ov.ages[k] + 1 :, comp] < 0)
