import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import connected_multigraphs
from ustsample import oracle
from ustsample.generators import cliques_with_bridges, grid, path, random_connected, star
from ustsample.graph import GraphError, Multigraph, boundary
from ustsample.linalg import harmonic_voltages
from ustsample.shortcut import SamplerStats, ShortcutSampler, first_exit_monte_carlo
from ustsample.walker import Rng


def tv(counts_a: dict, counts_b: dict) -> float:
    keys = set(counts_a) | set(counts_b)
    na, nb = sum(counts_a.values()), sum(counts_b.values())
    return 0.5 * sum(abs(counts_a.get(k, 0) / na - counts_b.get(k, 0) / nb) for k in keys)


def test_singleton_uniform():
    g = star(3)
    s = ShortcutSampler(g, [0])
    assert s.probabilities(0) == pytest.approx({0: 1 / 3, 1: 1 / 3, 2: 1 / 3})
    rng = Rng(1)
    N = 100_000
    c = np.bincount([s.sample_exit(0, rng)[0] for _ in range(N)], minlength=3)
    assert np.all(np.abs(c / N - 1 / 3) <= 3 * np.sqrt(2 / 9 / N))


def test_path_middle():
    s = ShortcutSampler(path(3), [1])
    assert s.probabilities(1) == pytest.approx({0: 0.5, 1: 0.5})


def test_single_exit_never_refines():
    g = path(5)
    stats = SamplerStats()
    s = ShortcutSampler(g, [0, 1, 2], stats=stats)
    rng = Rng(2)
    assert all(s.sample_exit(0, rng) == (2, 3) for _ in range(200))
    assert stats.refinements == 0


def test_bridge_clique_matches_monte_carlo():
    g = cliques_with_bridges(6)
    S = list(range(6))
    s = ShortcutSampler(g, S)
    rng = Rng(3)
    mc = first_exit_monte_carlo(g, S, 0, rng, 100_000)
    draws = {}
    for _ in range(100_000):
        e, _ = s.sample_exit(0, rng)
        draws[e] = draws.get(e, 0) + 1
    assert tv(mc, draws) <= 0.02


def test_rejects_bad_sets(triangle):
    with pytest.raises(GraphError):
        ShortcutSampler(triangle, [0, 1, 2])
    s = ShortcutSampler(triangle, [0])
    with pytest.raises(ValueError):
        s.probabilities(1)


def test_resumes_outside():
    g = path(4)
    s = ShortcutSampler(g, [1, 2])
    e, w = s.sample_exit(1, Rng(0))
    assert w in (0, 3) and w in g.endpoints(e)


def aux_graph_column(g, S, e):
    """Exit probabilities through e via voltages on the auxiliary graph.

    Vertices: S, the far endpoint of e, and one extra sink standing in for
    every other outside endpoint.
    """
    S = sorted(S)
    ids = {v: k for k, v in enumerate(S)}
    a, b = g.endpoints(e)
    far = b if a in ids else a
    src, sink = len(S), len(S) + 1
    pairs = []
    for f in g.edge_ids().tolist():
        x, y = g.endpoints(f)
        if x in ids and y in ids:
            pairs.append((ids[x], ids[y]))
        elif x in ids or y in ids:
            inside = ids[x] if x in ids else ids[y]
            pairs.append((inside, src if f == e else sink))
    aux = Multigraph.from_edges(len(S) + 2, pairs)
    q = harmonic_voltages(aux, src, sink, tol=1e-13)
    return {v: q[ids[v]] for v in S}


@given(st.integers(0, 10_000))
def test_tables_match_auxiliary_graph_voltages(seed):
    g = random_connected(12, 24, seed)
    rng = np.random.default_rng(seed)
    S = sorted(rng.choice(12, size=int(rng.integers(1, 9)), replace=False).tolist())
    s = ShortcutSampler(g, S)
    for e in boundary(g, S).tolist():
        col = aux_graph_column(g, S, e)
        for v in S:
            assert s.probabilities(v)[e] == pytest.approx(col[v], abs=1e-9)


@given(connected_multigraphs(min_n=3, max_n=8, max_extra=8), st.data())
def test_tables_match_exact_rationals(g, data):
    S = sorted(data.draw(st.sets(st.integers(0, g.n - 1), min_size=1, max_size=g.n - 1)))
    s = ShortcutSampler(g, S)
    for v in S:
        exact = oracle.exact_exit_probabilities(g, S, v)
        got = s.probabilities(v)
        assert set(got) == set(exact)
        for e, p in exact.items():
            assert abs(got[e] - float(p)) <= 1e-9
        assert sum(got.values()) == pytest.approx(1.0, abs=1e-12)


def test_iterative_mode_refines_and_stays_exact():
    g = grid(6, 6)
    S = list(range(30))
    stats = SamplerStats()
    s = ShortcutSampler(g, S, tol=0.3, direct_limit=0, stats=stats)
    assert not s.piece(0).direct
    rng = Rng(6)
    draws = {}
    N = 50_000
    for _ in range(N):
        e, _ = s.sample_exit(0, rng)
        draws[e] = draws.get(e, 0) + 1
    assert stats.refinements > 0
    exact = oracle.exact_exit_probabilities(g, S, 0)
    bins = sorted(exact)
    _, p = oracle.chi_square_goodness([draws.get(e, 0) for e in bins], [float(exact[e]) for e in bins])
    assert p > 1e-3
    err = s.refine_to(0, 1e-10)
    assert err <= 1e-10
    for e, q in exact.items():
        assert abs(s.probabilities(0)[e] - float(q)) <= 1e-9


def test_prefix_tables_monotone_and_end_at_one():
    g = random_connected(40, 100, seed=8)
    s = ShortcutSampler(g, list(range(25)))
    for v in range(25):
        p = s.piece(v)
        row = p.prefix[p.pos[v]]
        assert np.all(np.diff(row) >= -p.err.max())
        assert abs(row[-1] - 1) <= p.band[-1] + 1e-12
        assert np.all(p.X[p.pos[v]] >= -p.err) and np.all(p.X[p.pos[v]] <= 1 + p.err)


def test_disconnected_interior_pieces_built_lazily():
    g = path(7)
    stats = SamplerStats()
    s = ShortcutSampler(g, [1, 2, 4, 5], stats=stats)
    s.sample_exit(1, Rng(0))
    assert len(s._pieces) == 1
    assert s.probabilities(4) == pytest.approx({0: 0, 2: 0, 3: 2 / 3, 5: 1 / 3})
