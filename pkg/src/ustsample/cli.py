"""Command line: ``ustsample {sample,verify,bench}``.

Exit codes: 0 success, 1 a verification check failed, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import generators, oracle
from .graph import GraphError, Multigraph, is_spanning_tree, read_edgelist
from .linalg import effective_resistance
from .orchestrator import SamplerConfig, sample_spanning_tree, sample_spanning_tree_baseline
from .walker import Rng

DEFAULT_SEED = 20240601
ALGOS = ("ab", "wilson", "mst-fast")
CSV_COLUMNS = ["family", "n", "m", "algo", "seed", "ms", "faithful_steps", "jumps", "samplers"]


@dataclass
class RunConfig:
    graph: str | None
    algo: str = "ab"
    seed: int = DEFAULT_SEED
    trials: int = 1
    out: str | None = None
    fmt: str = "edges"
    checks: tuple = ("uniformity",)
    family: str = "dumbbell"
    n: int = 1024
    workers: int = 1
    biased: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")


def run_algo(g: Multigraph, algo: str, seed: int, log_file=None):
    if algo == "mst-fast":
        return sample_spanning_tree(g, seed, SamplerConfig(), log_file)
    if algo in ("ab", "wilson"):
        return sample_spanning_tree_baseline(g, seed, algo)
    raise ValueError(f"unknown algorithm {algo!r}")


def _trial_seed(seed: int, k: int) -> int:
    return int(Rng(seed).child("trial", k).gen.integers(2**62))


def _map_trials(fn, trials: int, workers: int):
    if workers <= 1:
        return [fn(k) for k in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials)))


def load_graph(source: str) -> Multigraph:
    """A path to an edge list, or the name of a built-in fixture."""
    if source in generators.FIXTURES:
        return generators.FIXTURES[source]()
    if source in ("triangle", "K3"):
        return generators.complete(3)
    return read_edgelist(source)


def cmd_sample(cfg: RunConfig) -> int:
    g = load_graph(cfg.graph)
    log = open(cfg.out + ".log.jsonl", "w") if (cfg.out and cfg.algo == "mst-fast") else None

    def one(k):
        return run_algo(g, cfg.algo, _trial_seed(cfg.seed, k), log if cfg.workers <= 1 else None)

    try:
        results = _map_trials(one, cfg.trials, cfg.workers)
    finally:
        if log is not None:
            log.close()
    lines = []
    for k, res in enumerate(results):
        if not is_spanning_tree(g, res.edges):
            raise GraphError("sampler produced an invalid tree")
        if cfg.fmt == "json":
            lines.append(json.dumps({"trial": k, "edges": res.edges, "faithful_steps": res.faithful_steps,
                                     "jumps": res.jumps}))
        else:
            if k:
                lines.append("")
            lines.extend(f"{int(g.edge_u[e])} {int(g.edge_v[e])}" for e in res.edges)
    text = "\n".join(lines) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _biased_sampler(catalog: oracle.TreeCatalog):
    def draw(g, seed):
        rng = np.random.default_rng(seed)
        k = 0 if rng.random() < 0.25 else int(rng.integers(catalog.count))
        return list(catalog.trees[k])

    return draw


def cmd_verify(cfg: RunConfig) -> int:
    g = load_graph(cfg.graph)
    catalog = oracle.enumerate_spanning_trees(g)
    if cfg.biased:
        draw = _biased_sampler(catalog)
    else:
        def draw(graph, seed):
            return run_algo(graph, cfg.algo, seed).edges
    checks = set(cfg.checks)
    if "all" in checks:
        checks = {"uniformity", "edge-marginals", "resistance"}
    samples = []
    if checks & {"uniformity", "edge-marginals"}:
        samples = _map_trials(lambda k: draw(g, _trial_seed(cfg.seed, k)), cfg.trials, cfg.workers)
    ok = True
    if "uniformity" in checks:
        counts = oracle.tree_histogram(catalog, samples)
        if catalog.count < 2:
            stat, p = 0.0, 1.0
        else:
            stat, p = oracle.chi_square_uniformity(counts)
        passed = p > 1e-3
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'} uniformity: {catalog.count} trees, chi2={stat:.2f}, p={p:.4g}")
    if "edge-marginals" in checks:
        exact = oracle.exact_edge_marginals(g, catalog)
        N = len(samples)
        freq = {e: 0 for e in exact}
        for t in samples:
            for e in t:
                freq[e] += 1
        worst = 0.0
        passed = True
        for e, p in exact.items():
            pf = float(p)
            band = 4 * math.sqrt(pf * (1 - pf) / N)
            dev = abs(freq[e] / N - pf)
            worst = max(worst, dev)
            if dev > band + 1e-12:
                passed = False
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'} edge-marginals: {len(exact)} edges, max deviation {worst:.4g}")
    if "resistance" in checks:
        exact = oracle.exact_edge_marginals(g, catalog)
        total = sum(exact.values(), Fraction(0))
        passed = total == g.n - 1
        for e, p in exact.items():
            passed &= abs(effective_resistance(g, *g.endpoints(e)) - float(p)) < 1e-6
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'} resistance: sum of edge marginals = {total}")
    return 0 if ok else 1


def cmd_bench(cfg: RunConfig, algos) -> int:
    g = generators.family(cfg.family, cfg.n, cfg.seed)
    out = open(cfg.out, "w", newline="") if cfg.out else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(CSV_COLUMNS)
        for algo in algos:
            for k in range(cfg.trials):
                seed = _trial_seed(cfg.seed, k)
                res = run_algo(g, algo, seed)
                if not is_spanning_tree(g, res.edges):
                    raise GraphError("sampler produced an invalid tree")
                writer.writerow([cfg.family, cfg.n, g.m, algo, seed, f"{1000 * res.seconds:.1f}",
                                 res.faithful_steps, res.jumps, res.samplers_built])
    finally:
        if cfg.out:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ustsample", description="Uniform spanning tree sampling.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="sample spanning trees of a graph")
    s.add_argument("graph", help="edge-list file or fixture name")
    s.add_argument("--algo", choices=ALGOS, default="ab")
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--trials", type=int, default=1)
    s.add_argument("--out")
    s.add_argument("--format", choices=("edges", "json"), default="edges", dest="fmt")
    s.add_argument("--workers", type=int, default=1)

    v = sub.add_parser("verify", help="check a sampler against exact enumeration")
    v.add_argument("graph", help="edge-list file or fixture name")
    v.add_argument("--algo", choices=ALGOS, default="wilson")
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--trials", type=int, default=20000)
    v.add_argument("--check", action="append", choices=("uniformity", "edge-marginals", "resistance", "all"))
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--biased", action="store_true", help=argparse.SUPPRESS)

    b = sub.add_parser("bench", help="time samplers on a generated family, CSV output")
    b.add_argument("--family", choices=("dumbbell", "grid", "random"), default="dumbbell")
    b.add_argument("--n", type=int, default=1024)
    b.add_argument("--algo", action="append", choices=ALGOS)
    b.add_argument("--seed", type=int, default=DEFAULT_SEED)
    b.add_argument("--trials", type=int, default=1)
    b.add_argument("--out")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "sample":
            cfg = RunConfig(args.graph, args.algo, args.seed, args.trials, args.out, args.fmt, workers=args.workers)
            return cmd_sample(cfg)
        if args.command == "verify":
            cfg = RunConfig(args.graph, args.algo, args.seed, args.trials, checks=tuple(args.check or ["uniformity"]),
                            workers=args.workers, biased=args.biased)
            return cmd_verify(cfg)
        cfg = RunConfig(None, seed=args.seed, trials=args.trials, out=args.out, family=args.family, n=args.n)
        return cmd_bench(cfg, args.algo or list(ALGOS))
    except (OSError, GraphError, ValueError, oracle.OracleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
