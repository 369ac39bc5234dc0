"""Chi-square uniformity of every sampler on the small fixtures.

    python3 scripts/verify_fixtures.py --trials 20000
"""

import argparse

from ustsample import generators as gen
from ustsample import oracle
from ustsample.orchestrator import SamplerConfig, sample_spanning_tree, sample_spanning_tree_baseline


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--trials", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    full = SamplerConfig(bailout_edges=0)
    samplers = {
        "aldous-broder": lambda g, s: sample_spanning_tree_baseline(g, s, "aldous-broder").edges,
        "wilson": lambda g, s: sample_spanning_tree_baseline(g, s, "wilson").edges,
        "mst-fast": lambda g, s: sample_spanning_tree(g, s, full).edges,
    }
    for name, make in gen.FIXTURES.items():
        g = make()
        cat = oracle.enumerate_spanning_trees(g)
        for algo, draw in samplers.items():
            trees = [draw(g, args.seed + k) for k in range(args.trials)]
            stat, pval = oracle.chi_square_uniformity(oracle.tree_histogram(cat, trees))
            flag = "PASS" if pval > 1e-3 else "FAIL"
            print(f"{flag} {name:<22} {algo:<14} trees={cat.count:<4} chi2={stat:8.2f} p={pval:.4f}")


if __name__ == "__main__":
    main()
