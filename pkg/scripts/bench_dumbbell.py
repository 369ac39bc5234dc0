"""Walk events of the fast sampler against Aldous-Broder steps on dumbbells.

    python3 scripts/bench_dumbbell.py --n 2048 4096 --seeds 4
"""

import argparse

import numpy as np

from ustsample import generators as gen
from ustsample.graph import is_spanning_tree
from ustsample.orchestrator import sample_spanning_tree, sample_spanning_tree_baseline


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--n", type=int, nargs="+", default=[1024, 2048, 4096])
    p.add_argument("--seeds", type=int, default=3)
    args = p.parse_args()
    print(f"{'n':>6} {'m':>7} {'events':>10} {'ab steps':>10} {'ratio':>6} {'iters':>5} {'fast s':>7} {'ab s':>6}")
    for n in args.n:
        g = gen.dumbbell(n)
        ev, st, its, tf, ta = [], [], [], [], []
        for s in range(args.seeds):
            fast = sample_spanning_tree(g, s)
            ab = sample_spanning_tree_baseline(g, s, "aldous-broder")
            assert is_spanning_tree(g, fast.edges) and is_spanning_tree(g, ab.edges)
            ev.append(fast.events)
            st.append(ab.faithful_steps)
            its.append(fast.iterations)
            tf.append(fast.seconds)
            ta.append(ab.seconds)
        ratio = np.mean(ev) / np.mean(st)
        print(f"{n:>6} {g.m:>7} {np.mean(ev):>10.0f} {np.mean(st):>10.0f} {ratio:>6.3f} "
              f"{max(its):>5} {np.mean(tf):>7.2f} {np.mean(ta):>6.2f}")


if __name__ == "__main__":
    main()
