"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--leaves 24] [--repeat 5]
"""
import argparse
import itertools
import timeit

import numpy as np

from latentree import _kernels_py, leaf_correlations, random_tree_model

try:
    from latentree import _kernels as _compiled
except ImportError:
    _compiled = None


def workloads(n_leaves, seed):
    rng = np.random.default_rng(seed)
    t = random_tree_model(n_leaves, rng)
    rho = np.ascontiguousarray(leaf_correlations(t).values)
    quads = np.array(list(itertools.combinations(range(n_leaves), 4)), dtype=np.intp)
    a = np.array([e[0] for e in t.edges], dtype=np.intp)
    b = np.array([e[1] for e in t.edges], dtype=np.intp)
    c = np.array([e[2] for e in t.edges])
    n_nodes = t.n_nodes
    return {
        f"classify_quartets ({len(quads)} quartets)": lambda k: k.classify_quartets(rho, quads, 1e-9),
        f"first_star_violation ({n_leaves} leaves, full sweep)": lambda k: k.first_star_violation(rho, 1e-15, 1e-9),
        f"node_correlations ({n_nodes} nodes)": lambda k: k.node_correlations(n_nodes, a, b, c),
    }


def best_of(fn, kern, repeat):
    timer = timeit.Timer(lambda: fn(kern))
    loops, _ = timer.autorange()
    return min(timer.repeat(repeat, loops)) / loops


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--leaves", type=int, default=24)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    if _compiled is None:
        print("compiled extension not built; only the Python fallback is available")
    print(f"{'kernel':<48} {'python':>12} {'cython':>12} {'speedup':>9}")
    for name, fn in workloads(args.leaves, args.seed).items():
        py = best_of(fn, _kernels_py, args.repeat)
        if _compiled is None:
            print(f"{name:<48} {py * 1e3:>10.3f}ms {'-':>12} {'-':>9}")
            continue
        cy = best_of(fn, _compiled, args.repeat)
        print(f"{name:<48} {py * 1e3:>10.3f}ms {cy * 1e3:>10.3f}ms {py / cy:>8.1f}x")


if __name__ == "__main__":
    main()
