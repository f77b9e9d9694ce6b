"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import importlib
import itertools
import timeit

import numpy as np

from qswitch import _kernels_py


def cases():
    group4 = np.array(list(itertools.permutations(range(4))), dtype=np.int64)
    shift4 = np.array([3, 0, 1, 2], dtype=np.int64)
    shift12 = np.array([(i - 1) % 12 for i in range(12)], dtype=np.int64)
    big_map = _kernels_py.induced_index_map(shift12, 2)
    return {
        "induced_index_map n=12 d=2": lambda k: k.induced_index_map(shift12, 2),
        "induced_index_map n=6 d=4": lambda k: k.induced_index_map(shift12[:6] % 6, 4),
        "permutation_sign on 4096 points": lambda k: k.permutation_sign(big_map),
        "commutator search S_4^3": lambda k: k.commutator_conjugate_solutions(group4, shift4),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    try:
        compiled = importlib.import_module("qswitch._kernels")
    except ImportError:
        compiled = None
        print("compiled extension not built; timing the fallback only")
    print(f"{'kernel':34s} {'python':>12s} {'cython':>12s} {'speedup':>8s}")
    for name, fn in cases().items():
        t_py = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat))
        if compiled is None:
            print(f"{name:34s} {t_py * 1e3:10.2f}ms")
            continue
        assert np.array_equal(np.asarray(fn(compiled)), np.asarray(fn(_kernels_py)))
        t_cy = min(timeit.repeat(lambda: fn(compiled), number=1, repeat=args.repeat))
        print(f"{name:34s} {t_py * 1e3:10.2f}ms {t_cy * 1e3:10.3f}ms {t_py / t_cy:7.0f}x")


if __name__ == "__main__":
    main()
