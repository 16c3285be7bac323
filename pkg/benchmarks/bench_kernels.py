"""Time each kernel under numba and numpy on identical inputs.

    python benchmarks/bench_kernels.py [--reps 3]
"""

import argparse
import time

import numpy as np

from crpstick import _accel, kernels, samplers
from crpstick.partition import partition_codes


def cases():
    g = np.random.default_rng(0)
    u6 = g.random((10**6, 5))
    w = 1.0 - g.random((200_000, 6))
    v = samplers.beta1_from_uniform(g.random((200_000, 27)), 2.0)
    urn = g.random((1000, 9999))
    z = g.integers(1, 7, size=(10**6, 6))
    return {
        "crp_tables 1e6 x n=6": ("crp_tables", (u6, 1.0)),
        "stick_labels 2e5 x n=6": ("stick_labels", (w, v)),
        "polya_successes 1e3 x n=1e4": ("polya_successes", (urn, 1.0)),
        "size_biased_perms 1e6 x t=6": ("size_biased_perms", (u6, np.array([2, 3, 5, 1, 4, 2]))),
        "rgs_rows 1e6 x n=6": ("rgs_rows", (z,)),
        "labeling_table n=3 K=200": ("labeling_table", (3, 200, 1.0, partition_codes(3))),
        "labeling_table n=4 K=40": ("labeling_table", (4, 40, 2.0, partition_codes(4))),
    }


def best_of(fn, args, reps):
    out = np.inf
    for _ in range(reps):
        t0 = time.perf_counter()
        fn(*args)
        out = min(out, time.perf_counter() - t0)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=3)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        print("numba not installed; nothing to compare")
        return
    print(f"{'kernel':34s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s}")
    for label, (name, kargs) in cases().items():
        fast = getattr(kernels, name + "_numba")
        slow = getattr(kernels, name + "_numpy")
        fast(*kargs)  # compile / load cache
        t_fast = best_of(fast, kargs, args.reps)
        t_slow = best_of(slow, kargs, args.reps)
        print(f"{label:34s} {t_fast:10.4f} {t_slow:10.4f} {t_slow / t_fast:8.1f}x")


if __name__ == "__main__":
    main()
