"""Time the numba kernels against their numpy counterparts.

    python benchmarks/bench_kernels.py [--repeat 5]

The first numba call includes JIT compilation (or a cache load) and is
reported separately.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from udrs import kernels as k


def _sparse_order(n: int) -> np.ndarray:
    # predecessor bitmasks: every third item must follow its left neighbour
    pred = np.zeros(n, dtype=np.int64)
    for i in range(1, n, 3):
        pred[i] = 1 << (i - 1)
    return pred


def _more_than_half(n: int) -> np.ndarray:
    a = np.arange(n + 1)[:, None]
    b = np.arange(n + 1)[None, :]
    return (2 * b > a) & (b <= a)


CASES = {
    "linear_extensions(n=14)": (k.count_linear_extensions_numpy, k.count_linear_extensions_numba, (_sparse_order(14),)),
    "decode_bits(2^16 x 16)": (k.decode_bits_numpy, k.decode_bits_numba, (0, 1 << 16, 16)),
    "gq_properties(n=5)": (k.gq_properties_numpy, k.gq_properties_numba, (_more_than_half(5), 5)),
}


def _best(fn, args, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"numba available: {k.HAVE_NUMBA}")
    print(f"{'kernel':28} {'numpy ms':>10} {'numba 1st ms':>13} {'numba ms':>10} {'speedup':>8}")
    for name, (np_fn, nb_fn, fargs) in CASES.items():
        t = time.perf_counter()
        first = nb_fn(*fargs)
        t_first = time.perf_counter() - t
        ref = np_fn(*fargs)
        assert np.array_equal(np.asarray(first), np.asarray(ref)), name
        t_np = _best(np_fn, fargs, args.repeat)
        t_nb = _best(nb_fn, fargs, args.repeat)
        print(f"{name:28} {t_np * 1e3:10.2f} {t_first * 1e3:13.2f} {t_nb * 1e3:10.2f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
