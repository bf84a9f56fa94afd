"""Time each hot kernel on both backends.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--scale 1.0]

Prints one row per kernel with the best-of-N time for the numpy fallback,
the compiled extension (when it imports) and the speedup.
"""
import argparse
import timeit

import numpy as np

from sumset_lab import kernels
from sumset_lab.intset import FiniteIntegerSet, mask_to_words


def workloads(scale: float, rng: np.random.Generator):
    n = max(int(200_000 * scale), 1000)
    keys = rng.integers(0, 2 ** 63, n, dtype=np.uint64)
    idx = np.arange(n, dtype=np.int64)
    words = rng.integers(0, 2 ** 63, n, dtype=np.uint64)
    m = rng.integers(1, 40, n)

    w = max(int(4096 * scale), 64)
    a = np.nonzero(rng.random(w) < 0.5)[0].astype(np.int64)
    b = np.nonzero(rng.random(w) < 0.5)[0].astype(np.int64)
    b_words = mask_to_words(FiniteIntegerSet(b, (0, w - 1)).mask, w)
    small_a, small_b = a[a < 600], b[b < 600]

    dense = (rng.random(max(int(2_000_000 * scale), 10_000)) < 0.5).astype(np.uint8)
    offsets = np.array([0, 2, 6, 8], dtype=np.int64)

    cw = max(int(3000 * scale), 64)
    ad = (rng.random(cw) < 0.3).astype(np.uint8)
    bd = (rng.random(cw) < 0.3).astype(np.uint8)

    return {
        "mix2": lambda k: k.mix2(keys, idx),
        "uniform_below": lambda k: k.uniform_below(words, m),
        "sumset_shift_or": lambda k: k.sumset_shift_or(a, b_words, 2 * w),
        "sumset_naive": lambda k: k.sumset_naive(small_a, small_b),
        "translate_hits": lambda k: k.translate_hits(dense, offsets, 0, dense.size),
        "cover_counts": lambda k: k.cover_counts(ad, bd, 2 * cw),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--number", type=int, default=3)
    p.add_argument("--scale", type=float, default=1.0, help="workload size multiplier")
    args = p.parse_args(argv)

    backends = kernels.available_backends()
    jobs = workloads(args.scale, np.random.default_rng(0))
    names = [m.BACKEND for m in backends]
    print(f"{'kernel':18}" + "".join(f"{n:>12}" for n in names) + "     speedup")
    for name, fn in jobs.items():
        ref = fn(backends[0])
        times = []
        for mod in backends:
            out = fn(mod)
            if not np.array_equal(np.asarray(out), np.asarray(ref)):
                raise SystemExit(f"{name}: {mod.BACKEND} disagrees with {names[0]}")
            t = min(timeit.repeat(lambda: fn(mod), repeat=args.repeat, number=args.number))
            times.append(t / args.number)
        row = f"{name:18}" + "".join(f"{t * 1e3:10.3f}ms" for t in times)
        if len(times) > 1:
            row += f"  {times[0] / times[-1]:8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
