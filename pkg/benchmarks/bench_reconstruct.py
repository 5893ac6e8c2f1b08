"""Compare the compiled and numpy reconstruction kernels.

    python benchmarks/bench_reconstruct.py [--size 256] [--frames 100] [--repeat 5]
"""

import argparse
import time

import numpy as np

from turbfree import _backend, _kernels_py

try:
    from turbfree import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--frames", type=int, default=100)
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--threads", type=int, default=0, help="0 = one per CPU")
    args = p.parse_args()

    rng = np.random.default_rng(0)
    counts = rng.integers(0, 256, (args.frames, args.size * args.size)).astype(np.uint8)
    threads = _backend.resolve_threads(args.threads)
    print(f"{args.size}x{args.size}x{args.frames} 8-bit, {threads} thread(s)")

    results = {"numpy": lambda cross: _kernels_py.g2(counts, cross)}
    if _kernels is not None:
        results["compiled"] = lambda cross: _kernels.g2(counts, cross, threads)
    else:
        print("compiled kernel not built; numpy only")
    outputs = {}
    for name, fn in results.items():
        for cross in (False, True):
            t = best_of(lambda: fn(cross), args.repeat)
            outputs[name, cross] = fn(cross)
            print(f"  {name:<9} {'CC' if cross else 'AC'}  {t * 1e3:8.1f} ms")
    if _kernels is not None:
        for cross in (False, True):
            same = np.array_equal(outputs["numpy", cross], outputs["compiled", cross])
            print(f"  {'CC' if cross else 'AC'} outputs bit-identical: {same}")


if __name__ == "__main__":
    main()
