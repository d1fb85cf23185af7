"""Compare the numba and numpy integer kernels.

    python3 benchmarks/bench_kernels.py [--batch 200000] [--repeat 5]

Both backends must agree on every output.  The "jit s" column is the
first call, which compiles (or loads the on-disk cache); timings are the
best of the repeats after that.  ``--wide`` adds the {-2..2} kernel search,
where numpy needs tens of seconds.
"""
import argparse
import time

import numpy as np

from wedgelat import _kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--batch", type=int, default=200_000, help="matrices per batched call")
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--wide", action="store_true", help="also run the {-2..2} kernel search with numpy (slow)")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    H = rng.integers(-9, 10, size=(args.batch, 4, 4), dtype=np.int64)
    print(f"numba available: {_kernels.HAVE_NUMBA}; default backend: {_kernels.BACKEND}")

    cases = [
        ("wedge_square_batch", lambda f: f(H), "wedge_square_batch"),
        ("det4_batch", lambda f: f(H), "det4_batch"),
        ("kernel_search {-1,0,1}", lambda f: f([-1, 0, 1]), "kernel_search"),
    ]
    if args.wide:
        cases.append(("kernel_search {-2..2}", lambda f: f([-2, -1, 0, 1, 2]), "kernel_search"))

    print(f"{'kernel':<26}{'numpy s':>12}{'numba s':>12}{'jit s':>10}{'speedup':>10}")
    for label, call, name in cases:
        t_np, out_np = best_of(lambda: call(getattr(_kernels, f"{name}_numpy")), 1 if "{-2" in label else args.repeat)
        if _kernels.HAVE_NUMBA:
            nb = getattr(_kernels, f"{name}_numba")
            start = time.perf_counter()
            call(nb)
            jit = time.perf_counter() - start
            t_nb, out_nb = best_of(lambda: call(nb), args.repeat)
            if name == "kernel_search":
                same = sorted(map(bytes, out_np)) == sorted(map(bytes, out_nb))
            else:
                same = np.array_equal(out_np, out_nb)
            if not same:
                raise SystemExit(f"{label}: backends disagree")
            print(f"{label:<26}{t_np:>12.4f}{t_nb:>12.4f}{jit:>10.2f}{t_np / t_nb:>9.1f}x")
        else:
            print(f"{label:<26}{t_np:>12.4f}{'-':>12}{'-':>10}{'-':>10}")


if __name__ == "__main__":
    main()
