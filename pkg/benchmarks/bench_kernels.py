"""Time the numba kernels against their pure-numpy fallbacks.

Usage::

    python3 benchmarks/bench_kernels.py [--sizes 801 2001 4001] [--repeat 3]

Each kernel is called once untimed (JIT warm-up), then timed ``--repeat``
times; the best wall time is reported with the max relative difference
between backends.
"""

import argparse
import time

import numpy as np

from heraldpy import _kernels as k


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def rel_diff(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def cases(n):
    x = np.linspace(-4.0, 4.0, n)
    phi = np.exp(-2 * np.log(2) * x**2) * np.exp(0.3j * x)
    a = np.abs(phi) ** 2 * (x[1] - x[0])
    u = np.linspace(-8.0, 8.0, 2 * n - 1)
    return {
        "sinc2_double_sum": (
            lambda: k.sinc2_double_sum_numba(x, a, 3.0),
            lambda: k.sinc2_double_sum_numpy(x, a, 3.0),
        ),
        "density_fill": (
            lambda: k.density_fill_numba(x, phi, 3.0, 0.1),
            lambda: k.density_fill_numpy(x, phi, 3.0, 0.1),
        ),
        "dft_direct": (
            lambda: k.dft_direct_numba(x, phi, u),
            lambda: k.dft_direct_numpy(x, phi, u),
        ),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[801, 2001, 4001])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    if not k.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'kernel':<18}{'n':>7}{'numba [s]':>12}{'numpy [s]':>12}{'speed-up':>10}{'rel diff':>11}")
    for n in args.sizes:
        for name, (fast, slow) in cases(n).items():
            t_nb, out_nb = best_of(fast, args.repeat)
            t_np, out_np = best_of(slow, args.repeat)
            print(f"{name:<18}{n:>7}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>10.1f}{rel_diff(out_nb, out_np):>11.1e}")


if __name__ == "__main__":
    main()
