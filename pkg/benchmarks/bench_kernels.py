"""Benchmark the numba kernels against the pure-numpy fallback.

Run:  python benchmarks/bench_kernels.py
The numpy path can also be forced package-wide with SU11SQUEEZE_NO_NUMBA=1.
"""

import math
import time

import numpy as np

from su11squeeze import kernels
from su11squeeze.kernels import _fold_numpy, _rk4_numpy, record_steps

REPEATS = 5


def timeit(fn, *args):
    best = math.inf
    for _ in range(REPEATS):
        start = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, out


def bench_fold(n):
    tau = 120.0 / n
    ts = tau * np.arange(1, n + 1)
    omega = 0.5 * ((1.0 + 1.04) + (1.0 - 1.04) * np.cos(2.04 * ts))
    rec = record_steps(n, max(1, n // 5000))

    def run(impl):
        alpha = np.empty(rec.shape[0], np.complex128)
        beta = np.empty_like(alpha)
        gamma = np.empty_like(alpha)
        defect = np.empty(rec.shape[0], np.float64)
        return impl(omega, 1.0, tau, rec, alpha, beta, gamma, defect), alpha

    t_np, (_, a_np) = timeit(lambda: run(_fold_numpy))
    if kernels._HAVE_NUMBA:
        run(kernels._fold_numba)  # compile before timing
        t_nb, (_, a_nb) = timeit(lambda: run(kernels._fold_numba))
        agree = np.max(np.abs(a_np - a_nb))
    else:
        t_nb, agree = math.nan, math.nan
    print(f"coefficient fold  N={n:>9,}: numpy {t_np * 1e3:8.1f} ms | numba {t_nb * 1e3:8.1f} ms "
          f"| speedup {t_np / t_nb:6.1f}x | max |dalpha| {agree:.1e}")


def bench_rk4(n_segments, dim):
    tau = 1e-3
    ts = tau * np.arange(1, n_segments + 1)
    omega = 0.5 * ((1.0 + 1.04) + (1.0 - 1.04) * np.cos(2.04 * ts))
    psi0 = np.zeros(dim, np.complex128)
    psi0[0] = 1.0

    t_np, out_np = timeit(_rk4_numpy, omega, 1.0, tau, psi0.copy(), 4)
    if kernels._HAVE_NUMBA:
        kernels._rk4_numba(omega[:2], 1.0, tau, psi0.copy(), 4)  # compile
        t_nb, out_nb = timeit(lambda: kernels._rk4_numba(omega, 1.0, tau, psi0.copy(), 4))
        agree = np.max(np.abs(out_np[0] - out_nb[0]))
    else:
        t_nb, agree = math.nan, math.nan
    print(f"RK4 sweep  segs={n_segments:>7,} dim={dim:>4}: numpy {t_np * 1e3:8.1f} ms "
          f"| numba {t_nb * 1e3:8.1f} ms | speedup {t_np / t_nb:6.1f}x | max |dpsi| {agree:.1e}")


def main():
    print(f"active backend by default: {kernels.active_backend()}")
    print("=" * 96)
    for n in (100_000, 1_000_000):
        bench_fold(n)
    for n_segments, dim in ((20_000, 128), (20_000, 256)):
        bench_rk4(n_segments, dim)


if __name__ == "__main__":
    main()
