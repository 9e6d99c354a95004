"""Benchmark the compiled kernels against the numpy fallback.

Times the two hot loops on representative shapes and prints the speedup.
Run from the repository root:

    python3 benchmarks/bench_kernels.py
"""

from __future__ import annotations

import time

import numpy as np

from sulfsim import _kernels, coefficients, lsst, validate
from sulfsim.sulphation import _boundary_series, validate_material

try:
    from sulfsim import _speedups
except ImportError:
    _speedups = None


def timeit(fn, repeats: int = 3) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_sde(backend, n_paths: int = 64, n_steps: int = 32768) -> float:
    params = validate(7.0, 1.0, 1.0, 1.5)
    coeffs = coefficients(params)
    spec = lsst.make_truncation(coeffs, 1.0 / n_steps)
    rng = np.random.default_rng(1)
    dw = rng.normal(0.0, np.sqrt(spec.delta), size=(n_paths, n_steps))
    y0 = np.zeros(n_paths)
    args = (y0, dw, spec.delta, params.sigma, spec.a1, spec.a2, spec.c0_const,
            spec.thr, spec.f_left, spec.fp_left, spec.f_right, spec.fp_right)
    return timeit(lambda: backend.lsst_paths(*args))


def bench_pde(backend, n_paths: int = 8, n_steps: int = 5000, m: int = 150) -> float:
    params = validate(7.0, 1.0, 1.0, 1.5)
    coeffs = coefficients(params)
    mat = validate_material(0.2, -0.01, 1.0, 0.0, 10.0, 1.5)
    psi = lsst.sample_paths(params, coeffs, 0.1, n_steps, n_paths, seed=3)
    c_left, s_left, _ = _boundary_series(mat, psi, 0.1 / n_steps)
    args = (s_left, c_left, 1.5 / m, 0.1 / n_steps, m,
            mat.phi1, mat.phi2, mat.lam, mat.s0_bar, mat.c0_bar, 0, n_steps)
    return timeit(lambda: backend.solve_coupled(*args))


def main() -> None:
    rows = [("sde paths (64 x 32768)", bench_sde),
            ("coupled solve (8 x 5000 x 151)", bench_pde)]
    print(f"{'kernel':<34}{'python':>10}{'c':>10}{'speedup':>9}")
    for label, bench in rows:
        t_py = bench(_kernels)
        if _speedups is None:
            print(f"{label:<34}{t_py:>9.3f}s{'n/a':>10}{'n/a':>9}")
            continue
        t_c = bench(_speedups)
        print(f"{label:<34}{t_py:>9.3f}s{t_c:>9.3f}s{t_py / t_c:>8.1f}x")


if __name__ == "__main__":
    main()
