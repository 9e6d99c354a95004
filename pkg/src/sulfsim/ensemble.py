"""Monte Carlo orchestration and the statistical estimators built on it.

Four experiment families:

* strong_errors: pathwise strong-error ladders for the boundary scheme.
  A fine reference path at step delta_ref and its coarsenings share the
  same Brownian increments (coarse increments are partial sums of fine
  ones), the errors are measured on the anti-transformed process, and
  the orders come from an unweighted log-log least-squares fit.
* spatial_accuracy: pathwise spatial orders for the coupled solver on a
  ladder of 2:1 nested grids driven by one shared boundary path, using
  the dx-weighted Euclidean norm restricted to the coarser grid's nodes.
* run_ensemble / field_statistics / rmsd: per-node sample statistics of
  the solution fields over independent boundary realizations, and
  root-mean-square differences against the noise-free run.
* ks_invariant: Kolmogorov-Smirnov distance between the pooled late-time
  boundary marginal and the scaled-Beta invariant law.

Work is fanned out in fixed-size path chunks; chunk results are merged
in chunk order, so outputs are identical for any thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from . import lsst
from .errors import (
    GridMismatch,
    GridsNotNested,
    InsufficientPaths,
    ParameterError,
    StabilityViolated,
)
from .heat import Grid1D, grid_norm
from .lamperti import LampertiDrift, forward, inverse
from .lsst import DEFAULT_K, make_truncation, transformed_paths
from .pearson import PearsonParams, invariant_cdf
from .sulphation import Diagnostics, MaterialParams, SolutionFields, solve_many

MIN_PATHS = 100

FIELD_QUANTITIES = ("u", "v", "s", "c", "rho")


def _ordered_map(fn, jobs, threads: int) -> list:
    if threads <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, jobs))


def _chunks(n_total: int, chunk_size: int) -> list[tuple[int, int]]:
    return [(s, min(chunk_size, n_total - s)) for s in range(0, n_total, chunk_size)]


@dataclass(frozen=True)
class ConvergenceStudy:
    """Strong-error ladder plus fitted orders e ~ C delta^q."""

    delta_ref: float
    deltas: np.ndarray
    n_paths: int
    errors_final: np.ndarray
    errors_uniform: np.ndarray
    slope_final: float
    slope_uniform: float
    c_final: float
    c_uniform: float


def fit_order(deltas, errors) -> tuple[float, float]:
    """Least-squares fit of log e = log C + q log delta; returns (q, C)."""
    deltas = np.asarray(deltas, dtype=float)
    errors = np.asarray(errors, dtype=float)
    slope, intercept = np.polyfit(np.log(deltas), np.log(errors), 1)
    return float(slope), float(math.exp(intercept))


def strong_errors(
    params: PearsonParams,
    coeffs: LampertiDrift,
    *,
    t_final: float = 1.0,
    delta_ref: float = 2.0**-15,
    ratios: tuple[int, ...] = (16, 32, 64, 128, 256),
    n_paths: int = 2000,
    seed: int = 0,
    psi0: float = 0.0,
    k: float = DEFAULT_K,
    chunk_size: int = 250,
    threads: int = 1,
) -> ConvergenceStudy:
    """Estimate strong errors of the boundary scheme against a fine reference.

    For each path, one trajectory at step delta_ref and one at each
    coarse step ratio*delta_ref are driven by the same increments; the
    estimators are the sample L2 error at the final time and the sup
    over coarse nodes of the sample L2 error, both on the
    anti-transformed process.
    """
    if n_paths < MIN_PATHS:
        raise InsufficientPaths(
            f"strong error estimation needs at least {MIN_PATHS} paths, got {n_paths}"
        )
    if params.is_deterministic:
        raise ParameterError("strong error estimation needs sigma > 0")
    n_fine = round(t_final / delta_ref)
    if abs(n_fine * delta_ref - t_final) > 1e-12 * max(1.0, t_final):
        raise ValueError(f"delta_ref={delta_ref} does not evenly divide t_final={t_final}")
    ratios = tuple(int(r) for r in ratios)
    for r in ratios:
        if r < 2 or n_fine % r:
            raise ValueError(f"coarsening ratio {r} must be >= 2 and divide {n_fine}")
    spec_fine = make_truncation(coeffs, delta_ref, k)
    specs = [make_truncation(coeffs, r * delta_ref, k) for r in ratios]
    y0 = forward(psi0, params.eta)
    sd = math.sqrt(delta_ref)

    def job(bounds: tuple[int, int]):
        start, count = bounds
        dw = np.empty((count, n_fine))
        for i in range(count):
            rng = np.random.default_rng(np.random.SeedSequence([seed, start + i]))
            dw[i] = rng.normal(0.0, sd, size=n_fine)
        y_fine = transformed_paths(spec_fine, np.full(count, y0), dw, params.sigma)
        psi_fine = inverse(y_fine, params.eta)
        del y_fine
        e2 = np.zeros(len(ratios))
        u2 = [np.zeros(n_fine // r + 1) for r in ratios]
        for ri, (r, spec) in enumerate(zip(ratios, specs)):
            dw_coarse = dw.reshape(count, n_fine // r, r).sum(axis=2)
            y_coarse = transformed_paths(spec, np.full(count, y0), dw_coarse, params.sigma)
            diff = psi_fine[:, ::r] - inverse(y_coarse, params.eta)
            e2[ri] = np.sum(diff[:, -1] ** 2)
            u2[ri] += np.sum(diff**2, axis=0)
        return e2, u2

    parts = _ordered_map(job, _chunks(n_paths, chunk_size), threads)
    e2_tot = np.zeros(len(ratios))
    u2_tot = [np.zeros(n_fine // r + 1) for r in ratios]
    for e2, u2 in parts:
        e2_tot += e2
        for ri in range(len(ratios)):
            u2_tot[ri] += u2[ri]
    errors_final = np.sqrt(e2_tot / n_paths)
    errors_uniform = np.array([math.sqrt(np.max(u2 / n_paths)) for u2 in u2_tot])
    deltas = np.array(ratios, dtype=float) * delta_ref
    slope_final, c_final = fit_order(deltas, errors_final)
    slope_uniform, c_uniform = fit_order(deltas, errors_uniform)
    return ConvergenceStudy(
        delta_ref=delta_ref, deltas=deltas, n_paths=n_paths,
        errors_final=errors_final, errors_uniform=errors_uniform,
        slope_final=slope_final, slope_uniform=slope_uniform,
        c_final=c_final, c_uniform=c_uniform,
    )


@dataclass(frozen=True)
class AccuracyStudy:
    """Pathwise spatial orders on a nested dx ladder, per seed."""

    dt: float
    dxs: tuple[float, ...]
    seeds: tuple[int, ...]
    diff_norms_rho: np.ndarray
    diff_norms_c: np.ndarray
    p_rho: np.ndarray
    p_c: np.ndarray


def pairwise_diff_norms(fields: list, dxs) -> np.ndarray:
    """Weighted norms of consecutive-grid differences on the coarse nodes.

    fields[j] is a nodal array on the grid with spacing dxs[j]; grid j+1
    must halve grid j so its even-index nodes coincide with grid j.
    """
    out = np.empty(len(fields) - 1)
    for j in range(len(fields) - 1):
        out[j] = grid_norm(fields[j] - fields[j + 1][::2], dxs[j])
    return out


def orders_from_diff_norms(diff_norms) -> np.ndarray:
    """p_j = log2(||g_j - g_{j+1}|| / ||g_{j+1} - g_{j+2}||)."""
    d = np.asarray(diff_norms, dtype=float)
    return np.log2(d[:-1] / d[1:])


def spatial_accuracy(
    params: PearsonParams,
    coeffs: LampertiDrift,
    mat: MaterialParams,
    *,
    x_max: float = 1.5,
    t_final: float = 1.0,
    dt: float = 2.0**-19,
    dxs: tuple[float, ...] = (0.125, 0.0625, 0.03125),
    seeds: tuple[int, ...] = (5, 10, 14),
    right_bc: str = "onesided",
    psi0: float = 0.0,
    k: float = DEFAULT_K,
    threads: int = 1,
) -> AccuracyStudy:
    """Pathwise spatial accuracy of rho and c at the final time.

    One boundary path per seed is reused across all grids (the time mesh
    is shared, only dx varies), so the differences isolate the spatial
    discretization.  Orders are computed for each consecutive grid
    triple from the weighted difference norms.
    """
    if len(dxs) < 3:
        raise GridsNotNested(f"need at least 3 grids for an order estimate, got {len(dxs)}")
    for j in range(len(dxs) - 1):
        if abs(dxs[j] / dxs[j + 1] - 2.0) > 1e-12:
            raise GridsNotNested(
                f"grid ladder must halve dx at each level, got {dxs[j]} -> {dxs[j + 1]}"
            )
    grids = [Grid1D(x_max, t_final, dx, dt) for dx in dxs]
    n_steps = grids[0].n_steps

    def job(seed: int):
        path = lsst.sample_path(params, coeffs, t_final, n_steps, seed, psi0, k)
        rho_final, c_final = [], []
        for grid in grids:
            fields = solve_many(grid, mat, path.psi[None, :], right_bc,
                                time_stride=grid.n_steps)
            rho_final.append(fields.rho[0, -1])
            c_final.append(fields.c[0, -1])
        return pairwise_diff_norms(rho_final, dxs), pairwise_diff_norms(c_final, dxs)

    parts = _ordered_map(job, list(seeds), threads)
    diff_rho = np.stack([p[0] for p in parts])
    diff_c = np.stack([p[1] for p in parts])
    return AccuracyStudy(
        dt=dt, dxs=tuple(dxs), seeds=tuple(seeds),
        diff_norms_rho=diff_rho, diff_norms_c=diff_c,
        p_rho=np.stack([orders_from_diff_norms(d) for d in diff_rho]),
        p_c=np.stack([orders_from_diff_norms(d) for d in diff_c]),
    )


@dataclass(frozen=True)
class FieldStatistics:
    """Per-node sample statistics over an ensemble."""

    mean: np.ndarray
    std: np.ndarray
    p25: np.ndarray
    p50: np.ndarray
    p75: np.ndarray
    n_paths: int


def nearest_rank(sorted_samples: np.ndarray, q: float) -> np.ndarray:
    """Nearest-rank percentile along axis 0 of an already sorted stack."""
    n = sorted_samples.shape[0]
    rank = min(n, max(1, math.ceil(q * n)))
    return sorted_samples[rank - 1]


def field_statistics(samples, quantity: str | None = None) -> FieldStatistics:
    """Sample mean, unbiased std, and nearest-rank quartiles along axis 0.

    samples is either a stacked array (paths first) or a list of
    SolutionFields, in which case quantity names the attribute to stack.
    """
    if not isinstance(samples, np.ndarray):
        if quantity is None:
            raise ValueError("quantity is required when passing SolutionFields")
        samples = np.stack([getattr(f, quantity) for f in samples])
    if samples.shape[0] < 2:
        raise ValueError(f"statistics need at least 2 paths, got {samples.shape[0]}")
    srt = np.sort(samples, axis=0)
    return FieldStatistics(
        mean=samples.mean(axis=0),
        std=samples.std(axis=0, ddof=1),
        p25=nearest_rank(srt, 0.25),
        p50=nearest_rank(srt, 0.50),
        p75=nearest_rank(srt, 0.75),
        n_paths=samples.shape[0],
    )


class _RunningMoments:
    """Streaming (count, mean, M2) accumulator merged chunk by chunk."""

    def __init__(self) -> None:
        self.n = 0
        self.mean: np.ndarray | None = None
        self.m2: np.ndarray | None = None

    def add_chunk(self, x: np.ndarray) -> None:
        nb = x.shape[0]
        mb = x.mean(axis=0)
        m2b = np.sum((x - mb) ** 2, axis=0)
        if self.n == 0:
            self.n, self.mean, self.m2 = nb, mb, m2b
            return
        na = self.n
        delta = mb - self.mean
        self.n = na + nb
        self.mean = self.mean + delta * (nb / self.n)
        self.m2 = self.m2 + m2b + delta**2 * (na * nb / self.n)

    def std(self) -> np.ndarray:
        return np.sqrt(self.m2 / (self.n - 1))


def assert_bounds(diag: Diagnostics, mat: MaterialParams) -> None:
    """Fail loudly if a solve left the theoretically guaranteed box.

    Tiny relative slack absorbs last-ulp rounding; anything beyond it
    means the step-size conditions did not do their job.
    """
    slack_s = 1e-12 * mat.eta_tilde
    slack_c = 1e-12 * mat.c0_bar
    if (np.min(diag.s_min) < -slack_s or np.max(diag.s_max) >= mat.eta_tilde + slack_s
            or np.min(diag.c_min) < -slack_c or np.max(diag.c_max) > mat.c0_bar + slack_c):
        raise StabilityViolated(
            "solution left [0, eta_tilde) x [0, c0_bar]: "
            f"s in [{np.min(diag.s_min)}, {np.max(diag.s_max)}], "
            f"c in [{np.min(diag.c_min)}, {np.max(diag.c_max)}]"
        )
    if np.max(diag.c_increase_max) > 10.0 * slack_c:
        raise StabilityViolated(
            f"calcite increased by {np.max(diag.c_increase_max)} at some node"
        )


@dataclass(frozen=True)
class EnsembleResult:
    """Retained decimated samples and their per-node statistics."""

    times: np.ndarray
    x: np.ndarray
    n_paths: int
    stats: dict[str, FieldStatistics]
    samples: dict[str, np.ndarray]
    diagnostics: Diagnostics


def run_ensemble(
    params: PearsonParams,
    coeffs: LampertiDrift,
    grid: Grid1D,
    mat: MaterialParams,
    *,
    n_paths: int,
    seed: int,
    time_stride: int = 1,
    quantities: tuple[str, ...] = ("s", "c", "rho"),
    right_bc: str = "mirror",
    psi0: float = 0.0,
    k: float = DEFAULT_K,
    chunk_size: int = 32,
    threads: int = 1,
) -> EnsembleResult:
    """Solve the coupled system over independent boundary paths.

    Path i uses the stream SeedSequence([seed, i]).  Mean and std are
    accumulated streamingly in chunk order; percentile estimates retain
    the decimated snapshots, so time_stride controls the memory
    footprint.  Every path's bounds are checked via assert_bounds.
    """
    if n_paths < 2:
        raise ValueError(f"ensemble needs at least 2 paths, got {n_paths}")
    for q in quantities:
        if q not in FIELD_QUANTITIES:
            raise ValueError(f"unknown quantity {q!r}, expected one of {FIELD_QUANTITIES}")

    def job(bounds: tuple[int, int]):
        start, count = bounds
        psi = lsst.sample_paths(params, coeffs, grid.t_max, grid.n_steps,
                                count, seed, psi0, k, first_path=start)
        fields = solve_many(grid, mat, psi, right_bc, time_stride)
        assert_bounds(fields.diagnostics, mat)
        return {q: getattr(fields, q) for q in quantities}, fields.diagnostics

    parts = _ordered_map(job, _chunks(n_paths, chunk_size), threads)
    samples = {q: np.concatenate([p[0][q] for p in parts]) for q in quantities}
    moments = {q: _RunningMoments() for q in quantities}
    for part, _ in parts:
        for q in quantities:
            moments[q].add_chunk(part[q])
    diag = Diagnostics.from_array(np.concatenate([
        np.stack([p[1].s_min, p[1].s_max, p[1].c_min, p[1].c_max,
                  p[1].u_min, p[1].u_max, p[1].c_increase_max,
                  p[1].nonfinite.astype(float)], axis=-1)
        for p in parts
    ]))
    stats = {}
    for q in quantities:
        srt = np.sort(samples[q], axis=0)
        stats[q] = FieldStatistics(
            mean=moments[q].mean, std=moments[q].std(),
            p25=nearest_rank(srt, 0.25), p50=nearest_rank(srt, 0.50),
            p75=nearest_rank(srt, 0.75), n_paths=n_paths,
        )
    grid_times = grid.t_nodes()[::time_stride]
    return EnsembleResult(
        times=grid_times, x=grid.x_nodes(), n_paths=n_paths,
        stats=stats, samples=samples, diagnostics=diag,
    )


def rmsd(result: EnsembleResult, baseline: SolutionFields,
         quantities: tuple[str, ...] | None = None) -> dict[str, np.ndarray]:
    """Per-node root-mean-square difference against a noise-free run.

    baseline must live on the identical export grid (same times and
    nodes); the usual baseline is the sigma = 0 solve.
    """
    if (baseline.times.shape != result.times.shape
            or baseline.x.shape != result.x.shape
            or not np.allclose(baseline.times, result.times, rtol=1e-12, atol=0.0)
            or not np.allclose(baseline.x, result.x, rtol=1e-12, atol=0.0)):
        raise GridMismatch("ensemble and baseline are not on the same export grid")
    if quantities is None:
        quantities = tuple(result.samples)
    out = {}
    for q in quantities:
        if q not in result.samples:
            raise ValueError(f"quantity {q!r} was not retained in the ensemble")
        diff = result.samples[q] - getattr(baseline, q)
        out[q] = np.sqrt(np.mean(diff**2, axis=0))
    return out


@dataclass(frozen=True)
class KsResult:
    statistic: float
    n_samples: int
    n_paths: int


def ks_invariant(
    params: PearsonParams,
    coeffs: LampertiDrift,
    *,
    n_paths: int = 500,
    t_final: float = 5.0,
    n_steps: int = 251256,
    burn_in: float = 3.0,
    sample_stride: int = 500,
    seed: int = 2026,
    psi0: float = 0.0,
    k: float = DEFAULT_K,
    chunk_size: int = 20,
    threads: int = 1,
) -> KsResult:
    """Kolmogorov-Smirnov distance of the pooled late-time marginal.

    Pools every sample_stride-th state with t >= burn_in across paths
    and compares against the exact invariant CDF.  Long horizons with
    burn-in make the pooled sample close to stationary.
    """
    if params.is_deterministic:
        raise ParameterError("invariant-law comparison needs sigma > 0")
    times = np.linspace(0.0, t_final, n_steps + 1)
    keep = (np.arange(n_steps + 1) % sample_stride == 0) & (times >= burn_in)
    if not keep.any():
        raise ValueError("no sampling times survive the burn-in window")

    def job(bounds: tuple[int, int]):
        start, count = bounds
        psi = lsst.sample_paths(params, coeffs, t_final, n_steps,
                                count, seed, psi0, k, first_path=start)
        return psi[:, keep].ravel()

    pooled = np.concatenate(_ordered_map(job, _chunks(n_paths, chunk_size), threads))
    stat = sps.kstest(pooled, lambda x: invariant_cdf(params, x)).statistic
    return KsResult(statistic=float(stat), n_samples=pooled.size, n_paths=n_paths)
