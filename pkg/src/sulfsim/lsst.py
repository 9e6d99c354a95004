"""Boundary-preserving Euler scheme for the transformed boundary process.

The transformed drift f blows up at 0 and pi, so plain Euler-Maruyama can
overshoot the state space.  The scheme tames f with a step-size-dependent
truncation f_Delta: inside [thr, pi-thr] it is exactly f, on the two
bands of width thr = Delta^k it switches to quadratic blends that match f
in value and slope at the junctions, and outside [0, pi] it continues
linearly with slope -C0.  The blend keeps f_Delta C1 and one-sided
Lipschitz with the same constant -C0 as f itself, which is what the
strong convergence argument needs.

The truncation is admissible only while the bands stay clear of the
drift's zero y*: Delta must stay below delta_star = min(y*, pi-y*, 1)^(1/k).

sigma = 0 is handled separately: the boundary ODE dpsi = alpha(gamma-psi)dt
has the closed form gamma + (psi0-gamma) exp(-alpha t), which sample_path
evaluates directly on the mesh instead of time stepping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import StepTooLarge
from .lamperti import LampertiDrift, drift, drift_derivative, forward, inverse
from .pearson import PearsonParams

DEFAULT_K = 0.22


@dataclass(frozen=True)
class TruncationSpec:
    """Frozen per-step-size truncation: band width and junction data."""

    k: float
    delta: float
    delta_star: float
    thr: float
    a1: float
    a2: float
    c0_const: float
    f_left: float
    fp_left: float
    f_right: float
    fp_right: float


@dataclass(frozen=True)
class SdePath:
    times: np.ndarray
    y: np.ndarray
    psi: np.ndarray
    seed: int | None


def delta_star(coeffs: LampertiDrift, k: float = DEFAULT_K) -> float:
    """Largest admissible step size for truncation exponent k."""
    if not 0.0 < k < 1.0:
        raise ValueError(f"truncation exponent k must lie in (0, 1), got {k}")
    reach = min(coeffs.y_star, math.pi - coeffs.y_star, 1.0)
    return reach ** (1.0 / k)


def make_truncation(coeffs: LampertiDrift, delta: float, k: float = DEFAULT_K) -> TruncationSpec:
    """Build the truncated drift data for step size delta.

    Raises StepTooLarge when delta >= delta_star(coeffs, k), i.e. when the
    blend bands would reach the drift's interior zero.
    """
    if delta <= 0.0:
        raise ValueError(f"step size must be positive, got {delta}")
    dstar = delta_star(coeffs, k)
    if delta >= dstar:
        raise StepTooLarge(
            f"step size {delta} exceeds admissible limit {dstar} "
            f"for truncation exponent k={k}"
        )
    thr = delta**k
    return TruncationSpec(
        k=k,
        delta=delta,
        delta_star=dstar,
        thr=thr,
        a1=coeffs.a1,
        a2=coeffs.a2,
        c0_const=coeffs.c0_const,
        f_left=drift(coeffs, thr),
        fp_left=drift_derivative(coeffs, thr),
        f_right=drift(coeffs, math.pi - thr),
        fp_right=drift_derivative(coeffs, math.pi - thr),
    )


def truncated_drift(spec: TruncationSpec, y):
    """Evaluate f_Delta at y (scalar or array)."""
    out = kernels.lsst_drift(
        np.asarray(y, dtype=float), spec.a1, spec.a2, spec.c0_const,
        spec.thr, spec.f_left, spec.fp_left, spec.f_right, spec.fp_right,
    )
    return out if out.ndim else float(out)


def em_step(spec: TruncationSpec, y, dw, sigma: float):
    """One Euler-Maruyama step y + f_Delta(y) delta + sigma dw.

    dw is the raw Brownian increment (variance spec.delta).
    """
    return y + truncated_drift(spec, y) * spec.delta + sigma * dw


def transformed_paths(spec: TruncationSpec, y0, dw, sigma: float) -> np.ndarray:
    """Run the scheme for a batch of paths.

    y0: (P,) start states, dw: (P, N) Brownian increments with variance
    spec.delta.  Returns (P, N+1) transformed paths including the start.
    """
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    dw = np.asarray(dw, dtype=float)
    if dw.ndim != 2 or dw.shape[0] != y0.shape[0]:
        raise ValueError(f"dw must be (n_paths, n_steps), got {dw.shape}")
    return kernels.lsst_paths(
        y0, dw, spec.delta, sigma, spec.a1, spec.a2, spec.c0_const,
        spec.thr, spec.f_left, spec.fp_left, spec.f_right, spec.fp_right,
    )


def deterministic_boundary(params: PearsonParams, times, psi0: float = 0.0) -> np.ndarray:
    """Closed-form boundary for sigma = 0: gamma + (psi0 - gamma) e^(-alpha t)."""
    t = np.asarray(times, dtype=float)
    return params.gamma + (psi0 - params.gamma) * np.exp(-params.alpha * t)


def sample_path(
    params: PearsonParams,
    coeffs: LampertiDrift,
    t_final: float,
    n_steps: int,
    seed: int | None = None,
    psi0: float = 0.0,
    k: float = DEFAULT_K,
) -> SdePath:
    """Simulate one boundary path on n_steps uniform steps over [0, t_final].

    The returned path holds both the transformed state y and the
    anti-transformed concentration psi = eta sin^2(y/2).  With sigma = 0
    the exact relaxation curve is evaluated instead of time stepping.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if t_final <= 0.0:
        raise ValueError(f"t_final must be positive, got {t_final}")
    times = np.linspace(0.0, t_final, n_steps + 1)
    if params.is_deterministic:
        psi = deterministic_boundary(params, times, psi0)
        return SdePath(times=times, y=forward(psi, params.eta), psi=psi, seed=seed)

    dt = t_final / n_steps
    spec = make_truncation(coeffs, dt, k)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0]) if seed is not None else None)
    dw = rng.normal(0.0, math.sqrt(dt), size=(1, n_steps))
    y = transformed_paths(spec, [forward(psi0, params.eta)], dw, params.sigma)[0]
    return SdePath(times=times, y=y, psi=inverse(y, params.eta), seed=seed)


def sample_paths(
    params: PearsonParams,
    coeffs: LampertiDrift,
    t_final: float,
    n_steps: int,
    n_paths: int,
    seed: int,
    psi0: float = 0.0,
    k: float = DEFAULT_K,
    first_path: int = 0,
) -> np.ndarray:
    """Simulate a batch of boundary paths; returns psi of shape (P, N+1).

    Path i draws from the independent stream SeedSequence([seed,
    first_path + i]), so any contiguous batch reproduces the same paths
    regardless of how the caller chunks the work.
    """
    times = np.linspace(0.0, t_final, n_steps + 1)
    if params.is_deterministic:
        psi = deterministic_boundary(params, times, psi0)
        return np.broadcast_to(psi, (n_paths, n_steps + 1)).copy()
    dt = t_final / n_steps
    spec = make_truncation(coeffs, dt, k)
    y0 = np.full(n_paths, forward(psi0, params.eta))
    dw = np.empty((n_paths, n_steps))
    for i in range(n_paths):
        rng = np.random.default_rng(np.random.SeedSequence([seed, first_path + i]))
        dw[i] = rng.normal(0.0, math.sqrt(dt), size=n_steps)
    y = transformed_paths(spec, y0, dw, params.sigma)
    return inverse(y, params.eta)
