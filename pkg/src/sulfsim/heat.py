"""Explicit finite differences for the heat sub-problem.

Uniform grid on [0, x_max] x [0, t_max] with M = x_max/dx space steps and
N = t_max/dt time steps.  The scheme is forward-time centered-space with
a Dirichlet value fed in at x = 0 and a zero-flux right boundary.  The
mirrored-ghost closure u_{M+1} = u_{M-1} keeps the update second order;
the one-sided alternative copies u_{M-1} into u_M after the sweep, which
costs one order locally at the wall but leaves the interior stencil
untouched.

In matrix form the interior update is U -> A U + dbar psi e_1 with A
tridiagonal, dbar = dt/dx^2.  A is similar to a symmetric matrix via
D = diag(1, ..., 1, 1/sqrt(2)), so its spectral radius equals the 2-norm
of the symmetrized matrix and stays <= 1 exactly when dbar <= 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import StabilityViolated

_REL_TOL = 1e-12

RIGHT_BC = ("mirror", "onesided")


@dataclass(frozen=True)
class Grid1D:
    """Uniform space-time grid; dx and dt must divide the extents evenly."""

    x_max: float
    t_max: float
    dx: float
    dt: float
    m_last: int = field(init=False)
    n_steps: int = field(init=False)

    def __post_init__(self) -> None:
        for name, extent, step in (("dx", self.x_max, self.dx),
                                   ("dt", self.t_max, self.dt)):
            if step <= 0.0 or extent <= 0.0:
                raise ValueError(f"grid extents and steps must be positive ({name}={step})")
            count = round(extent / step)
            if count < 1 or abs(count * step - extent) > _REL_TOL * max(1.0, extent):
                raise ValueError(
                    f"{name}={step} does not evenly divide the extent {extent}"
                )
        object.__setattr__(self, "m_last", round(self.x_max / self.dx))
        object.__setattr__(self, "n_steps", round(self.t_max / self.dt))
        if self.dbar > 0.5 + _REL_TOL:
            raise StabilityViolated(
                f"dt/dx^2 = {self.dbar} exceeds the explicit-scheme bound 1/2"
            )

    @property
    def dbar(self) -> float:
        return self.dt / self.dx**2

    def x_nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.x_max, self.m_last + 1)

    def t_nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_steps + 1)


def grid_norm(u, dx: float) -> float:
    """Discrete L2 norm (dx sum |u_m|^2)^(1/2) over all nodes."""
    u = np.asarray(u, dtype=float)
    return float(np.sqrt(dx * np.sum(u * u, axis=-1)))


def step_heat(u, dbar: float, left_value: float, right_bc: str = "mirror") -> np.ndarray:
    """One FTCS step; u holds all nodes 0..M, left Dirichlet, right zero flux."""
    if right_bc not in RIGHT_BC:
        raise ValueError(f"right_bc must be one of {RIGHT_BC}, got {right_bc!r}")
    u = np.asarray(u, dtype=float)
    un = np.empty_like(u)
    un[1:-1] = dbar * u[2:] + (1.0 - 2.0 * dbar) * u[1:-1] + dbar * u[:-2]
    if right_bc == "mirror":
        un[-1] = (1.0 - 2.0 * dbar) * u[-1] + 2.0 * dbar * u[-2]
    else:
        un[-1] = un[-2]
    un[0] = left_value
    return un


def solve_heat(grid: Grid1D, left_series, u0=None, right_bc: str = "mirror") -> np.ndarray:
    """March the scheme over the whole grid; returns (N+1, M+1) snapshots.

    left_series supplies the Dirichlet values at times 0..N (length N+1).
    u0 defaults to zero away from the boundary node.
    """
    left_series = np.asarray(left_series, dtype=float)
    if left_series.shape != (grid.n_steps + 1,):
        raise ValueError(
            f"left_series must have length n_steps+1 = {grid.n_steps + 1}, "
            f"got {left_series.shape}"
        )
    out = np.zeros((grid.n_steps + 1, grid.m_last + 1))
    if u0 is not None:
        out[0] = np.asarray(u0, dtype=float)
    out[0, 0] = left_series[0]
    for n in range(grid.n_steps):
        out[n + 1] = step_heat(out[n], grid.dbar, left_series[n + 1], right_bc)
    return out


def heat_matrix(dbar: float, size: int) -> np.ndarray:
    """Dense update matrix A for the interior-plus-wall vector (u_1, ..., u_M)."""
    a = np.zeros((size, size))
    idx = np.arange(size)
    a[idx, idx] = 1.0 - 2.0 * dbar
    a[idx[:-1], idx[:-1] + 1] = dbar
    a[idx[1:], idx[1:] - 1] = dbar
    a[-1, -2] = 2.0 * dbar
    return a


def symmetrized_matrix(dbar: float, size: int) -> np.ndarray:
    """Similarity transform D A D^-1 with D = diag(1, ..., 1, 1/sqrt(2))."""
    a = heat_matrix(dbar, size)
    d = np.ones(size)
    d[-1] = 1.0 / np.sqrt(2.0)
    return (d[:, None] * a) / d[None, :]


def spectral_bound_check(dbar: float, size: int) -> tuple[float, bool]:
    """Spectral radius of A and whether it satisfies the stability bound.

    Computed from the symmetrized matrix, whose eigenvalues coincide with
    those of A and are real.
    """
    eigs = np.linalg.eigvalsh(symmetrized_matrix(dbar, size))
    rho = float(np.max(np.abs(eigs)))
    return rho, rho <= 1.0 + _REL_TOL
