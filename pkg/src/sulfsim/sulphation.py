"""Coupled sulphation solver: boundary pair, splitting scheme, direct oracle.

The gypsum concentration s and calcite density c solve

    (phi(c) s)_t = (phi(c) s)_xx - lam phi(c) s c,   c_t = -lam phi(c) s c

with porosity phi(c) = phi1 + phi2 c (phi2 < 0) after scaling.  The left
boundary is driven by a realization psi of the boundary process through
the pair

    c(t, 0) = c0_bar exp(-lam int_0^t psi),   s(t, 0) = psi / phi(c(t, 0)),

with the time integral discretized by a left-endpoint sum on the time
mesh.  The field s is split as s = u + v: u solves the pure heat scheme
carrying the boundary data, v and c solve a nonlinear FTCS scheme with
coefficients

    b_m = phi2 (c_{m+1} - c_{m-1}) / (4 phi(c_m)),
    h_m = lam dt c_m (phi2 (v_m + u_m) - 1),

and the calcite update c <- c exp(-lam dt (v + u) phi(c)).  Summing the
u and v updates reproduces the direct s-c scheme exactly, which is kept
here as a slow reference oracle (step_sc).

Under the two validated conditions

    c0_bar < (4/5) phi1 / |phi2|,
    dt <= dx^2 / (2 + lam c0_bar dx^2 (1 - phi2 eta_tilde)),

every realization stays in 0 <= s < eta_tilde, 0 <= c <= c0_bar with c
pointwise non-increasing; the solver records the observed extrema so
callers can assert this.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import (
    GridMismatch,
    InitialCalciteTooLarge,
    NonFiniteState,
    NonPositiveCoefficient,
    ParameterError,
    StabilityViolated,
    TimeStepTooLarge,
)
from .heat import Grid1D
from .lsst import SdePath

_REL_TOL = 1e-12

# c0_bar must stay below this fraction of phi1/|phi2| for positivity.
CALCITE_MARGIN = 4.0 / 5.0


@dataclass(frozen=True)
class MaterialParams:
    """Porosity law, reaction rate, initial data, and the derived sup bound."""

    phi1: float
    phi2: float
    lam: float
    s0_bar: float
    c0_bar: float
    eta_tilde: float


@dataclass(frozen=True)
class BoundaryPair:
    """Left-boundary series for one realization: raw psi, c(t,0), psi-tilde."""

    psi: np.ndarray
    c_left: np.ndarray
    s_left: np.ndarray
    integral: np.ndarray


@dataclass(frozen=True)
class Diagnostics:
    """Observed extrema over all (step, node) pairs of a solve, per path."""

    s_min: np.ndarray
    s_max: np.ndarray
    c_min: np.ndarray
    c_max: np.ndarray
    u_min: np.ndarray
    u_max: np.ndarray
    c_increase_max: np.ndarray
    nonfinite: np.ndarray

    @classmethod
    def from_array(cls, diag: np.ndarray) -> "Diagnostics":
        d = np.asarray(diag, dtype=float)
        return cls(
            s_min=d[..., 0], s_max=d[..., 1], c_min=d[..., 2], c_max=d[..., 3],
            u_min=d[..., 4], u_max=d[..., 5], c_increase_max=d[..., 6],
            nonfinite=d[..., 7] != 0.0,
        )

    def take(self, i: int) -> "Diagnostics":
        return Diagnostics(
            s_min=self.s_min[i], s_max=self.s_max[i],
            c_min=self.c_min[i], c_max=self.c_max[i],
            u_min=self.u_min[i], u_max=self.u_max[i],
            c_increase_max=self.c_increase_max[i],
            nonfinite=self.nonfinite[i],
        )


@dataclass(frozen=True)
class SolutionFields:
    """Decimated space-time fields of one solve (or a batch along axis 0)."""

    times: np.ndarray
    x: np.ndarray
    u: np.ndarray
    v: np.ndarray
    c: np.ndarray
    material: MaterialParams
    diagnostics: Diagnostics

    @property
    def s(self) -> np.ndarray:
        return self.u + self.v

    @property
    def rho(self) -> np.ndarray:
        return porosity(self.material, self.c) * self.s


def validate_material(
    phi1: float, phi2: float, lam: float, s0_bar: float, c0_bar: float, eta: float
) -> MaterialParams:
    """Check the parameter constraints and derive eta_tilde = eta/phi(c0_bar)."""
    if phi1 <= 0.0:
        raise NonPositiveCoefficient(f"phi1 must be positive, got {phi1}")
    if phi2 >= 0.0:
        raise ParameterError(f"porosity slope phi2 must be negative, got {phi2}")
    if lam <= 0.0:
        raise NonPositiveCoefficient(f"reaction rate lambda must be positive, got {lam}")
    if c0_bar <= 0.0:
        raise NonPositiveCoefficient(f"initial calcite c0_bar must be positive, got {c0_bar}")
    if s0_bar < 0.0:
        raise ParameterError(f"initial concentration s0_bar must be >= 0, got {s0_bar}")
    if eta <= 0.0:
        raise NonPositiveCoefficient(f"boundary bound eta must be positive, got {eta}")
    bound = CALCITE_MARGIN * phi1 / abs(phi2)
    if c0_bar >= bound:
        raise InitialCalciteTooLarge(
            f"c0_bar = {c0_bar} must stay below (4/5) phi1/|phi2| = {bound}"
        )
    eta_tilde = eta / (phi1 + phi2 * c0_bar)
    if s0_bar > eta_tilde:
        raise ParameterError(
            f"s0_bar = {s0_bar} exceeds the bound eta_tilde = {eta_tilde}"
        )
    return MaterialParams(
        phi1=phi1, phi2=phi2, lam=lam, s0_bar=s0_bar, c0_bar=c0_bar, eta_tilde=eta_tilde
    )


def porosity(mat: MaterialParams, c):
    """phi(c) = phi1 + phi2 c."""
    return mat.phi1 + mat.phi2 * np.asarray(c, dtype=float)


def admissible_dt(mat: MaterialParams, dx: float) -> float:
    """Largest stable time step for mesh width dx."""
    return dx**2 / (2.0 + mat.lam * mat.c0_bar * dx**2 * (1.0 - mat.phi2 * mat.eta_tilde))


def check_conditions(grid: Grid1D, mat: MaterialParams) -> None:
    """Raise unless both stability conditions hold on this grid.

    The c0_bar bound is already enforced at construction; it is rechecked
    here so a hand-built MaterialParams cannot slip through.
    """
    bound = CALCITE_MARGIN * mat.phi1 / abs(mat.phi2)
    if mat.c0_bar >= bound:
        raise InitialCalciteTooLarge(
            f"c0_bar = {mat.c0_bar} must stay below (4/5) phi1/|phi2| = {bound}"
        )
    dt_max = admissible_dt(mat, grid.dx)
    if grid.dt > dt_max * (1.0 + _REL_TOL):
        raise TimeStepTooLarge(
            f"dt = {grid.dt} exceeds the admissible bound {dt_max} "
            f"for dx = {grid.dx}, lambda = {mat.lam}"
        )
    if grid.dbar > 0.5 + _REL_TOL:
        raise StabilityViolated(
            f"dt/dx^2 = {grid.dbar} exceeds the explicit-scheme bound 1/2"
        )


def _boundary_series(mat: MaterialParams, psi: np.ndarray, dt: float):
    """Batched (c_left, s_left, integral) from psi sampled on the time mesh."""
    q = np.zeros_like(psi)
    np.cumsum(psi[..., :-1], axis=-1, out=q[..., 1:])
    q *= dt
    c_left = mat.c0_bar * np.exp(-mat.lam * q)
    s_left = psi / (mat.phi1 + mat.phi2 * c_left)
    return c_left, s_left, q


def boundary_pair(path: SdePath, mat: MaterialParams) -> BoundaryPair:
    """Left-boundary series (c(t,0), psi-tilde) for one sampled path."""
    psi = np.asarray(path.psi, dtype=float)
    dt = float(path.times[1] - path.times[0])
    c_left, s_left, integral = _boundary_series(mat, psi, dt)
    return BoundaryPair(psi=psi, c_left=c_left, s_left=s_left, integral=integral)


def step_vc(grid: Grid1D, mat: MaterialParams, u_row, v_row, c_row, psi_tilde_n: float):
    """One step of the nonlinear v-c scheme (reference implementation).

    Rows hold all nodes 0..M at time n; u_row[0] is replaced by
    psi_tilde_n, the current boundary datum.  Returns (v_next, c_next).
    The right row is the mirrored-ghost closure with b_M = 0.
    """
    u = np.array(u_row, dtype=float)
    v = np.asarray(v_row, dtype=float)
    c = np.asarray(c_row, dtype=float)
    u[0] = psi_tilde_n
    dbar = grid.dbar
    phi_c = mat.phi1 + mat.phi2 * c
    b = mat.phi2 * (c[2:] - c[:-2]) / (4.0 * phi_c[1:-1])
    h = mat.lam * grid.dt * c * (mat.phi2 * (v + u) - 1.0)
    vn = np.empty_like(v)
    vn[0] = 0.0
    vn[1:-1] = (dbar * (1.0 + b) * v[2:] + dbar * (1.0 - b) * v[:-2]
                + (1.0 - 2.0 * dbar + h[1:-1]) * v[1:-1]
                + dbar * b * u[2:] + h[1:-1] * u[1:-1] - dbar * b * u[:-2])
    vn[-1] = 2.0 * dbar * v[-2] + (1.0 - 2.0 * dbar + h[-1]) * v[-1] + h[-1] * u[-1]
    cn = c * np.exp(-mat.lam * grid.dt * (v + u) * phi_c)
    if not (np.isfinite(vn).all() and np.isfinite(cn).all()):
        raise NonFiniteState("v-c update produced a non-finite value")
    return vn, cn


def step_sc(grid: Grid1D, mat: MaterialParams, s_row, c_row, s_left_next: float):
    """One step of the direct s-c scheme; the splitting must reproduce it.

    s_row[0] holds the current boundary value psi-tilde^n; s_left_next is
    the value at the new time level.  Returns (s_next, c_next).
    """
    s = np.asarray(s_row, dtype=float)
    c = np.asarray(c_row, dtype=float)
    dbar = grid.dbar
    phi_c = mat.phi1 + mat.phi2 * c
    b = mat.phi2 * (c[2:] - c[:-2]) / (4.0 * phi_c[1:-1])
    h = mat.lam * grid.dt * c * (mat.phi2 * s - 1.0)
    sn = np.empty_like(s)
    sn[0] = s_left_next
    sn[1:-1] = (dbar * (1.0 + b) * s[2:] + (1.0 - 2.0 * dbar + h[1:-1]) * s[1:-1]
                + dbar * (1.0 - b) * s[:-2])
    sn[-1] = 2.0 * dbar * s[-2] + (1.0 - 2.0 * dbar + h[-1]) * s[-1]
    cn = c * np.exp(-mat.lam * grid.dt * s * phi_c)
    if not (np.isfinite(sn).all() and np.isfinite(cn).all()):
        raise NonFiniteState("s-c update produced a non-finite value")
    return sn, cn


def solve_direct(grid: Grid1D, mat: MaterialParams, pair: BoundaryPair):
    """March the direct s-c scheme over the grid (oracle; retains everything).

    Returns (s, c) arrays of shape (N+1, M+1).
    """
    check_conditions(grid, mat)
    n, m = grid.n_steps, grid.m_last
    s = np.zeros((n + 1, m + 1))
    c = np.full((n + 1, m + 1), mat.c0_bar)
    s[0, 1:] = mat.s0_bar
    s[0, 0] = pair.s_left[0]
    c[0, 0] = pair.c_left[0]
    for j in range(n):
        s[j + 1], c[j + 1] = step_sc(grid, mat, s[j], c[j], pair.s_left[j + 1])
        c[j + 1, 0] = pair.c_left[j + 1]
    return s, c


def _subsample(psi: np.ndarray, n_steps: int) -> np.ndarray:
    """Restrict a boundary series to a coarser time mesh (no interpolation)."""
    n_fine = psi.shape[-1] - 1
    if n_fine == n_steps:
        return psi
    if n_fine < n_steps or n_fine % n_steps:
        raise GridMismatch(
            f"boundary series has {n_fine} steps, not a multiple of the "
            f"grid's {n_steps}"
        )
    return psi[..., :: n_fine // n_steps]


def solve_many(
    grid: Grid1D,
    mat: MaterialParams,
    psi: np.ndarray,
    right_bc: str = "mirror",
    time_stride: int = 1,
) -> SolutionFields:
    """Solve the coupled system for a batch of boundary paths.

    psi: (P, K+1) boundary realizations on a time mesh with K steps; K
    must be a multiple of grid.n_steps (values subsampled, no
    interpolation).  time_stride decimates the stored snapshots; it must
    divide n_steps.  right_bc selects the heat-part right closure
    ("mirror" or "onesided", see heat.step_heat).
    """
    check_conditions(grid, mat)
    if grid.m_last < 2:
        raise ValueError(f"coupled solve needs at least 2 space steps, got {grid.m_last}")
    if right_bc not in ("mirror", "onesided"):
        raise ValueError(f"right_bc must be 'mirror' or 'onesided', got {right_bc!r}")
    if time_stride < 1 or grid.n_steps % time_stride:
        raise ValueError(
            f"time_stride = {time_stride} must divide n_steps = {grid.n_steps}"
        )
    psi = np.atleast_2d(np.asarray(psi, dtype=float))
    psi = _subsample(psi, grid.n_steps)
    c_left, s_left, _ = _boundary_series(mat, psi, grid.dt)
    u, v, c, diag = kernels.solve_coupled(
        s_left, c_left, grid.dx, grid.dt, grid.m_last,
        mat.phi1, mat.phi2, mat.lam, mat.s0_bar, mat.c0_bar,
        1 if right_bc == "onesided" else 0, time_stride,
    )
    diagnostics = Diagnostics.from_array(diag)
    if diagnostics.nonfinite.any():
        raise NonFiniteState(
            f"{int(diagnostics.nonfinite.sum())} path(s) produced non-finite fields"
        )
    return SolutionFields(
        times=grid.t_nodes()[::time_stride],
        x=grid.x_nodes(),
        u=u, v=v, c=c,
        material=mat,
        diagnostics=diagnostics,
    )


def solve_system(
    grid: Grid1D,
    mat: MaterialParams,
    boundary,
    right_bc: str = "mirror",
    time_stride: int = 1,
) -> SolutionFields:
    """Solve the coupled system for one boundary realization.

    boundary may be an SdePath, a BoundaryPair, or a raw psi series on a
    time mesh nested in the grid's.  Field arrays come back with shape
    (n_out, M+1).
    """
    if isinstance(boundary, SdePath):
        psi = boundary.psi
    elif isinstance(boundary, BoundaryPair):
        psi = boundary.psi
    else:
        psi = np.asarray(boundary, dtype=float)
    fields = solve_many(grid, mat, psi[None, :], right_bc, time_stride)
    return SolutionFields(
        times=fields.times,
        x=fields.x,
        u=fields.u[0], v=fields.v[0], c=fields.c[0],
        material=mat,
        diagnostics=fields.diagnostics.take(0),
    )


def calcite_closed_form(mat: MaterialParams, s_history, dt: float) -> np.ndarray:
    """Exact-in-time calcite series at a fixed location given s there.

    c(t_n) = phi1 c0_bar / (phi(c0_bar) e^{lam phi1 Q_n} - phi2 c0_bar)
    with Q_n the left-endpoint quadrature of int_0^{t_n} s.  Serves as a
    cross-check of the discrete c-update.
    """
    s_history = np.asarray(s_history, dtype=float)
    q = np.zeros_like(s_history)
    np.cumsum(s_history[..., :-1], axis=-1, out=q[..., 1:])
    q *= dt
    phi0 = mat.phi1 + mat.phi2 * mat.c0_bar
    return mat.phi1 * mat.c0_bar / (phi0 * np.exp(mat.lam * mat.phi1 * q) - mat.phi2 * mat.c0_bar)
