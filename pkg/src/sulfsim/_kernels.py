"""Pure-numpy compute kernels.

Fallback implementations of the two hot loops, batched over paths along
axis 0.  The compiled extension in _speedups.pyx provides the same two
entry points with identical call signatures and per-element arithmetic;
backend selection happens in _backend.py.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"


def lsst_drift(y, a1, a2, c0, thr, fl, fpl, fr, fpr):
    """Truncated drift f_Delta, vectorized over y.

    Five branches: linear slope -c0 left of 0 and right of pi, quadratic
    blends on [0, thr) and (pi-thr, pi] that join f with matching value
    and slope at thr and pi-thr, exact f on the middle band.
    """
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    pi = math.pi
    m1 = y < 0.0
    m2 = ~m1 & (y < thr)
    m5 = y > pi
    m4 = ~m5 & (y > pi - thr)
    m3 = ~(m1 | m2 | m4 | m5)
    if m1.any():
        out[m1] = fl - 0.5 * thr * fpl - c0 * (y[m1] - 0.5 * thr)
    if m2.any():
        d = y[m2] - thr
        out[m2] = fl + fpl * d + (fpl + c0) * d * d / (2.0 * thr)
    if m3.any():
        half = 0.5 * y[m3]
        s, c = np.sin(half), np.cos(half)
        out[m3] = a1 * c / s - a2 * s / c
    if m4.any():
        d = y[m4] - pi + thr
        out[m4] = fr + fpr * d - (fpr + c0) * d * d / (2.0 * thr)
    if m5.any():
        out[m5] = fr + 0.5 * thr * fpr - c0 * (y[m5] - pi + 0.5 * thr)
    return out


def lsst_paths(y0, dw, dt, sigma, a1, a2, c0, thr, fl, fpl, fr, fpr):
    """Euler-Maruyama with the truncated drift: y_n = y_{n-1} + f_D dt + sigma dW.

    y0: (P,) initial transformed states; dw: (P, N) Gaussian increments
    with variance dt.  Returns the full (P, N+1) transformed paths.
    """
    y0 = np.asarray(y0, dtype=float)
    dw = np.asarray(dw, dtype=float)
    n_paths, n_steps = dw.shape
    y = np.empty((n_paths, n_steps + 1))
    y[:, 0] = y0
    cur = y0.copy()
    for j in range(n_steps):
        cur = cur + lsst_drift(cur, a1, a2, c0, thr, fl, fpl, fr, fpr) * dt + sigma * dw[:, j]
        y[:, j + 1] = cur
    return y


def solve_coupled(s_left, c_left, dx, dt, m_last, phi1, phi2, lam,
                  s0_bar, c0_bar, onesided_u, time_stride):
    """Coupled splitting scheme, batched over paths.

    s_left, c_left: (P, N+1) boundary series psi-tilde and c at x=0.
    m_last: index M of the right boundary node (M+1 nodes total).
    onesided_u: 0 keeps the mirrored-ghost right row for u, 1 replaces it
    with the first-order copy u_M = u_{M-1}.
    time_stride must divide N; snapshots are taken at steps 0, stride,
    ..., N.

    Returns (u_out, v_out, c_out, diag) with field stacks of shape
    (P, N//stride + 1, M+1) and diag of shape (P, 8) holding
    [s_min, s_max, c_min, c_max, u_min, u_max, c_increase_max, nonfinite].
    """
    s_left = np.asarray(s_left, dtype=float)
    c_left = np.asarray(c_left, dtype=float)
    n_paths, n_plus_1 = s_left.shape
    n_steps = n_plus_1 - 1
    m = m_last
    dbar = dt / dx**2
    ldt = lam * dt

    u = np.zeros((n_paths, m + 1))
    u[:, 0] = s_left[:, 0]
    v = np.full((n_paths, m + 1), float(s0_bar))
    v[:, 0] = 0.0
    c = np.full((n_paths, m + 1), float(c0_bar))
    c[:, 0] = c_left[:, 0]

    n_out = n_steps // time_stride + 1
    u_out = np.empty((n_paths, n_out, m + 1))
    v_out = np.empty_like(u_out)
    c_out = np.empty_like(u_out)
    u_out[:, 0], v_out[:, 0], c_out[:, 0] = u, v, c

    s = u + v
    diag = np.zeros((n_paths, 8))
    diag[:, 0] = s.min(axis=1)
    diag[:, 1] = s.max(axis=1)
    diag[:, 2] = c.min(axis=1)
    diag[:, 3] = c.max(axis=1)
    diag[:, 4] = u.min(axis=1)
    diag[:, 5] = u.max(axis=1)
    diag[:, 6] = -np.inf

    for step in range(n_steps):
        phi_c = phi1 + phi2 * c
        b = phi2 * (c[:, 2:] - c[:, :-2]) / (4.0 * phi_c[:, 1:m])
        h = ldt * c * (phi2 * (v + u) - 1.0)
        vn = np.empty_like(v)
        vn[:, 0] = 0.0
        vn[:, 1:m] = (dbar * (1.0 + b) * v[:, 2:] + dbar * (1.0 - b) * v[:, :-2]
                      + (1.0 - 2.0 * dbar + h[:, 1:m]) * v[:, 1:m]
                      + dbar * b * u[:, 2:] + h[:, 1:m] * u[:, 1:m] - dbar * b * u[:, :-2])
        vn[:, m] = (2.0 * dbar * v[:, m - 1] + (1.0 - 2.0 * dbar + h[:, m]) * v[:, m]
                    + h[:, m] * u[:, m])
        un = np.empty_like(u)
        un[:, 1:m] = dbar * u[:, 2:] + (1.0 - 2.0 * dbar) * u[:, 1:m] + dbar * u[:, :-2]
        if onesided_u:
            un[:, m] = un[:, m - 1]
        else:
            un[:, m] = (1.0 - 2.0 * dbar) * u[:, m] + 2.0 * dbar * u[:, m - 1]
        un[:, 0] = s_left[:, step + 1]
        cn = c * np.exp(-ldt * (v + u) * phi_c)
        cn[:, 0] = c_left[:, step + 1]

        diag[:, 6] = np.maximum(diag[:, 6], (cn - c).max(axis=1))
        u, v, c = un, vn, cn
        s = u + v
        diag[:, 0] = np.minimum(diag[:, 0], s.min(axis=1))
        diag[:, 1] = np.maximum(diag[:, 1], s.max(axis=1))
        diag[:, 2] = np.minimum(diag[:, 2], c.min(axis=1))
        diag[:, 3] = np.maximum(diag[:, 3], c.max(axis=1))
        diag[:, 4] = np.minimum(diag[:, 4], u.min(axis=1))
        diag[:, 5] = np.maximum(diag[:, 5], u.max(axis=1))
        if (step + 1) % time_stride == 0:
            k = (step + 1) // time_stride
            u_out[:, k], v_out[:, k], c_out[:, k] = u, v, c

    bad = ~(np.isfinite(u).all(axis=1) & np.isfinite(v).all(axis=1) & np.isfinite(c).all(axis=1))
    diag[:, 7] = bad.astype(float)
    return u_out, v_out, c_out, diag
