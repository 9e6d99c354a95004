# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled compute kernels.

Drop-in replacement for _kernels with identical call signatures and the
same per-element arithmetic (expressions evaluate left to right exactly
as the vectorized numpy forms do).  Transcendental calls go through libm
instead of numpy's vector routines, so results can differ from the
fallback in the last ulps; consumers compare backends with a relative
tolerance, never bitwise.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, M_PI, cos, exp, isfinite, sin

cnp.import_array()

BACKEND = "c"


cdef inline double _fdelta(double y, double a1, double a2, double c0, double thr,
                           double fl, double fpl, double fr, double fpr) nogil:
    cdef double d, sh, ch
    if y < 0.0:
        return fl - 0.5 * thr * fpl - c0 * (y - 0.5 * thr)
    if y < thr:
        d = y - thr
        return fl + fpl * d + (fpl + c0) * d * d / (2.0 * thr)
    if y > M_PI:
        return fr + 0.5 * thr * fpr - c0 * (y - M_PI + 0.5 * thr)
    if y > M_PI - thr:
        d = y - M_PI + thr
        return fr + fpr * d - (fpr + c0) * d * d / (2.0 * thr)
    sh = sin(0.5 * y)
    ch = cos(0.5 * y)
    return a1 * ch / sh - a2 * sh / ch


def lsst_drift(y, double a1, double a2, double c0, double thr,
               double fl, double fpl, double fr, double fpr):
    arr = np.asarray(y, dtype=np.float64)
    flat = np.ascontiguousarray(arr).ravel()
    out = np.empty(flat.shape[0])
    cdef double[::1] vi = flat
    cdef double[::1] vo = out
    cdef Py_ssize_t i, n = flat.shape[0]
    with nogil:
        for i in range(n):
            vo[i] = _fdelta(vi[i], a1, a2, c0, thr, fl, fpl, fr, fpr)
    return out.reshape(arr.shape)


def lsst_paths(y0, dw, double dt, double sigma, double a1, double a2, double c0,
               double thr, double fl, double fpl, double fr, double fpr):
    y0a = np.ascontiguousarray(y0, dtype=np.float64)
    dwa = np.ascontiguousarray(dw, dtype=np.float64)
    cdef Py_ssize_t n_paths = dwa.shape[0], n_steps = dwa.shape[1]
    out = np.empty((n_paths, n_steps + 1))
    cdef double[:, ::1] vy = out
    cdef double[:, ::1] vdw = dwa
    cdef double[::1] vy0 = y0a
    cdef Py_ssize_t i, j
    cdef double cur
    with nogil:
        for i in range(n_paths):
            cur = vy0[i]
            vy[i, 0] = cur
            for j in range(n_steps):
                cur = cur + _fdelta(cur, a1, a2, c0, thr, fl, fpl, fr, fpr) * dt \
                    + sigma * vdw[i, j]
                vy[i, j + 1] = cur
    return out


def solve_coupled(s_left, c_left, double dx, double dt, Py_ssize_t m,
                  double phi1, double phi2, double lam,
                  double s0_bar, double c0_bar, int onesided_u,
                  Py_ssize_t time_stride):
    sl_a = np.ascontiguousarray(s_left, dtype=np.float64)
    cl_a = np.ascontiguousarray(c_left, dtype=np.float64)
    cdef Py_ssize_t n_paths = sl_a.shape[0], n_steps = sl_a.shape[1] - 1
    cdef Py_ssize_t n_out = n_steps // time_stride + 1
    cdef double dbar = dt / (dx * dx)
    cdef double ldt = lam * dt

    u_out = np.empty((n_paths, n_out, m + 1))
    v_out = np.empty((n_paths, n_out, m + 1))
    c_out = np.empty((n_paths, n_out, m + 1))
    diag = np.zeros((n_paths, 8))
    work = np.empty((6, m + 1))

    cdef double[:, ::1] vsl = sl_a
    cdef double[:, ::1] vcl = cl_a
    cdef double[:, :, ::1] vu = u_out
    cdef double[:, :, ::1] vv = v_out
    cdef double[:, :, ::1] vc = c_out
    cdef double[:, ::1] vdiag = diag
    cdef double[:, ::1] w = work
    cdef double[::1] uu, vv_, cc, un, vn, cn
    uu, vv_, cc = w[0], w[1], w[2]
    un, vn, cn = w[3], w[4], w[5]

    cdef Py_ssize_t i, j, step, k
    cdef double b, h, hm, sval, inc, pc
    cdef double smin, smax, cmin, cmax, umin, umax, incmax
    cdef bint ok

    with nogil:
        for i in range(n_paths):
            uu[0] = vsl[i, 0]
            vv_[0] = 0.0
            cc[0] = vcl[i, 0]
            for j in range(1, m + 1):
                uu[j] = 0.0
                vv_[j] = s0_bar
                cc[j] = c0_bar
            for j in range(m + 1):
                vu[i, 0, j] = uu[j]
                vv[i, 0, j] = vv_[j]
                vc[i, 0, j] = cc[j]
            smin = uu[0] + vv_[0]
            smax = smin
            cmin = cc[0]
            cmax = cmin
            umin = uu[0]
            umax = umin
            for j in range(1, m + 1):
                sval = uu[j] + vv_[j]
                if sval < smin: smin = sval
                if sval > smax: smax = sval
                if cc[j] < cmin: cmin = cc[j]
                if cc[j] > cmax: cmax = cc[j]
                if uu[j] < umin: umin = uu[j]
                if uu[j] > umax: umax = uu[j]
            incmax = -INFINITY

            for step in range(n_steps):
                for j in range(1, m):
                    pc = phi1 + phi2 * cc[j]
                    b = phi2 * (cc[j + 1] - cc[j - 1]) / (4.0 * pc)
                    h = ldt * cc[j] * (phi2 * (vv_[j] + uu[j]) - 1.0)
                    vn[j] = (dbar * (1.0 + b) * vv_[j + 1] + dbar * (1.0 - b) * vv_[j - 1]
                             + (1.0 - 2.0 * dbar + h) * vv_[j]
                             + dbar * b * uu[j + 1] + h * uu[j] - dbar * b * uu[j - 1])
                    un[j] = dbar * uu[j + 1] + (1.0 - 2.0 * dbar) * uu[j] + dbar * uu[j - 1]
                    cn[j] = cc[j] * exp(-ldt * (vv_[j] + uu[j]) * pc)
                hm = ldt * cc[m] * (phi2 * (vv_[m] + uu[m]) - 1.0)
                vn[m] = (2.0 * dbar * vv_[m - 1] + (1.0 - 2.0 * dbar + hm) * vv_[m]
                         + hm * uu[m])
                if onesided_u:
                    un[m] = un[m - 1]
                else:
                    un[m] = (1.0 - 2.0 * dbar) * uu[m] + 2.0 * dbar * uu[m - 1]
                cn[m] = cc[m] * exp(-ldt * (vv_[m] + uu[m]) * (phi1 + phi2 * cc[m]))
                vn[0] = 0.0
                un[0] = vsl[i, step + 1]
                cn[0] = vcl[i, step + 1]

                for j in range(m + 1):
                    inc = cn[j] - cc[j]
                    if inc > incmax: incmax = inc
                for j in range(m + 1):
                    uu[j] = un[j]
                    vv_[j] = vn[j]
                    cc[j] = cn[j]
                for j in range(m + 1):
                    sval = uu[j] + vv_[j]
                    if sval < smin: smin = sval
                    if sval > smax: smax = sval
                    if cc[j] < cmin: cmin = cc[j]
                    if cc[j] > cmax: cmax = cc[j]
                    if uu[j] < umin: umin = uu[j]
                    if uu[j] > umax: umax = uu[j]
                if (step + 1) % time_stride == 0:
                    k = (step + 1) // time_stride
                    for j in range(m + 1):
                        vu[i, k, j] = uu[j]
                        vv[i, k, j] = vv_[j]
                        vc[i, k, j] = cc[j]

            ok = True
            for j in range(m + 1):
                if not (isfinite(uu[j]) and isfinite(vv_[j]) and isfinite(cc[j])):
                    ok = False
                    break
            vdiag[i, 0] = smin
            vdiag[i, 1] = smax
            vdiag[i, 2] = cmin
            vdiag[i, 3] = cmax
            vdiag[i, 4] = umin
            vdiag[i, 5] = umax
            vdiag[i, 6] = incmax
            vdiag[i, 7] = 0.0 if ok else 1.0
    return u_out, v_out, c_out, diag
