# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the pure-Python marches (see kernels/__init__.py for
the shared contract and status codes).

Radial profiles are dispatched on the integer kinds of profile_kinds.py;
the formulas here must mirror that table exactly (test_kernels.py checks
every kind pointwise against the Python profiles).
"""

from libc.math cimport NAN, cos, cosh, fabs, isfinite, pow, sin, sinh, tanh

import numpy as np


cdef inline double pval(int kind, double p0, double p1, double R) noexcept nogil:
    cdef double s, t
    if kind == 0:    # const
        return p0
    elif kind == 1:  # power
        return p0 * pow(R, p1)
    elif kind == 2:  # sin^2
        s = sin(R)
        return s * s
    elif kind == 3:  # cos^2(R/p0)
        s = cos(R / p0)
        return s * s
    elif kind == 4:  # sinh^2
        s = sinh(R)
        return s * s
    elif kind == 5:  # cosh^2
        s = cosh(R)
        return s * s
    elif kind == 6:  # p0 sin^2 + cos^2
        s = sin(R)
        t = cos(R)
        return p0 * s * s + t * t
    elif kind == 7:  # p0 tanh^2
        t = tanh(R)
        return p0 * t * t
    elif kind == 8:  # 1/(1 - p0/R)
        return R / (R - p0)
    elif kind == 9:  # 1 - p0/R
        return 1.0 - p0 / R
    elif kind == 10:  # (p0 + p1 cos R)^2
        s = p0 + p1 * cos(R)
        return s * s
    elif kind == 11:  # 1 + R^2
        return 1.0 + R * R
    return NAN


cdef inline double pder(int kind, double p0, double p1, double R) noexcept nogil:
    cdef double s, t
    if kind == 0:
        return 0.0
    elif kind == 1:
        return p0 * p1 * pow(R, p1 - 1.0)
    elif kind == 2:
        return sin(2.0 * R)
    elif kind == 3:
        return -sin(2.0 * R / p0) / p0
    elif kind == 4:
        return sinh(2.0 * R)
    elif kind == 5:
        return sinh(2.0 * R)
    elif kind == 6:
        return (p0 - 1.0) * sin(2.0 * R)
    elif kind == 7:
        t = tanh(R)
        return 2.0 * p0 * t * (1.0 - t * t)
    elif kind == 8:
        s = R - p0
        return -p0 / (s * s)
    elif kind == 9:
        return p0 / (R * R)
    elif kind == 10:
        return -2.0 * p1 * sin(R) * (p0 + p1 * cos(R))
    elif kind == 11:
        return 2.0 * R
    return NAN


STATUS_OK = 0
STATUS_DOMAIN = 1
STATUS_DRIFT = 2
STATUS_NAN = 3


def profile_value(int kind, double p0, double p1, double R):
    """Debug hook for the equivalence tests."""
    return pval(kind, p0, p1, R)


def profile_deriv(int kind, double p0, double p1, double R):
    return pder(kind, p0, p1, R)


def integrate_r(int ak, double ap0, double ap1, int bk, double bp0, double bp1,
                double c1, double n2, double c4, double dn,
                double R0, double V0, double t0, double dt, Py_ssize_t nsteps,
                double r_lo, double r_hi, double tol, int method):
    cdef double[::1] Rs = np.empty(nsteps + 1)
    cdef double[::1] Vs = np.empty(nsteps + 1)
    cdef double[::1] drift = np.empty(nsteps + 1)
    cdef double R = R0, V = V0
    cdef double a, b, phip1, d
    cdef double k2r, k2v, k3r, k3v, k4r, k4v, vh
    cdef Py_ssize_t i = 0, idx = nsteps
    cdef int status = 0

    # quotient-rule phi' evaluated inline; phi for the drift check
    while True:
        b = pval(bk, bp0, bp1, R)
        if not (r_lo < R < r_hi) or not (b > 0.0):
            status = 1
            idx = i
            Rs[i] = R
            Vs[i] = V
            drift[i] = NAN
            break
        if not (isfinite(R) and isfinite(V)):
            status = 3
            idx = i
            Rs[i] = R
            Vs[i] = V
            drift[i] = NAN
            break
        Rs[i] = R
        Vs[i] = V
        a = pval(ak, ap0, ap1, R)
        d = fabs(V * V - (c1 * b * b + n2 * b + c4) / (dn * a * b))
        drift[i] = d
        if d > tol * (i * dt + dt):
            status = 2
            idx = i
            break
        if i == nsteps:
            break
        if method == 0:  # RK4 on (R, V)
            phip1 = _phip(ak, ap0, ap1, bk, bp0, bp1, c1, n2, c4, dn, R)
            k2v = _phip(ak, ap0, ap1, bk, bp0, bp1, c1, n2, c4, dn, R + 0.5 * dt * V)
            k2r = V + 0.5 * dt * 0.5 * phip1
            k3v = _phip(ak, ap0, ap1, bk, bp0, bp1, c1, n2, c4, dn, R + 0.5 * dt * k2r)
            k3r = V + 0.5 * dt * 0.5 * k2v
            k4v = _phip(ak, ap0, ap1, bk, bp0, bp1, c1, n2, c4, dn, R + dt * k3r)
            k4r = V + dt * 0.5 * k3v
            R += dt / 6.0 * (V + 2.0 * k2r + 2.0 * k3r + k4r)
            V += dt / 6.0 * 0.5 * (phip1 + 2.0 * k2v + 2.0 * k3v + k4v)
        else:  # velocity Verlet
            vh = V + 0.25 * dt * _phip(ak, ap0, ap1, bk, bp0, bp1, c1, n2, c4, dn, R)
            R += dt * vh
            V = vh + 0.25 * dt * _phip(ak, ap0, ap1, bk, bp0, bp1, c1, n2, c4, dn, R)
        i += 1

    cdef Py_ssize_t n = idx + 1 if status != 0 else nsteps + 1
    return (np.asarray(Rs)[:n], np.asarray(Vs)[:n], np.asarray(drift)[:n], status, idx)


cdef inline double _phip(int ak, double ap0, double ap1, int bk, double bp0, double bp1,
                         double c1, double n2, double c4, double dn, double R) noexcept nogil:
    cdef double a = pval(ak, ap0, ap1, R)
    cdef double b = pval(bk, bp0, bp1, R)
    cdef double ap = pder(ak, ap0, ap1, R)
    cdef double bp = pder(bk, bp0, bp1, R)
    cdef double num = c1 * b * b + n2 * b + c4
    cdef double nump = (2.0 * c1 * b + n2) * bp
    cdef double den = dn * a * b
    cdef double denp = dn * (ap * b + a * bp)
    return (nump * den - num * denp) / (den * den)


def wave_march(int ak, double ap0, double ap1, int bk, double bp0, double bp1,
               double del2,
               double[::1] Rm, double[::1] Sm, double[::1] Rc, double[::1] Sc,
               double[:, ::1] bc, double dx, double dy, Py_ssize_t nsteps,
               double cap, int ncorr):
    cdef Py_ssize_t npts = Rm.shape[0]
    cdef Py_ssize_t m = npts - 2
    # per-step spatial pieces (depend only on the current level)
    cdef double[::1] CR = np.empty(m)
    cdef double[::1] CS = np.empty(m)
    cdef double[::1] cA = np.empty(m)
    cdef double[::1] cB = np.empty(m)
    cdef double[::1] coef = np.empty(m)
    cdef double[::1] Rn = np.empty(npts)
    cdef double[::1] Sn = np.empty(npts)
    cdef double[::1] Rp = np.empty(npts)
    cdef double[::1] Sp = np.empty(npts)
    cdef Py_ssize_t n, j
    cdef int it
    cdef double A, Ap, B, Bp, Ri, Rxx, Sxx, Rx, Sx, Ry, Sy, fR, fS, raw
    cdef double dx2 = dx * dx, dy2 = dy * dy
    cdef int status = 0
    cdef Py_ssize_t bad = nsteps

    for n in range(1, nsteps):
        for j in range(m):
            Ri = Rc[j + 1]
            A = pval(ak, ap0, ap1, Ri)
            Ap = pder(ak, ap0, ap1, Ri)
            B = pval(bk, bp0, bp1, Ri)
            Bp = pder(bk, bp0, bp1, Ri)
            cA[j] = Ap / (2.0 * A)
            cB[j] = del2 * Bp / (2.0 * A)
            if B != 0.0:
                raw = Bp / B
                if raw > cap:
                    raw = cap
                elif raw < -cap:
                    raw = -cap
            else:
                raw = 0.0 if Bp == 0.0 else (cap if Bp > 0.0 else -cap)
            coef[j] = raw
            Rxx = (Rc[j + 2] - 2.0 * Rc[j + 1] + Rc[j]) / dx2
            Sxx = (Sc[j + 2] - 2.0 * Sc[j + 1] + Sc[j]) / dx2
            Rx = (Rc[j + 2] - Rc[j]) / (2.0 * dx)
            Sx = (Sc[j + 2] - Sc[j]) / (2.0 * dx)
            CR[j] = Rxx + cA[j] * Rx * Rx + cB[j] * Sx * Sx
            CS[j] = Sxx + coef[j] * Rx * Sx
        # predictor: backward y-derivative
        for j in range(m):
            Ry = (Rc[j + 1] - Rm[j + 1]) / dy
            Sy = (Sc[j + 1] - Sm[j + 1]) / dy
            fR = CR[j] - cA[j] * Ry * Ry - cB[j] * Sy * Sy
            fS = CS[j] - coef[j] * Ry * Sy
            Rn[j + 1] = 2.0 * Rc[j + 1] - Rm[j + 1] + dy2 * fR
            Sn[j + 1] = 2.0 * Sc[j + 1] - Sm[j + 1] + dy2 * fS
        Rn[0] = bc[n + 1, 0]
        Rn[npts - 1] = bc[n + 1, 1]
        Sn[0] = bc[n + 1, 2]
        Sn[npts - 1] = bc[n + 1, 3]
        # correctors: centered y-derivative through the new level
        for it in range(ncorr):
            for j in range(npts):
                Rp[j] = Rn[j]
                Sp[j] = Sn[j]
            for j in range(m):
                Ry = (Rp[j + 1] - Rm[j + 1]) / (2.0 * dy)
                Sy = (Sp[j + 1] - Sm[j + 1]) / (2.0 * dy)
                fR = CR[j] - cA[j] * Ry * Ry - cB[j] * Sy * Sy
                fS = CS[j] - coef[j] * Ry * Sy
                Rn[j + 1] = 2.0 * Rc[j + 1] - Rm[j + 1] + dy2 * fR
                Sn[j + 1] = 2.0 * Sc[j + 1] - Sm[j + 1] + dy2 * fS
        for j in range(npts):
            if not (isfinite(Rn[j]) and isfinite(Sn[j])):
                status = 3
                bad = n
                break
        if status != 0:
            return (np.asarray(Rc).copy(), np.asarray(Sc).copy(), status, bad)
        for j in range(npts):
            Rm[j] = Rc[j]
            Sm[j] = Sc[j]
            Rc[j] = Rn[j]
            Sc[j] = Sn[j]
    return (np.asarray(Rc).copy(), np.asarray(Sc).copy(), status, nsteps)
