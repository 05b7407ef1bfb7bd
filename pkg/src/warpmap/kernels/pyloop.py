"""Pure-Python backend for the hot marches.

Same contracts and status codes as the compiled twin (see package
docstring).  The ODE march is a scalar loop over profile callables; the
wave march is numpy-vectorized over the spatial grid.
"""

import math

import numpy as np

_OK, _DOMAIN, _DRIFT, _NAN = 0, 1, 2, 3


def integrate_r(metric, c1, n2, c4, dn, R0, V0, t0, dt, nsteps, r_lo, r_hi, tol, method):
    """Fixed-step march of R'' = phi'(R)/2 with invariant telemetry.

    Returns (Rs, Vs, drift, status, fail_index); on failure the arrays are
    valid up to and including fail_index.
    """
    Av, Ad = metric.A.value_at, metric.A.deriv_at
    Bv, Bd = metric.B.value_at, metric.B.deriv_at

    def phip(R):
        a = Av(R)
        b = Bv(R)
        ap = Ad(R)
        bp = Bd(R)
        num = c1 * b * b + n2 * b + c4
        nump = (2.0 * c1 * b + n2) * bp
        den = dn * a * b
        denp = dn * (ap * b + a * bp)
        return (nump * den - num * denp) / (den * den)

    Rs = np.empty(nsteps + 1)
    Vs = np.empty(nsteps + 1)
    drift = np.empty(nsteps + 1)
    R, V = float(R0), float(V0)
    rk4 = method == "rk4_second_order"
    status, idx = _OK, nsteps
    i = 0
    while True:
        b = Bv(R)
        if not (r_lo < R < r_hi) or not (b > 0.0):
            status, idx = _DOMAIN, i
            Rs[i], Vs[i], drift[i] = R, V, math.nan
            break
        if not (math.isfinite(R) and math.isfinite(V)):
            status, idx = _NAN, i
            Rs[i], Vs[i], drift[i] = R, V, math.nan
            break
        Rs[i], Vs[i] = R, V
        d = abs(V * V - (c1 * b * b + n2 * b + c4) / (dn * Av(R) * b))
        drift[i] = d
        if d > tol * (i * dt + dt):
            status, idx = _DRIFT, i
            break
        if i == nsteps:
            break
        if rk4:
            k1v = 0.5 * phip(R)
            k2r = V + 0.5 * dt * k1v
            k2v = 0.5 * phip(R + 0.5 * dt * V)
            k3r = V + 0.5 * dt * k2v
            k3v = 0.5 * phip(R + 0.5 * dt * k2r)
            k4r = V + dt * k3v
            k4v = 0.5 * phip(R + dt * k3r)
            R += dt / 6.0 * (V + 2.0 * k2r + 2.0 * k3r + k4r)
            V += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        else:  # velocity Verlet
            vh = V + 0.5 * dt * 0.5 * phip(R)
            R += dt * vh
            V = vh + 0.5 * dt * 0.5 * phip(R)
        i += 1
    n = idx + 1 if status != _OK else nsteps + 1
    return Rs[:n], Vs[:n], drift[:n], status, idx


def wave_rhs(metric, del2, R, S, Ry, Sy, dx, cap):
    """Interior RHS of the second-order evolution (eps2 = +1, y is time):

        R_yy = R_xx + (A'/2A)(R_x^2 - R_y^2) + (del2*B'/2A)(S_x^2 - S_y^2)
        S_yy = S_xx + (B'/B)(R_x S_x - R_y S_y)

    The S-coupling coefficient B'/B is clipped to +-cap: below one cell
    the grid cannot resolve the coordinate-singular coefficient, and for
    the regular solution class the numerator vanishes there.
    """
    Rxx = (R[2:] - 2.0 * R[1:-1] + R[:-2]) / dx**2
    Sxx = (S[2:] - 2.0 * S[1:-1] + S[:-2]) / dx**2
    Rx = (R[2:] - R[:-2]) / (2.0 * dx)
    Sx = (S[2:] - S[:-2]) / (2.0 * dx)
    Ri = R[1:-1]
    A = metric.A.value_at(Ri)
    Ap = metric.A.deriv_at(Ri)
    B = metric.B.value_at(Ri)
    Bp = metric.B.deriv_at(Ri)
    cA = Ap / (2.0 * A)
    cB = del2 * Bp / (2.0 * A)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        # B == 0 exactly: keep the sign of B' and land on the cap (0 if B' = 0)
        coef = np.clip(Bp / np.where(B != 0.0, B, np.finfo(float).tiny), -cap, cap)
        fR = Rxx + cA * (Rx**2 - Ry[1:-1] ** 2) + cB * (Sx**2 - Sy[1:-1] ** 2)
        fS = Sxx + coef * (Rx * Sx - Ry[1:-1] * Sy[1:-1])
    return fR, fS


def wave_march(metric, del2, Rm, Sm, Rc, Sc, bc, dx, dy, nsteps, cap, ncorr):
    """Leapfrog march from levels (Rm,Sm) at step 0 and (Rc,Sc) at step 1.

    The y-derivative terms in the RHS use the centered difference through
    the new level, resolved by ``ncorr`` fixed-point sweeps.  Returns
    (R, S, status, bad_step).
    """
    Rm, Sm, Rc, Sc = Rm.copy(), Sm.copy(), Rc.copy(), Sc.copy()
    dy2 = dy * dy
    for n in range(1, nsteps):
        Ry = (Rc - Rm) / dy
        Sy = (Sc - Sm) / dy
        fR, fS = wave_rhs(metric, del2, Rc, Sc, Ry, Sy, dx, cap)
        Rn = 2.0 * Rc - Rm
        Sn = 2.0 * Sc - Sm
        Rn[1:-1] += dy2 * fR
        Sn[1:-1] += dy2 * fS
        for _ in range(ncorr):
            Ry = (Rn - Rm) / (2.0 * dy)
            Sy = (Sn - Sm) / (2.0 * dy)
            fR, fS = wave_rhs(metric, del2, Rc, Sc, Ry, Sy, dx, cap)
            Rn = 2.0 * Rc - Rm
            Sn = 2.0 * Sc - Sm
            Rn[1:-1] += dy2 * fR
            Sn[1:-1] += dy2 * fS
        Rn[0], Rn[-1] = bc[n + 1, 0], bc[n + 1, 1]
        Sn[0], Sn[-1] = bc[n + 1, 2], bc[n + 1, 3]
        if not (np.isfinite(Rn).all() and np.isfinite(Sn).all()):
            return Rc, Sc, _NAN, n
        Rm, Sm, Rc, Sc = Rc, Sc, Rn, Sn
    return Rc, Sc, _OK, nsteps
