"""Numerical solution of the reduced system and map assembly.

The separable first-order form R'^2 = phi(R) is singular at turning
points (phi = 0), so the march integrates the differentiated, regular
form R'' = phi'(R)/2 with R' carried as state; |R'^2 - phi(R)| is then a
conserved-quantity drift monitored at every sample.  Steps are fixed
(bit-reproducible runs for a given config); the drift telemetry replaces
adaptive error control.

H follows by composite Simpson quadrature of H'(R(t)) on the solution
grid, and the full map u(x, y) = (R(t), a*x + b*y + H(t)) is assembled by
cubic Hermite interpolation (the march provides exact slopes for both).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_simpson

from . import kernels
from .errors import NumericalError, ValidationError
from .metrics import TargetMetric
from .reduction import ReductionParams, coefficients, h_prime, phi, phi_prime

_METHODS = ("rk4_second_order", "velocity_verlet")


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1e-3
    method: str = "rk4_second_order"
    invariant_tol: float = 1e-8  # allowed |R'^2 - phi| drift per unit t
    max_steps: int = 20_000_000
    h_quadrature: str = "simpson_on_solution_grid"

    def __post_init__(self):
        if not self.dt > 0:
            raise ValidationError(f"dt must be > 0, got {self.dt}")
        if self.method not in _METHODS:
            raise ValidationError(f"method must be one of {_METHODS}, got {self.method!r}")
        if not self.invariant_tol > 0:
            raise ValidationError(f"invariant_tol must be > 0, got {self.invariant_tol}")
        if self.max_steps < 1:
            raise ValidationError(f"max_steps must be >= 1, got {self.max_steps}")
        if self.h_quadrature != "simpson_on_solution_grid":
            raise ValidationError(f"unknown h_quadrature {self.h_quadrature!r}")


@dataclass(frozen=True)
class ODESolution:
    """Dense samples of the reduced solution with invariant telemetry.

    ``Hs`` is None until `quadrature_H` fills it (H(t0) = 0 by
    convention); ``hps`` then holds the integrand samples H'(R(t_i)),
    which also serve as exact interpolation slopes.  ``warnings`` flags
    double-root proximity (phi and phi' both tiny: the exact solution
    reaches such R only asymptotically).
    """

    ts: np.ndarray
    Rs: np.ndarray
    Rps: np.ndarray
    drift: np.ndarray
    turning_events: tuple[float, ...]
    Hs: Optional[np.ndarray] = None
    hps: Optional[np.ndarray] = None
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class MapSample:
    """The assembled map on a rectangular lattice (row-major, y outer)."""

    xs: np.ndarray
    ys: np.ndarray
    t: np.ndarray  # shape (ny, nx): frame variable a*y - b*x
    R: np.ndarray
    S: np.ndarray
    a: float
    b: float


def integrate_R(metric: TargetMetric, params: ReductionParams, R0: float,
                sign0: int, t_span: tuple[float, float],
                cfg: IntegratorConfig = IntegratorConfig()) -> ODESolution:
    """March R(t) over t_span from R(t0) = R0, R'(t0) = sign0*sqrt(phi(R0)).

    Passes smoothly through simple turning points (second-order form needs
    no sign bookkeeping); aborts on domain exit, non-finite state, drift
    budget overrun, or a step count above cfg.max_steps.
    """
    if sign0 not in (-1, 1):
        raise ValidationError(f"sign0 must be -1 or +1, got {sign0!r}")
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ValidationError(f"empty t_span {t_span}")
    p0 = float(phi(metric, params, R0))
    # tolerate rounding-level negatives when starting exactly at a turning point
    thr = 1e-10 * (1.0 + abs(float(phi_prime(metric, params, R0))))
    if p0 < -thr:
        raise ValidationError(f"phi(R0) = {p0} < 0 at R0={R0}: inadmissible start")
    p0 = max(p0, 0.0)
    nsteps = round((t1 - t0) / cfg.dt)
    if nsteps < 1:
        raise ValidationError("t_span shorter than one step")
    if nsteps > cfg.max_steps:
        raise NumericalError(f"{nsteps} steps exceed max_steps={cfg.max_steps}")
    V0 = sign0 * math.sqrt(p0)

    co = coefficients(params)
    n2 = co.c2 * params.kappa + co.c3 * params.lambda_
    Rs, Vs, drift, status, idx = kernels.integrate_march(
        metric, co.c1, n2, co.c4, co.denom_const,
        R0, V0, t0, cfg.dt, nsteps, cfg.invariant_tol, cfg.method,
    )
    if status == kernels.STATUS_DOMAIN:
        raise NumericalError(
            f"R left the metric domain at t={t0 + idx * cfg.dt:.6g} (R={Rs[idx]:.6g})"
        )
    if status == kernels.STATUS_DRIFT:
        raise NumericalError(
            f"invariant drift {drift[idx]:.3e} exceeded budget at t={t0 + idx * cfg.dt:.6g}; "
            "reduce dt or raise invariant_tol"
        )
    if status == kernels.STATUS_NAN:
        raise NumericalError(f"non-finite state at t={t0 + idx * cfg.dt:.6g}")

    ts = t0 + cfg.dt * np.arange(nsteps + 1)
    flips = np.nonzero(Vs[1:] * Vs[:-1] < 0.0)[0]
    events = tuple(0.5 * (ts[i] + ts[i + 1]) for i in flips)
    warnings = ()
    near = (np.abs(Vs) <= 1e-6) & (np.abs(np.asarray(phi_prime(metric, params, Rs))) <= 1e-5)
    if np.any(near):
        i = int(np.argmax(near))
        warnings = (
            f"double-root approach near t={ts[i]:.6g} (R={Rs[i]:.6g}): "
            "the exact solution reaches this level only asymptotically",
        )
    return ODESolution(ts=ts, Rs=Rs, Rps=Vs, drift=drift, turning_events=events,
                       warnings=warnings)


def quadrature_H(metric: TargetMetric, params: ReductionParams,
                 sol: ODESolution) -> ODESolution:
    """Fill H(t_i) = integral of H'(R(tau)) from t0, by composite Simpson
    on the solution grid; H(t0) = 0."""
    hps = np.asarray(h_prime(metric, params, sol.Rs), dtype=float)
    Hs = cumulative_simpson(hps, x=sol.ts, initial=0.0)
    return replace(sol, Hs=Hs, hps=hps)


def _hermite(ts, ys, slopes, t):
    """Cubic Hermite interpolation on a uniform-ish grid with known slopes."""
    k = np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(ts) - 2)
    h = ts[k + 1] - ts[k]
    u = (t - ts[k]) / h
    u2 = u * u
    u3 = u2 * u
    h00 = 2 * u3 - 3 * u2 + 1
    h10 = u3 - 2 * u2 + u
    h01 = -2 * u3 + 3 * u2
    h11 = u3 - u2
    return h00 * ys[k] + h * h10 * slopes[k] + h01 * ys[k + 1] + h * h11 * slopes[k + 1]


def assemble_map(sol: ODESolution, params: ReductionParams,
                 xs: np.ndarray, ys: np.ndarray) -> MapSample:
    """Evaluate the ansatz map on the lattice xs x ys by cubic interpolation
    of the solution (no extrapolation: every t = a*y - b*x must be covered)."""
    if sol.Hs is None:
        raise ValidationError("solution has no H samples; run quadrature_H first")
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    X, Y = np.meshgrid(xs, ys)
    t = params.a * Y - params.b * X
    slack = 1e-9 * (sol.ts[-1] - sol.ts[0])
    if t.min() < sol.ts[0] - slack or t.max() > sol.ts[-1] + slack:
        raise ValidationError(
            f"grid frame values t in [{t.min():.6g}, {t.max():.6g}] exceed the "
            f"solution range [{sol.ts[0]:.6g}, {sol.ts[-1]:.6g}]"
        )
    tc = np.clip(t, sol.ts[0], sol.ts[-1])
    R = _hermite(sol.ts, sol.Rs, sol.Rps, tc)
    H = _hermite(sol.ts, sol.Hs, sol.hps, tc)
    S = params.a * X + params.b * Y + H
    return MapSample(xs=xs, ys=ys, t=t, R=R, S=S, a=params.a, b=params.b)
