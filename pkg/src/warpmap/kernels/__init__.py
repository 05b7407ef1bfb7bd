"""Backend selection for the two hot marches.

The reduced-ODE integration and the wave-map leapfrog dominate runtime;
each exists twice with the same contract: a compiled Cython extension
(``_native``) and a pure-Python/numpy twin (``pyloop``).  The compiled
backend is used when it imported successfully and the metric's profiles
are kernel-representable; anything else falls back to Python.  Call
``force_backend("python")`` to pin the fallback (used by the benchmark
and the equivalence tests).

March status codes shared by both backends:
    0 = completed, 1 = left the metric domain (or hit B <= 0),
    2 = invariant drift budget exceeded, 3 = non-finite state detected.
"""

import os

from . import pyloop

try:
    from . import _native

    HAVE_NATIVE = True
except ImportError:
    _native = None
    HAVE_NATIVE = False

STATUS_OK = 0
STATUS_DOMAIN = 1
STATUS_DRIFT = 2
STATUS_NAN = 3

# WARPMAP_BACKEND=python pins the fallback for a whole process
_forced = os.environ.get("WARPMAP_BACKEND") or None
if _forced not in (None, "python", "native"):
    _forced = None


def force_backend(name):
    """Pin the backend: "native", "python", or None for automatic."""
    global _forced
    if name not in (None, "native", "python"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "native" and not HAVE_NATIVE:
        raise RuntimeError("native backend requested but the extension is not built")
    _forced = name


def active_backend(kernel_spec=None):
    """Backend that would run for a metric with the given kernel spec."""
    if _forced == "python":
        return "python"
    if HAVE_NATIVE and (kernel_spec is not None or _forced == "native"):
        return "native" if kernel_spec is not None else "python"
    return "python"


def integrate_march(metric, c1, n2, c4, dn, R0, V0, t0, dt, nsteps, tol, method):
    """Run the fixed-step march for R'' = phi'(R)/2; returns
    (Rs, Vs, drift, status, fail_index)."""
    spec = metric.kernel_spec
    if active_backend(spec) == "native":
        return _native.integrate_r(
            *spec, c1, n2, c4, dn, float(R0), float(V0), float(t0), float(dt),
            int(nsteps), metric.r_domain[0], metric.r_domain[1], float(tol),
            0 if method == "rk4_second_order" else 1,
        )
    return pyloop.integrate_r(
        metric, c1, n2, c4, dn, R0, V0, t0, dt, nsteps,
        metric.r_domain[0], metric.r_domain[1], tol, method,
    )


def wave_march(metric, del2, Rm, Sm, Rc, Sc, bc, dx, dy, nsteps, cap, ncorr):
    """March the leapfrog levels (Rm,Sm) -> final; mutates copies and returns
    (R, S, status, bad_step).  ``bc`` is an (nsteps+1, 4) array of exact
    boundary values (R_left, R_right, S_left, S_right per step)."""
    spec = metric.kernel_spec
    if active_backend(spec) == "native":
        return _native.wave_march(
            *spec, float(del2), Rm.copy(), Sm.copy(), Rc.copy(), Sc.copy(),
            bc, float(dx), float(dy), int(nsteps), float(cap), int(ncorr),
        )
    return pyloop.wave_march(metric, del2, Rm, Sm, Rc, Sc, bc, dx, dy, nsteps, cap, ncorr)
