"""Traveling-frame reduction of the harmonic-map system.

Under the ansatz R = R(t), S = a*x + b*y + H(t) with frame variable
t = a*y - b*x, the Euler-Lagrange system collapses to a separable ODE
plus a quadrature.  With q = b^2 + eps2*a^2 and s = a^2 + b^2:

    c1 = del2*eps2*s^4
    c2 = 4*s^2*q
    c3 = 8*eps2*a*b*s^2
    c4 = 4*del2*(2*kappa*a*b + lambda*q)^2

    phi(R)    = (c1*B^2 + c2*kappa*B + c3*lambda*B + c4)
                / (s^2 * (b^2 - eps2*a^2)^2 * A(R) * B(R))      [= R'(t)^2]
    h_prime(R) = (2*lambda*del2*q + 4*kappa*del2*a*b
                  + a*b*s*(eps2+1)*B(R))
                / ((b^2 - eps2*a^2) * s * B(R))                  [= H'(t)]

The two first integrals behind these formulas are diagonal in (kappa,
lambda), which lets `recover_first_integrals` read the constants off any
map data point with two divisions and no linear solver:

    (a^2+eps2*b^2)*K = 4*eps2*kappa
                       + del2*B*(q + 2*(1-eps2)*a*b*H')
    a*b*K            = -2*lambda + del2*B*((b^2-a^2)*H' - a*b)
    K = A*R'^2 - del2*B*H'^2

The frame is degenerate exactly when b^2 = eps2*a^2 (then B would have to
be constant and the map's Jacobian vanishes); construction rejects it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NumericalError, ValidationError
from .metrics import SignaturePair, TargetMetric


@dataclass(frozen=True)
class ReductionParams:
    """Frame constants (a, b), first-integral constants (kappa, lambda),
    and the signature pair."""

    a: float
    b: float
    kappa: float
    lambda_: float
    sig: SignaturePair

    def __post_init__(self):
        a, b = self.a, self.b
        if a * a + b * b == 0.0:
            raise ValidationError("frame constants (a, b) must not both vanish")
        if b * b - self.sig.eps2 * a * a == 0.0:
            raise ValidationError(
                f"degenerate frame: b^2 = eps2*a^2 (a={a}, b={b}, eps2={self.sig.eps2}) "
                "forces B(R) constant and a vanishing Jacobian"
            )


@dataclass(frozen=True)
class ReducedCoefficients:
    c1: float
    c2: float
    c3: float
    c4: float
    denom_const: float  # (a^2+b^2)^2 * (b^2 - eps2*a^2)^2


@dataclass(frozen=True)
class TravelingFrame:
    """The linear frame t(x, y) = a*y - b*x."""

    a: float
    b: float

    def __call__(self, x, y):
        return self.a * y - self.b * x


def coefficients(params: ReductionParams) -> ReducedCoefficients:
    a, b = params.a, params.b
    e2, d2 = params.sig.eps2, params.sig.del2
    s = a * a + b * b
    q = b * b + e2 * a * a
    c1 = d2 * e2 * s**4
    c2 = 4.0 * s * s * q
    c3 = 8.0 * e2 * a * b * s * s
    c4 = 4.0 * d2 * (2.0 * params.kappa * a * b + params.lambda_ * q) ** 2
    dn = s * s * (b * b - e2 * a * a) ** 2
    return ReducedCoefficients(c1, c2, c3, c4, dn)


def _check_point(metric: TargetMetric, R) -> None:
    lo, hi = metric.r_domain
    if not np.all((R > lo) & (R < hi)):
        raise NumericalError(f"R={R} outside r_domain ({lo}, {hi}) of {metric.name!r}")


def phi(metric: TargetMetric, params: ReductionParams, R):
    """Right-hand side of the separable equation: the required R'(t)^2."""
    _check_point(metric, R)
    co = coefficients(params)
    B = metric.B.value_at(R)
    if not np.all(B > 0.0):
        raise NumericalError(f"B(R) = 0 at R={R}: coordinate singularity")
    A = metric.A.value_at(R)
    num = co.c1 * B * B + co.c2 * params.kappa * B + co.c3 * params.lambda_ * B + co.c4
    return num / (co.denom_const * A * B)


def phi_prime(metric: TargetMetric, params: ReductionParams, R):
    """d(phi)/dR by the quotient rule from A, A', B, B' (no finite differences)."""
    _check_point(metric, R)
    co = coefficients(params)
    B = metric.B.value_at(R)
    if not np.all(B > 0.0):
        raise NumericalError(f"B(R) = 0 at R={R}: coordinate singularity")
    A = metric.A.value_at(R)
    Bp = metric.B.deriv_at(R)
    Ap = metric.A.deriv_at(R)
    n2 = co.c2 * params.kappa + co.c3 * params.lambda_
    num = co.c1 * B * B + n2 * B + co.c4
    nump = (2.0 * co.c1 * B + n2) * Bp
    den = co.denom_const * A * B
    denp = co.denom_const * (Ap * B + A * Bp)
    return (nump * den - num * denp) / (den * den)


def h_prime(metric: TargetMetric, params: ReductionParams, R):
    """The quadrature integrand H'(t) as a function of R."""
    _check_point(metric, R)
    a, b = params.a, params.b
    e2, d2 = params.sig.eps2, params.sig.del2
    B = metric.B.value_at(R)
    if not np.all(B > 0.0):
        raise NumericalError(f"B(R) = 0 at R={R}: coordinate singularity")
    s = a * a + b * b
    q = b * b + e2 * a * a
    num = 2.0 * params.lambda_ * d2 * q + 4.0 * params.kappa * d2 * a * b \
        + a * b * s * (e2 + 1.0) * B
    return num / ((b * b - e2 * a * a) * s * B)


def recover_first_integrals(metric: TargetMetric, sig: SignaturePair,
                            a: float, b: float,
                            R0: float, Rp0: float, Hp0: float) -> tuple[float, float]:
    """Read (kappa, lambda) off one data point (R, R', H') of a map.

    The first-integral system is diagonal in (kappa, lambda), so the solve
    is two explicit divisions.
    """
    if b * b - sig.eps2 * a * a == 0.0:
        raise ValidationError("degenerate frame: b^2 = eps2*a^2")
    e2, d2 = sig.eps2, sig.del2
    B = metric.B.value_at(R0)
    if not np.all(B > 0.0):
        raise NumericalError(f"B(R0) = 0 at R0={R0}: coordinate singularity")
    A = metric.A.value_at(R0)
    K = A * Rp0 * Rp0 - d2 * B * Hp0 * Hp0
    q = b * b + e2 * a * a
    kappa = ((a * a + e2 * b * b) * K - d2 * B * (q + 2.0 * (1.0 - e2) * a * b * Hp0)) / (4.0 * e2)
    lam = (d2 * B * ((b * b - a * a) * Hp0 - a * b) - a * b * K) / 2.0
    return float(kappa), float(lam)


# --------------------------------------------------------------------------
# admissible intervals: where phi >= 0, i.e. where real solutions live

SIMPLE_ROOT = "simple_root"
DOUBLE_ROOT = "double_root"
DOMAIN_EDGE = "domain_edge"


@dataclass(frozen=True)
class AdmissibleInterval:
    lo: float
    hi: float
    lo_kind: str
    hi_kind: str


def _bisect_root(f, lo, hi, flo, tol=1e-12):
    # sign-change bisection; flo is f(lo)
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (flo > 0) == (fm > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _classify_root(metric, params, r, scale):
    dphi = float(phi_prime(metric, params, r))
    # second-derivative scale estimate for the relative tolerance
    h = 1e-6 * (1.0 + abs(r))
    try:
        d2 = (float(phi_prime(metric, params, r + h)) - float(phi_prime(metric, params, r - h))) / (2.0 * h)
    except NumericalError:
        d2 = 0.0
    if abs(dphi) <= 1e-10 * (1.0 + abs(d2)):
        return DOUBLE_ROOT
    return SIMPLE_ROOT


def admissible_intervals(metric: TargetMetric, params: ReductionParams,
                         scan: tuple[float, float], n: int) -> list[AdmissibleInterval]:
    """Maximal subintervals of ``scan`` with phi >= 0, endpoints classified.

    Roots are localized by sign-change bisection to 1e-12; an endpoint is a
    double root when phi' vanishes there within tolerance (asymptotic
    approach), a simple root when it does not (oscillatory turning point),
    or a domain edge when the scan boundary cuts the region.
    """
    if n < 16:
        raise ValidationError(f"scan needs n >= 16 sample points, got {n}")
    lo, hi = float(scan[0]), float(scan[1])
    if not (lo < hi):
        raise ValidationError(f"empty scan interval {scan}")
    _check_point(metric, np.array([lo, hi]))
    xs = np.linspace(lo, hi, n)
    ps = np.array([float(phi(metric, params, x)) for x in xs])

    f = lambda r: float(phi(metric, params, r))
    intervals: list[AdmissibleInterval] = []
    cur_lo = None
    cur_lo_kind = None
    scale = float(np.max(np.abs(ps))) + 1.0

    def close(point, kind):
        nonlocal cur_lo, cur_lo_kind
        if cur_lo is not None and point > cur_lo:
            intervals.append(AdmissibleInterval(cur_lo, point, cur_lo_kind, kind))
        cur_lo, cur_lo_kind = None, None

    if ps[0] >= 0.0:
        cur_lo, cur_lo_kind = lo, DOMAIN_EDGE
    for i in range(1, n):
        below_prev, below_here = ps[i - 1] < 0.0, ps[i] < 0.0
        if below_prev == below_here:
            continue
        r = _bisect_root(f, xs[i - 1], xs[i], ps[i - 1])
        kind = _classify_root(metric, params, r, scale)
        if below_prev:  # entering phi >= 0
            cur_lo, cur_lo_kind = r, kind
        else:  # leaving
            close(r, kind)
    if cur_lo is not None:
        close(hi, DOMAIN_EDGE)
    return intervals


def recovery_round_trip_error(metric: TargetMetric, params: ReductionParams,
                             R: float, sign: int = 1) -> float:
    """Relative defect of the self-consistency identity: seed (R'^2, H')
    from phi and h_prime, recover (kappa, lambda), compare."""
    p = float(phi(metric, params, R))
    if p < 0.0:
        raise ValidationError(f"phi({R}) < 0: not an admissible point")
    Rp = sign * math.sqrt(p)
    Hp = float(h_prime(metric, params, R))
    k, l = recover_first_integrals(metric, params.sig, params.a, params.b, R, Rp, Hp)
    return (abs(k - params.kappa) + abs(l - params.lambda_)) / (
        1.0 + abs(params.kappa) + abs(params.lambda_)
    )
