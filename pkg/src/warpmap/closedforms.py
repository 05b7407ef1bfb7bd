"""The three explicit solution families, with exact derivatives, plus the
ambient-space embeddings of the quadric targets.

Families (frame variable t = a*y - b*x throughout):

* ellipsoid (Riemannian -> Riemannian), target A = c^2 sin^2 R + cos^2 R,
  B = sin^2 R, c > 1:
      R = arccos(cos(theta) * sin(t/sqrt(c^2-1)))
      S = a*x + b*y + arctan(sin(theta) * tan(t/sqrt(c^2-1)))
  with the arctan taken as the continuous extension across tan poles.

* hyperboloid (Lorentzian -> Lorentzian), same A, B with the Lorentzian
  fiber sign, omega = (a^2+b^2) / ((b^2-a^2) sqrt(c^2-1)):
      R = arccos(cosh(theta) * sin(omega*t))
      S = a*x + b*y + (2ab/(b^2-a^2))*t + arctanh(sinh(theta) * tan(omega*t))
  valid where |cosh(theta) sin(omega t)| <= 1 and |sinh(theta) tan(omega t)| < 1.

* mixed (domain and target of different causal type), target
  h = dR^2 - del2 * tanh^2(R) dS^2 with del2 = -eps2; with a = sin(theta),
  b = cos(theta), D = cos^2(theta) - eps2*sin^2(theta):
      R = arcsinh(t/D)
      S = a*x + b*y + ((1+eps2)*a*b/D) * t
  (H is linear in t for this family, and vanishes when eps2 = -1).

Derivatives are analytic end to end; no finite differences.  Branch
policy: arccos uses the principal branch (R' changes sign smoothly across
sin = +-1 in the second-order dynamics), the arctan in S is unwrapped so
S stays smooth, and the arctanh domain boundary is a hard evaluation
error, not a clamp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import NumericalError, ValidationError
from .kernels import profile_kinds as pk
from .metrics import TargetMetric, catalog_lookup, profile_from_spec


class MapDerivs(NamedTuple):
    Rx: np.ndarray
    Ry: np.ndarray
    Sx: np.ndarray
    Sy: np.ndarray
    Rxx: np.ndarray
    Ryy: np.ndarray
    Sxx: np.ndarray
    Syy: np.ndarray


def unwrap_arctan(s: float, u):
    """Continuous antiderivative branch of arctan(s * tan(u)) for s > 0.

    atan2 gives the principal angle of (cos u, s sin u); the unwrap term
    restores the monotone branch, which stays within pi/2 of u.
    """
    base = np.arctan2(s * np.sin(u), np.cos(u))
    return base + 2.0 * math.pi * np.round((u - base) / (2.0 * math.pi))


@dataclass(frozen=True)
class ClosedFormMap:
    """An explicit harmonic/wave map with analytic derivatives."""

    family: str
    params: dict
    a: float
    b: float
    eps2: int
    del2: int
    target: TargetMetric
    _eval: Callable = field(repr=False)
    _derivs: Callable = field(repr=False)
    _frame: Callable = field(repr=False)

    def eval(self, x, y):
        """(R, S) at the point(s)."""
        return self._eval(np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    def eval_derivs(self, x, y) -> MapDerivs:
        """First and second coordinate derivatives (no cross terms needed
        by the residual formulas)."""
        return self._derivs(np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    def frame_data(self, t):
        """(R(t), R'(t), H'(t)) along the frame variable."""
        return self._frame(np.asarray(t, dtype=float))


def ellipsoid_map(c: float, theta: float, a: float, b: float) -> ClosedFormMap:
    """Riemannian-to-ellipsoid family; theta in (0, pi/2) tilts the image
    band around the equator (theta -> pi/2 degenerates to the equator)."""
    if not c > 1:
        raise ValidationError(f"ellipsoid family requires c > 1 (got c={c})")
    if not 0.0 < theta < math.pi / 2:
        raise ValidationError(f"theta must lie in (0, pi/2), got {theta}")
    if a == 0.0 and b == 0.0:
        raise ValidationError("frame constants (a, b) must not both vanish")
    k = 1.0 / math.sqrt(c * c - 1.0)
    m, s = math.cos(theta), math.sin(theta)

    def _RHu(u):
        w = 1.0 - (m * np.sin(u)) ** 2
        sw = np.sqrt(w)
        R = np.arccos(m * np.sin(u))
        Ru = -m * np.cos(u) / sw
        Ruu = m * np.sin(u) * (1.0 - m * m) / (w * sw)
        den = np.cos(u) ** 2 + (s * np.sin(u)) ** 2
        Hu = s / den
        Huu = s * m * m * np.sin(2.0 * u) / den**2
        return R, Ru, Ruu, Hu, Huu

    def _eval(x, y):
        u = k * (a * y - b * x)
        R = np.arccos(m * np.sin(u))
        S = a * x + b * y + unwrap_arctan(s, u)
        return R, S

    def _derivs(x, y):
        u = k * (a * y - b * x)
        R, Ru, Ruu, Hu, Huu = _RHu(u)
        ux, uy = -b * k, a * k
        return MapDerivs(
            Rx=Ru * ux, Ry=Ru * uy, Sx=a + Hu * ux, Sy=b + Hu * uy,
            Rxx=Ruu * ux * ux, Ryy=Ruu * uy * uy,
            Sxx=Huu * ux * ux, Syy=Huu * uy * uy,
        )

    def _frame(t):
        u = k * t
        R, Ru, _, Hu, _ = _RHu(u)
        return R, Ru * k, Hu * k

    return ClosedFormMap(
        family="ellipsoid", params={"c": c, "theta": theta}, a=a, b=b,
        eps2=-1, del2=-1, target=catalog_lookup("ellipsoid", {"c": c}),
        _eval=_eval, _derivs=_derivs, _frame=_frame,
    )


def hyperboloid_map(c: float, theta: float, a: float, b: float) -> ClosedFormMap:
    """Lorentzian wave maps into the elliptic hyperboloid of one sheet."""
    if not c > 1:
        raise ValidationError(f"hyperboloid family requires c > 1 (got c={c})")
    if a * a == b * b:
        raise ValidationError(f"hyperboloid family requires a^2 != b^2 (got a={a}, b={b})")
    om = (a * a + b * b) / ((b * b - a * a) * math.sqrt(c * c - 1.0))
    m, s = math.cosh(theta), math.sinh(theta)
    lin = 2.0 * a * b / (b * b - a * a)

    def _domain_check(u, t, strict):
        ms = np.abs(m * np.sin(u))
        bad = ms > 1.0 if not strict else ms >= 1.0
        if np.any(bad):
            tb = np.asarray(t)[bad].flat[0]
            raise NumericalError(
                f"|cosh(theta)*sin(omega*t)| {'>=' if strict else '>'} 1 at t={tb:.6g}: "
                "outside the arccos domain of the family"
            )
        if s != 0.0:
            st = np.abs(s * np.tan(u))
            if np.any(st >= 1.0):
                tb = np.asarray(t)[st >= 1.0].flat[0]
                raise NumericalError(
                    f"|sinh(theta)*tan(omega*t)| >= 1 at t={tb:.6g}: "
                    "outside the arctanh domain of the family"
                )

    def _P(u):
        # arctanh(s tan u) and derivatives; s = 0 short-circuits (theta = 0)
        if s == 0.0:
            z = 0.0 * u
            return z, z, z
        den = np.cos(u) ** 2 - (s * np.sin(u)) ** 2
        P = np.arctanh(s * np.tan(u))
        Pu = s / den
        Puu = s * (1.0 + s * s) * np.sin(2.0 * u) / den**2
        return P, Pu, Puu

    def _eval(x, y):
        t = a * y - b * x
        u = om * t
        _domain_check(u, t, strict=False)
        R = np.arccos(np.clip(m * np.sin(u), -1.0, 1.0))
        P, _, _ = _P(u)
        S = a * x + b * y + lin * t + P
        return R, S

    def _derivs(x, y):
        t = a * y - b * x
        u = om * t
        _domain_check(u, t, strict=True)
        w = 1.0 - (m * np.sin(u)) ** 2
        sw = np.sqrt(w)
        Ru = -m * np.cos(u) / sw
        Ruu = m * np.sin(u) * (1.0 - m * m) / (w * sw)
        _, Pu, Puu = _P(u)
        ux, uy = -b * om, a * om
        return MapDerivs(
            Rx=Ru * ux, Ry=Ru * uy,
            Sx=a - lin * b + Pu * ux, Sy=b + lin * a + Pu * uy,
            Rxx=Ruu * ux * ux, Ryy=Ruu * uy * uy,
            Sxx=Puu * ux * ux, Syy=Puu * uy * uy,
        )

    def _frame(t):
        u = om * t
        _domain_check(u, t, strict=True)
        w = 1.0 - (m * np.sin(u)) ** 2
        R = np.arccos(m * np.sin(u))
        Ru = -m * np.cos(u) / np.sqrt(w)
        _, Pu, _ = _P(u)
        return R, Ru * om, lin + Pu * om

    return ClosedFormMap(
        family="hyperboloid", params={"c": c, "theta": theta}, a=a, b=b,
        eps2=+1, del2=+1, target=catalog_lookup("elliptic_hyperboloid", {"c": c}),
        _eval=_eval, _derivs=_derivs, _frame=_frame,
    )


def mixed_target(eps2: int) -> TargetMetric:
    """Target h = dR^2 - del2 * tanh^2(R) dS^2 with del2 = -eps2; the
    coordinate singularity at R = 0 is interior (cigar-tip point)."""
    A = profile_from_spec(pk.P_CONST, 1.0)
    B = profile_from_spec(pk.P_TANH2_SCALED, 1.0)
    return TargetMetric("mixed_tanh2", A, B, -eps2, (-math.inf, math.inf), (0.0,))


def mixed_map(theta: float, eps2: int) -> ClosedFormMap:
    """Mixed-signature family (del2*eps2 = -1); S is affine in (x, y) and
    H is linear in t, so all its second derivatives vanish."""
    if not 0.0 < theta < math.pi / 4:
        raise ValidationError(f"theta must lie in (0, pi/4), got {theta}")
    if eps2 not in (-1, 1):
        raise ValidationError(f"eps2 must be -1 or +1, got {eps2!r}")
    a, b = math.sin(theta), math.cos(theta)
    D = b * b - eps2 * a * a
    Hp = (1.0 + eps2) * a * b / D

    def _eval(x, y):
        t = a * y - b * x
        R = np.arcsinh(t / D)
        S = a * x + b * y + Hp * t
        return R, S

    def _derivs(x, y):
        t = a * y - b * x
        g = D * D + t * t
        Rp = 1.0 / np.sqrt(g)
        Rpp = -t / (g * np.sqrt(g))
        z = 0.0 * t
        return MapDerivs(
            Rx=-b * Rp, Ry=a * Rp, Sx=(a - b * Hp) + z, Sy=(b + a * Hp) + z,
            Rxx=b * b * Rpp, Ryy=a * a * Rpp, Sxx=z, Syy=z,
        )

    def _frame(t):
        g = D * D + t * t
        return np.arcsinh(t / D), 1.0 / np.sqrt(g), Hp + 0.0 * t

    return ClosedFormMap(
        family="mixed", params={"theta": theta}, a=a, b=b,
        eps2=eps2, del2=-eps2, target=mixed_target(eps2),
        _eval=_eval, _derivs=_derivs, _frame=_frame,
    )


# --------------------------------------------------------------------------
# ambient embeddings

@dataclass(frozen=True)
class EmbeddingR3:
    """A point (or array of points) on the quadric in ambient 3-space."""

    ambient_signature: str  # "euclidean" or "minkowski"
    point: np.ndarray  # (..., 3)

    def quadric_residual(self, c: float) -> float:
        X, Y, Z = self.point[..., 0], self.point[..., 1], self.point[..., 2]
        zsign = 1.0 if self.ambient_signature == "euclidean" else -1.0
        return float(np.max(np.abs(X * X / (c * c) + Y * Y + zsign * Z * Z - 1.0)))


def embed(family: str, c: float, R, S) -> EmbeddingR3:
    """Parametrize the quadric: ellipsoid (c cosR, sinR cosS, sinR sinS)
    in Euclidean ambient, hyperboloid (c cosR, sinR coshS, sinR sinhS) in
    Minkowski ambient (+, +, -)."""
    R = np.asarray(R, dtype=float)
    S = np.asarray(S, dtype=float)
    if not c > 1:
        raise ValidationError(f"embedding requires c > 1 (got c={c})")
    if family == "ellipsoid":
        if np.any(R < 0.0) or np.any(R > math.pi):
            raise ValidationError(f"ellipsoid chart requires R in [0, pi], got {R}")
        pt = np.stack([c * np.cos(R) + 0.0 * S, np.sin(R) * np.cos(S), np.sin(R) * np.sin(S)], axis=-1)
        return EmbeddingR3("euclidean", pt)
    if family == "hyperboloid":
        if np.any(np.abs(np.sin(R)) <= 1e-12):
            raise ValidationError("hyperboloid chart is degenerate where sin R = 0")
        pt = np.stack([c * np.cos(R) + 0.0 * S, np.sin(R) * np.cosh(S), np.sin(R) * np.sinh(S)], axis=-1)
        return EmbeddingR3("minkowski", pt)
    raise ValidationError(f"unknown embedding family {family!r}")


def induced_metric_check(family: str, c: float, R, S) -> float:
    """Max-abs difference between the analytic pullback of the ambient
    metric through `embed` and diag(A(R), -del2*B(R)) with
    A = c^2 sin^2 R + cos^2 R, B = sin^2 R."""
    R = np.asarray(R, dtype=float)
    S = np.asarray(S, dtype=float)
    A = (c * c) * np.sin(R) ** 2 + np.cos(R) ** 2
    B = np.sin(R) ** 2
    if family == "ellipsoid":
        FR = np.stack([-c * np.sin(R) + 0.0 * S, np.cos(R) * np.cos(S), np.cos(R) * np.sin(S)], axis=-1)
        FS = np.stack([0.0 * R * S, -np.sin(R) * np.sin(S), np.sin(R) * np.cos(S)], axis=-1)
        dot = lambda u, v: (u * v).sum(axis=-1)
        expected_22 = B  # del2 = -1
    elif family == "hyperboloid":
        FR = np.stack([-c * np.sin(R) + 0.0 * S, np.cos(R) * np.cosh(S), np.cos(R) * np.sinh(S)], axis=-1)
        FS = np.stack([0.0 * R * S, np.sin(R) * np.sinh(S), np.sin(R) * np.cosh(S)], axis=-1)
        dot = lambda u, v: u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] - u[..., 2] * v[..., 2]
        expected_22 = -B  # del2 = +1
    else:
        raise ValidationError(f"unknown embedding family {family!r}")
    g11 = dot(FR, FR)
    g12 = dot(FR, FS)
    g22 = dot(FS, FS)
    res = np.maximum(np.abs(g11 - A), np.maximum(np.abs(g12), np.abs(g22 - expected_22)))
    return float(np.max(res))
