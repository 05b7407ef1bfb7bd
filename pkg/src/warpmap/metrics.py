"""Domain and target metric surfaces.

A target surface carries a warped-product metric

    h = A(R) dR^2 - del2 * B(R) dS^2,        del2 in {-1, +1},

with smooth positive radial profiles A, B; the domain surface is
conformally flat,

    g = exp(f(x, y)) * (dx^2 - eps2 * dy^2),  eps2 in {-1, +1}.

eps2 = -1 is a Riemannian domain, +1 a Lorentzian one, and likewise del2
for the target fiber.  Only the squared signs ever enter the formulas, so
they are stored as integers and no complex arithmetic appears anywhere.

The module houses the catalog of named surfaces (flat polar chart, round
sphere, ellipsoid of revolution, de Sitter, Witten cigar, ...) and the
Gauss curvature of a warped product, used to certify which catalog
entries genuinely have variable curvature.

Curvature sign convention for Lorentzian targets: K is evaluated from the
closed form for an orthogonal metric E dR^2 + G dS^2 with E = A and
G = -del2*B,

    K = -G''/(2EG) + E'G'/(4E^2 G) + G'^2/(4EG^2),

i.e. K = R_RSRS / (g_RR * g_SS).  Under this fixed convention the 2D
de Sitter entry evaluates to K = -1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import NumericalError, ValidationError
from .kernels import profile_kinds as pk

SIGNS = (-1, 1)


@dataclass(frozen=True)
class SignaturePair:
    """The two regime switches: eps2 for the domain, del2 for the target fiber."""

    eps2: int
    del2: int

    def __post_init__(self):
        if self.eps2 not in SIGNS:
            raise ValidationError(f"eps2 must be -1 or +1, got {self.eps2!r}")
        if self.del2 not in SIGNS:
            raise ValidationError(f"del2 must be -1 or +1, got {self.del2!r}")


@dataclass(frozen=True)
class RadialProfile:
    """A smooth positive radial function with its first two derivatives.

    ``spec`` is an optional (kind, p0, p1) descriptor understood by the
    compiled kernels; profiles built from arbitrary callables leave it
    None and run on the pure-Python backend.
    """

    value_at: Callable[[float], float]
    deriv_at: Callable[[float], float]
    second_deriv_at: Callable[[float], float]
    domain: tuple[float, float] = (-math.inf, math.inf)
    spec: Optional[tuple[int, float, float]] = None


def _profile_formulas(kind, p0, p1):
    """Value/first/second derivative callables for a profile kind.

    Written with numpy ufuncs so each callable accepts scalars and arrays.
    """
    if kind == pk.P_CONST:
        return (lambda R: p0 + 0.0 * R, lambda R: 0.0 * R, lambda R: 0.0 * R)
    if kind == pk.P_POWER:
        return (
            lambda R: p0 * R**p1,
            lambda R: p0 * p1 * R ** (p1 - 1.0),
            lambda R: p0 * p1 * (p1 - 1.0) * R ** (p1 - 2.0),
        )
    if kind == pk.P_SIN2:
        return (
            lambda R: np.sin(R) ** 2,
            lambda R: np.sin(2.0 * R),
            lambda R: 2.0 * np.cos(2.0 * R),
        )
    if kind == pk.P_COS2_SCALED:
        return (
            lambda R: np.cos(R / p0) ** 2,
            lambda R: -np.sin(2.0 * R / p0) / p0,
            lambda R: -2.0 * np.cos(2.0 * R / p0) / p0**2,
        )
    if kind == pk.P_SINH2:
        return (
            lambda R: np.sinh(R) ** 2,
            lambda R: np.sinh(2.0 * R),
            lambda R: 2.0 * np.cosh(2.0 * R),
        )
    if kind == pk.P_COSH2:
        return (
            lambda R: np.cosh(R) ** 2,
            lambda R: np.sinh(2.0 * R),
            lambda R: 2.0 * np.cosh(2.0 * R),
        )
    if kind == pk.P_ELLIPSOID_A:
        return (
            lambda R: p0 * np.sin(R) ** 2 + np.cos(R) ** 2,
            lambda R: (p0 - 1.0) * np.sin(2.0 * R),
            lambda R: 2.0 * (p0 - 1.0) * np.cos(2.0 * R),
        )
    if kind == pk.P_TANH2_SCALED:
        def _v(R):
            t = np.tanh(R)
            return p0 * t * t

        def _d(R):
            t = np.tanh(R)
            return 2.0 * p0 * t * (1.0 - t * t)

        def _dd(R):
            t = np.tanh(R)
            s2 = 1.0 - t * t
            return p0 * (2.0 * s2 * s2 - 4.0 * t * t * s2)

        return (_v, _d, _dd)
    if kind == pk.P_SCHWARZ_A:
        return (
            lambda R: R / (R - p0),
            lambda R: -p0 / (R - p0) ** 2,
            lambda R: 2.0 * p0 / (R - p0) ** 3,
        )
    if kind == pk.P_SCHWARZ_B:
        return (
            lambda R: 1.0 - p0 / R,
            lambda R: p0 / R**2,
            lambda R: -2.0 * p0 / R**3,
        )
    if kind == pk.P_TORUS_B:
        return (
            lambda R: (p0 + p1 * np.cos(R)) ** 2,
            lambda R: -2.0 * p1 * np.sin(R) * (p0 + p1 * np.cos(R)),
            lambda R: -2.0 * p1 * np.cos(R) * (p0 + p1 * np.cos(R)) + 2.0 * p1**2 * np.sin(R) ** 2,
        )
    if kind == pk.P_ONE_PLUS_R2:
        return (lambda R: 1.0 + R * R, lambda R: 2.0 * R, lambda R: 2.0 + 0.0 * R)
    raise ValidationError(f"unknown profile kind {kind}")


def profile_from_spec(kind, p0=0.0, p1=0.0, domain=(-math.inf, math.inf)):
    """Build a RadialProfile from a kernel descriptor."""
    v, d, dd = _profile_formulas(kind, float(p0), float(p1))
    return RadialProfile(v, d, dd, domain=domain, spec=(kind, float(p0), float(p1)))


@dataclass(frozen=True)
class TargetMetric:
    """Warped-product target h = A(R) dR^2 - del2 * B(R) dS^2.

    ``singular_points`` lists the R values where B vanishes; these are
    coordinate singularities of the (R, S) chart (e.g. the poles of the
    ellipsoid or the tip of the cigar), not curvature singularities.
    They usually sit on the boundary of ``r_domain``, but interior ones
    are allowed (the mixed-signature family crosses the cigar tip).
    """

    name: str
    A: RadialProfile
    B: RadialProfile
    del2: int
    r_domain: tuple[float, float]
    singular_points: tuple[float, ...] = ()

    def __post_init__(self):
        if self.del2 not in SIGNS:
            raise ValidationError(f"del2 must be -1 or +1, got {self.del2!r}")
        lo, hi = self.r_domain
        if not lo < hi:
            raise ValidationError(f"empty r_domain {self.r_domain}")

    @property
    def kernel_spec(self):
        """(akind, ap0, ap1, bkind, bp0, bp1) when both profiles are
        kernel-representable, else None."""
        if self.A.spec is None or self.B.spec is None:
            return None
        return self.A.spec + self.B.spec

    def contains(self, R) -> bool:
        lo, hi = self.r_domain
        return bool(np.all((R > lo) & (R < hi)))


@dataclass(frozen=True)
class DomainMetric:
    """Conformally flat domain g = exp(f(x,y)) * (dx^2 - eps2 * dy^2)."""

    eps2: int
    conformal_factor: Callable[[float, float], float] = field(default=lambda x, y: 0.0 * x + 0.0 * y)

    def __post_init__(self):
        if self.eps2 not in SIGNS:
            raise ValidationError(f"eps2 must be -1 or +1, got {self.eps2!r}")


# --------------------------------------------------------------------------
# catalog

CATALOG_NAMES = (
    "flat_polar",
    "sphere",
    "hyperbolic",
    "rindler",
    "de_sitter",
    "anti_de_sitter",
    "power_warp",
    "paraboloid",
    "torus",
    "ellipsoid",
    "schwarzschild_2d",
    "cigar",
    "elliptic_hyperboloid",
    "custom",
)

# constant-curvature rows; the remaining entries (and "custom") vary
CONSTANT_CURVATURE_NAMES = (
    "flat_polar",
    "sphere",
    "hyperbolic",
    "rindler",
    "de_sitter",
    "anti_de_sitter",
)

# display defaults and curvature-sampling windows used by the CLI listing
CATALOG_DISPLAY_PARAMS = {
    "flat_polar": {},
    "sphere": {"a": 1.0},
    "hyperbolic": {},
    "rindler": {},
    "de_sitter": {},
    "anti_de_sitter": {},
    "power_warp": {"p": 2.0},
    "paraboloid": {},
    "torus": {"r": 1.0, "R0": 2.0},
    "ellipsoid": {"c": math.sqrt(2.0)},
    "schwarzschild_2d": {"M": 1.0},
    "cigar": {},
    "elliptic_hyperboloid": {"c": math.sqrt(2.0)},
}

CATALOG_SAMPLE_WINDOWS = {
    "flat_polar": (0.5, 5.0),
    "sphere": (-1.2, 1.2),
    "hyperbolic": (0.3, 3.0),
    "rindler": (0.5, 5.0),
    "de_sitter": (-2.0, 2.0),
    "anti_de_sitter": (0.3, 3.0),
    "power_warp": (0.5, 3.0),
    "paraboloid": (0.5, 3.0),
    "torus": (0.0, 2.0 * math.pi),
    "ellipsoid": (0.3, math.pi - 0.3),
    "schwarzschild_2d": (3.0, 10.0),
    "cigar": (0.3, 3.0),
    "elliptic_hyperboloid": (0.3, math.pi - 0.3),
}


def _require(params, name, *keys):
    missing = [k for k in keys if k not in params]
    if missing:
        raise ValidationError(f"metric {name!r} requires parameter(s) {', '.join(missing)}")
    extra = sorted(set(params) - set(keys))
    if extra:
        raise ValidationError(f"metric {name!r} got unexpected parameter(s) {', '.join(extra)}")
    return [float(params[k]) for k in keys]


def catalog_lookup(name, params=None, *, profiles=None, del2=None,
                   r_domain=None, singular_points=()):
    """Construct a catalog TargetMetric by name.

    ``custom`` builds a metric from caller-supplied (A, B) RadialProfiles
    plus ``del2`` and ``r_domain``; all other names take scalar parameters
    only.  Unknown names, missing parameters, and range violations raise
    ValidationError with a message naming the constraint.
    """
    params = dict(params or {})
    if name not in CATALOG_NAMES:
        raise ValidationError(f"unknown metric name {name!r}; known: {', '.join(CATALOG_NAMES)}")

    inf = math.inf
    if name == "flat_polar":
        _require(params, name)
        A = profile_from_spec(pk.P_CONST, 1.0)
        B = profile_from_spec(pk.P_POWER, 1.0, 2.0, domain=(0.0, inf))
        return TargetMetric(name, A, B, -1, (0.0, inf), (0.0,))
    if name == "sphere":
        (a,) = _require(params, name, "a")
        if not a > 0:
            raise ValidationError(f"sphere requires radius a > 0 (got a={a})")
        half = a * math.pi / 2.0
        A = profile_from_spec(pk.P_CONST, 1.0)
        B = profile_from_spec(pk.P_COS2_SCALED, a, domain=(-half, half))
        return TargetMetric(name, A, B, -1, (-half, half), (-half, half))
    if name == "hyperbolic":
        _require(params, name)
        A = profile_from_spec(pk.P_CONST, 1.0)
        B = profile_from_spec(pk.P_SINH2, domain=(0.0, inf))
        return TargetMetric(name, A, B, -1, (0.0, inf), (0.0,))
    if name == "rindler":
        _require(params, name)
        A = profile_from_spec(pk.P_CONST, 1.0)
        B = profile_from_spec(pk.P_POWER, 1.0, 2.0, domain=(0.0, inf))
        return TargetMetric(name, A, B, +1, (0.0, inf), (0.0,))
    if name == "de_sitter":
        _require(params, name)
        A = profile_from_spec(pk.P_CONST, 1.0)
        B = profile_from_spec(pk.P_COSH2)
        return TargetMetric(name, A, B, +1, (-inf, inf))
    if name == "anti_de_sitter":
        _require(params, name)
        A = profile_from_spec(pk.P_CONST, 1.0)
        B = profile_from_spec(pk.P_SINH2, domain=(0.0, inf))
        return TargetMetric(name, A, B, +1, (0.0, inf), (0.0,))
    if name == "power_warp":
        (p,) = _require(params, name, "p")
        if p in (0.0, 1.0):
            raise ValidationError(f"power_warp requires exponent p not in {{0, 1}} (got p={p})")
        A = profile_from_spec(pk.P_CONST, 1.0)
        B = profile_from_spec(pk.P_POWER, 1.0, 2.0 * p, domain=(0.0, inf))
        return TargetMetric(name, A, B, -1, (0.0, inf), (0.0,))
    if name == "paraboloid":
        _require(params, name)
        A = profile_from_spec(pk.P_ONE_PLUS_R2)
        B = profile_from_spec(pk.P_POWER, 1.0, 2.0, domain=(0.0, inf))
        return TargetMetric(name, A, B, -1, (0.0, inf), (0.0,))
    if name == "torus":
        r, R0 = _require(params, name, "r", "R0")
        if not 0 < r < R0:
            raise ValidationError(f"torus requires 0 < r < R0 (got r={r}, R0={R0})")
        A = profile_from_spec(pk.P_CONST, r * r)
        B = profile_from_spec(pk.P_TORUS_B, R0, r)
        return TargetMetric(name, A, B, -1, (-inf, inf))
    if name == "ellipsoid" or name == "elliptic_hyperboloid":
        (c,) = _require(params, name, "c")
        if not c > 1:
            raise ValidationError(f"{name} requires c > 1 (got c={c})")
        A = profile_from_spec(pk.P_ELLIPSOID_A, c * c)
        B = profile_from_spec(pk.P_SIN2, domain=(0.0, math.pi))
        d2 = -1 if name == "ellipsoid" else +1
        return TargetMetric(name, A, B, d2, (0.0, math.pi), (0.0, math.pi))
    if name == "schwarzschild_2d":
        (M,) = _require(params, name, "M")
        if not M > 0:
            raise ValidationError(f"schwarzschild_2d requires M > 0 (got M={M})")
        A = profile_from_spec(pk.P_SCHWARZ_A, 2.0 * M, domain=(2.0 * M, inf))
        B = profile_from_spec(pk.P_SCHWARZ_B, 2.0 * M, domain=(2.0 * M, inf))
        return TargetMetric(name, A, B, +1, (2.0 * M, inf), (2.0 * M,))
    if name == "cigar":
        # ds^2 = (dR^2 - tanh^2 R dS^2)/2 with the 1/2 absorbed into both profiles
        _require(params, name)
        A = profile_from_spec(pk.P_CONST, 0.5)
        B = profile_from_spec(pk.P_TANH2_SCALED, 0.5, domain=(0.0, inf))
        return TargetMetric(name, A, B, +1, (0.0, inf), (0.0,))
    # custom
    if profiles is None or del2 is None:
        raise ValidationError(
            "metric 'custom' requires profiles=(A, B) RadialProfiles and del2"
        )
    A, B = profiles
    lo = max(A.domain[0], B.domain[0])
    hi = min(A.domain[1], B.domain[1])
    dom = r_domain if r_domain is not None else (lo, hi)
    if dom[0] < lo or dom[1] > hi:
        raise ValidationError(
            f"r_domain {dom} exceeds the profiles' common domain ({lo}, {hi})"
        )
    return TargetMetric("custom", A, B, int(del2), dom, tuple(singular_points))


# --------------------------------------------------------------------------
# curvature

def gauss_curvature(metric: TargetMetric, R: float) -> float:
    """Gauss curvature of the warped product at R (convention in the
    module docstring)."""
    R = float(R)
    lo, hi = metric.r_domain
    if not (lo < R < hi):
        raise NumericalError(f"R={R} outside r_domain ({lo}, {hi})")
    for s in metric.singular_points:
        if R == s:
            raise NumericalError(f"R={R} is a coordinate singularity of {metric.name!r}")
    E = float(metric.A.value_at(R))
    Ep = float(metric.A.deriv_at(R))
    G = -metric.del2 * float(metric.B.value_at(R))
    Gp = -metric.del2 * float(metric.B.deriv_at(R))
    Gpp = -metric.del2 * float(metric.B.second_deriv_at(R))
    if G == 0.0:
        raise NumericalError(f"B({R}) = 0: curvature undefined at a coordinate singularity")
    K = -Gpp / (2.0 * E * G) + Ep * Gp / (4.0 * E * E * G) + Gp * Gp / (4.0 * E * G * G)
    if not math.isfinite(K):
        raise NumericalError(f"non-finite curvature at R={R} for {metric.name!r}")
    return K


@dataclass(frozen=True)
class CurvatureClass:
    constant: bool
    value: Optional[float]  # mean K when constant, else None
    spread: float


def curvature_classify(metric: TargetMetric, samples: Sequence[float],
                       rtol: float = 1e-9) -> CurvatureClass:
    """Classify sampled curvature as constant (within rtol*(1+|mean|)) or variable."""
    samples = np.asarray(samples, dtype=float)
    if samples.size < 8:
        raise ValidationError(f"need at least 8 samples, got {samples.size}")
    Ks = np.array([gauss_curvature(metric, r) for r in samples])
    mean = float(Ks.mean())
    spread = float(Ks.max() - Ks.min())
    if spread <= rtol * (1.0 + abs(mean)):
        return CurvatureClass(True, mean, spread)
    return CurvatureClass(False, None, spread)
