"""Catalog, curvature, and profile-consistency tests.

The ellipsoid curvature values are checked two independent ways: the
warped-product closed form and an ambient-space oracle that builds the
first and second fundamental forms of the embedded surface and takes
det(II)/det(I).
"""

import math

import numpy as np
import pytest

from warpmap import (
    NumericalError,
    ValidationError,
    catalog_lookup,
    curvature_classify,
    gauss_curvature,
    profile_from_spec,
)
from warpmap.kernels import profile_kinds as pk

SQRT2 = math.sqrt(2.0)

# sampling windows (inside r_domain, away from singular points) and the
# display parameters used throughout the tests
CASES = {
    "flat_polar": ({}, (0.5, 5.0)),
    "sphere": ({"a": 1.0}, (-1.2, 1.2)),
    "hyperbolic": ({}, (0.3, 3.0)),
    "rindler": ({}, (0.5, 5.0)),
    "de_sitter": ({}, (-2.0, 2.0)),
    "anti_de_sitter": ({}, (0.3, 3.0)),
    "power_warp": ({"p": 2.0}, (0.5, 3.0)),
    "paraboloid": ({}, (0.5, 3.0)),
    "torus": ({"r": 1.0, "R0": 2.0}, (0.0, 2.0 * math.pi)),
    "ellipsoid": ({"c": SQRT2}, (0.3, math.pi - 0.3)),
    "schwarzschild_2d": ({"M": 1.0}, (3.0, 10.0)),
    "cigar": ({}, (0.3, 3.0)),
    "elliptic_hyperboloid": ({"c": SQRT2}, (0.3, math.pi - 0.3)),
}


def ambient_ellipsoid_K(c, R, S=0.3):
    """Gauss curvature of x^2/c^2 + y^2 + z^2 = 1 at the chart point (R, S),
    from the fundamental forms of F(R,S) = (c cosR, sinR cosS, sinR sinS)."""
    FR = np.array([-c * math.sin(R), math.cos(R) * math.cos(S), math.cos(R) * math.sin(S)])
    FS = np.array([0.0, -math.sin(R) * math.sin(S), math.sin(R) * math.cos(S)])
    FRR = np.array([-c * math.cos(R), -math.sin(R) * math.cos(S), -math.sin(R) * math.sin(S)])
    FRS = np.array([0.0, -math.cos(R) * math.sin(S), math.cos(R) * math.cos(S)])
    FSS = np.array([0.0, -math.sin(R) * math.cos(S), -math.sin(R) * math.sin(S)])
    n = np.cross(FR, FS)
    n /= np.linalg.norm(n)
    E, F, G = FR @ FR, FR @ FS, FS @ FS
    L, M, N = FRR @ n, FRS @ n, FSS @ n
    return (L * N - M * M) / (E * G - F * F)


class TestCatalog:
    def test_ellipsoid_profiles(self):
        m = catalog_lookup("ellipsoid", {"c": SQRT2})
        assert m.A.value_at(math.pi / 2) == pytest.approx(2.0, abs=1e-14)
        assert m.B.value_at(math.pi / 2) == pytest.approx(1.0, abs=1e-15)
        assert m.del2 == -1

    def test_flat_polar(self):
        m = catalog_lookup("flat_polar")
        for R in (0.5, 1.0, 3.7):
            assert m.A.value_at(R) == 1.0
            assert m.B.value_at(R) == pytest.approx(R * R, rel=1e-15)
        assert m.del2 == -1

    def test_sphere_radius_2(self):
        m = catalog_lookup("sphere", {"a": 2.0})
        assert m.A.value_at(0.3) == 1.0
        assert m.B.value_at(1.0) == pytest.approx(math.cos(0.5) ** 2, rel=1e-15)

    def test_cigar_half_absorbed(self):
        m = catalog_lookup("cigar")
        assert m.A.value_at(1.0) == 0.5
        assert m.B.value_at(1.0) == pytest.approx(0.5 * math.tanh(1.0) ** 2, rel=1e-15)
        assert m.del2 == +1

    def test_elliptic_hyperboloid_is_lorentzian_twin(self):
        e = catalog_lookup("ellipsoid", {"c": SQRT2})
        h = catalog_lookup("elliptic_hyperboloid", {"c": SQRT2})
        assert h.del2 == +1
        for R in (0.4, 1.0, 2.2):
            assert h.A.value_at(R) == e.A.value_at(R)
            assert h.B.value_at(R) == e.B.value_at(R)

    def test_unknown_name(self):
        with pytest.raises(ValidationError, match="unknown metric"):
            catalog_lookup("moebius")

    @pytest.mark.parametrize(
        "name,params,msg",
        [
            ("ellipsoid", {"c": 1.0}, "c > 1"),
            ("ellipsoid", {}, "requires parameter"),
            ("sphere", {"a": 0.0}, "a > 0"),
            ("torus", {"r": 2.0, "R0": 1.0}, "0 < r < R0"),
            ("power_warp", {"p": 1.0}, "not in"),
            ("schwarzschild_2d", {"M": -1.0}, "M > 0"),
            ("flat_polar", {"c": 2.0}, "unexpected"),
        ],
    )
    def test_parameter_validation(self, name, params, msg):
        with pytest.raises(ValidationError, match=msg):
            catalog_lookup(name, params)

    def test_custom_requires_profiles(self):
        with pytest.raises(ValidationError, match="custom"):
            catalog_lookup("custom", {})

    def test_custom_builds(self):
        A = profile_from_spec(pk.P_CONST, 1.0)
        B = profile_from_spec(pk.P_CONST, 2.0)
        m = catalog_lookup("custom", profiles=(A, B), del2=-1, r_domain=(-5.0, 5.0))
        assert m.B.value_at(0.0) == 2.0


class TestProfiles:
    @pytest.mark.parametrize("name", sorted(CASES))
    def test_derivative_matches_fd(self, name):
        params, (lo, hi) = CASES[name]
        m = catalog_lookup(name, params)
        h = 1e-5
        Rs = np.linspace(lo + 2 * h, hi - 2 * h, 100)
        for prof in (m.A, m.B):
            fd = (prof.value_at(Rs + h) - prof.value_at(Rs - h)) / (2 * h)
            assert np.max(np.abs(fd - prof.deriv_at(Rs))) <= 1e-6
            # second difference: larger h (rounding ~ eps*|f|/h^2), scaled tolerance
            h2 = 1e-4
            fd2 = (prof.value_at(Rs + h2) - 2 * prof.value_at(Rs) + prof.value_at(Rs - h2)) / h2**2
            scale = 1.0 + np.max(np.abs(prof.second_deriv_at(Rs)))
            assert np.max(np.abs(fd2 - prof.second_deriv_at(Rs))) <= 1e-5 * scale

    @pytest.mark.parametrize("name", sorted(CASES))
    def test_positive_inside_window(self, name):
        params, (lo, hi) = CASES[name]
        m = catalog_lookup(name, params)
        Rs = np.linspace(lo + 1e-6, hi - 1e-6, 50)
        assert np.all(m.A.value_at(Rs) > 0)
        assert np.all(m.B.value_at(Rs) > 0)


class TestCurvature:
    def test_unit_sphere(self):
        m = catalog_lookup("sphere", {"a": 1.0})
        assert gauss_curvature(m, 0.7) == pytest.approx(1.0, abs=1e-12)

    def test_sphere_radius_2(self):
        m = catalog_lookup("sphere", {"a": 2.0})
        assert gauss_curvature(m, 0.9) == pytest.approx(0.25, abs=1e-12)

    def test_ellipsoid_equator_against_ambient_oracle(self):
        m = catalog_lookup("ellipsoid", {"c": SQRT2})
        K = gauss_curvature(m, math.pi / 2)
        assert K == pytest.approx(0.5, abs=1e-9)
        assert K == pytest.approx(ambient_ellipsoid_K(SQRT2, math.pi / 2), abs=1e-6)

    def test_ellipsoid_pole_limit_against_ambient_oracle(self):
        # K -> c^2 = 2 at the pole of the c=sqrt(2) spheroid; R small enough
        # to probe the limit, large enough that the two ~1/sin^2 R terms of
        # the closed form do not cancel catastrophically
        m = catalog_lookup("ellipsoid", {"c": SQRT2})
        R = 1e-4
        K = gauss_curvature(m, R)
        assert K == pytest.approx(2.0, abs=1e-6)
        assert K == pytest.approx(ambient_ellipsoid_K(SQRT2, R), abs=1e-6)

    def test_ellipsoid_profile_of_K_tracks_oracle(self):
        m = catalog_lookup("ellipsoid", {"c": SQRT2})
        for R in np.linspace(0.3, math.pi - 0.3, 7):
            assert gauss_curvature(m, R) == pytest.approx(ambient_ellipsoid_K(SQRT2, R), abs=1e-9)

    def test_fd_evaluation_of_closed_form_converges(self):
        # same closed form evaluated with value_at-only finite differences
        m = catalog_lookup("ellipsoid", {"c": SQRT2})
        R = 1.1
        K = gauss_curvature(m, R)

        def K_fd(h):
            E = float(m.A.value_at(R))
            Ep = float((m.A.value_at(R + h) - m.A.value_at(R - h)) / (2 * h))
            G = -m.del2 * float(m.B.value_at(R))
            Gp = -m.del2 * float((m.B.value_at(R + h) - m.B.value_at(R - h)) / (2 * h))
            Gpp = -m.del2 * float(
                (m.B.value_at(R + h) - 2 * m.B.value_at(R) + m.B.value_at(R - h)) / h**2
            )
            return -Gpp / (2 * E * G) + Ep * Gp / (4 * E * E * G) + Gp * Gp / (4 * E * G * G)

        e1 = abs(K_fd(1e-3) - K)
        e2 = abs(K_fd(5e-4) - K)
        assert e1 / e2 == pytest.approx(4.0, abs=0.6)

    def test_errors(self):
        m = catalog_lookup("ellipsoid", {"c": SQRT2})
        with pytest.raises(NumericalError):
            gauss_curvature(m, 0.0)  # singular point
        with pytest.raises(NumericalError):
            gauss_curvature(m, 4.0)  # outside r_domain


class TestClassification:
    @pytest.mark.parametrize(
        "name", ["flat_polar", "sphere", "hyperbolic", "rindler", "de_sitter", "anti_de_sitter"]
    )
    def test_constant_rows(self, name):
        params, (lo, hi) = CASES[name]
        m = catalog_lookup(name, params)
        cls = curvature_classify(m, np.linspace(lo, hi, 12))
        assert cls.constant, f"{name} should classify constant (spread {cls.spread})"
        assert cls.spread <= 1e-9 * (1.0 + abs(cls.value))

    @pytest.mark.parametrize(
        "name",
        ["power_warp", "paraboloid", "torus", "ellipsoid", "schwarzschild_2d", "cigar",
         "elliptic_hyperboloid"],
    )
    def test_variable_rows(self, name):
        params, (lo, hi) = CASES[name]
        m = catalog_lookup(name, params)
        cls = curvature_classify(m, np.linspace(lo, hi, 12))
        assert not cls.constant, f"{name} should classify variable"

    def test_de_sitter_value(self):
        m = catalog_lookup("de_sitter")
        cls = curvature_classify(m, np.linspace(0.1, 2.0, 10))
        assert cls.constant and cls.value == pytest.approx(-1.0, abs=1e-12)

    def test_flat_polar_value(self):
        m = catalog_lookup("flat_polar")
        cls = curvature_classify(m, np.linspace(0.5, 5.0, 10))
        assert cls.constant and cls.value == pytest.approx(0.0, abs=1e-12)

    def test_needs_eight_samples(self):
        m = catalog_lookup("flat_polar")
        with pytest.raises(ValidationError):
            curvature_classify(m, np.linspace(0.5, 5.0, 5))
