"""March, quadrature, and map-assembly tests against closed-form oracles."""

import math

import numpy as np
import pytest

from warpmap import (
    IntegratorConfig,
    NumericalError,
    ReductionParams,
    SignaturePair,
    ValidationError,
    assemble_map,
    catalog_lookup,
    integrate_R,
    phi,
    profile_from_spec,
    quadrature_H,
)
from warpmap.closedforms import unwrap_arctan
from warpmap.kernels import profile_kinds as pk

SQRT2 = math.sqrt(2.0)
ELL = catalog_lookup("ellipsoid", {"c": SQRT2})
FLAGSHIP = ReductionParams(0.0, 1.0, 0.125, -SQRT2 / 4.0, SignaturePair(-1, -1))
THETA = math.pi / 4


def closed_R(t):
    return np.arccos(math.cos(THETA) * np.sin(t))


def closed_H(t):
    return unwrap_arctan(math.sin(THETA), np.asarray(t, dtype=float))


def flat_unit_target():
    return catalog_lookup(
        "custom",
        profiles=(profile_from_spec(pk.P_CONST, 1.0), profile_from_spec(pk.P_CONST, 1.0)),
        del2=-1,
        r_domain=(-1e6, 1e6),
    )


class TestIntegrateR:
    def test_constant_phi_free_motion(self):
        # A=B=1, kappa=lambda=0, a=0, b=1: phi = 1, so R(t) = R0 + t
        m = flat_unit_target()
        p = ReductionParams(0.0, 1.0, 0.0, 0.0, SignaturePair(-1, -1))
        sol = integrate_R(m, p, 0.3, +1, (0.0, 2.0), IntegratorConfig(dt=1e-3))
        assert np.max(np.abs(sol.Rs - (0.3 + sol.ts))) <= 1e-12
        assert sol.turning_events == ()

    def test_flagship_matches_closed_form(self):
        sol = integrate_R(ELL, FLAGSHIP, math.pi / 2, -1, (0.0, 4.7), IntegratorConfig(dt=1e-3))
        assert np.max(np.abs(sol.Rs - closed_R(sol.ts))) <= 1e-6
        assert len(sol.turning_events) == 1
        assert sol.turning_events[0] == pytest.approx(math.pi / 2, abs=2e-3)

    def test_flagship_second_turning_event(self):
        sol = integrate_R(ELL, FLAGSHIP, math.pi / 2, -1, (0.0, 4.75), IntegratorConfig(dt=1e-3))
        assert len(sol.turning_events) == 2
        assert sol.turning_events[1] == pytest.approx(3 * math.pi / 2, abs=2e-3)

    def test_departure_from_turning_point(self):
        # phi(pi/4) = 0 but phi'(pi/4) != 0: motion departs, R(t) = arccos(cos(theta) cos t)
        sol = integrate_R(ELL, FLAGSHIP, math.pi / 4, +1, (0.0, 1.0), IntegratorConfig(dt=1e-3))
        assert sol.Rs[100] > math.pi / 4
        oracle = np.arccos(math.cos(THETA) * np.cos(sol.ts))
        assert np.max(np.abs(sol.Rs - oracle)) <= 1e-6

    def test_drift_budget_and_order(self):
        cfg = IntegratorConfig(dt=1e-3, invariant_tol=1e-8)
        sol = integrate_R(ELL, FLAGSHIP, math.pi / 2, -1, (0.0, 4.7), cfg)
        assert np.max(sol.drift) <= 1e-8 * 4.7
        # order check in the truncation-dominated regime (coarse steps)
        d_coarse = np.max(integrate_R(ELL, FLAGSHIP, math.pi / 2, -1, (0.0, 4.7),
                                      IntegratorConfig(dt=8e-3)).drift)
        d_fine = np.max(integrate_R(ELL, FLAGSHIP, math.pi / 2, -1, (0.0, 4.7),
                                    IntegratorConfig(dt=4e-3)).drift)
        assert d_coarse / d_fine >= 8.0

    def test_velocity_verlet_conserves(self):
        cfg = IntegratorConfig(dt=1e-4, method="velocity_verlet", invariant_tol=1e-4)
        sol = integrate_R(ELL, FLAGSHIP, math.pi / 2, -1, (0.0, 2.0), cfg)
        assert np.max(np.abs(sol.Rs - closed_R(sol.ts))) <= 1e-5

    def test_time_reversal(self):
        cfg = IntegratorConfig(dt=1e-3)
        fwd = integrate_R(ELL, FLAGSHIP, math.pi / 2, -1, (0.0, 1.0), cfg)
        R1, V1 = fwd.Rs[-1], fwd.Rps[-1]
        back = integrate_R(ELL, FLAGSHIP, float(R1), -1 if V1 > 0 else +1, (0.0, 1.0), cfg)
        budget = 10.0 * (np.max(fwd.drift) + 1e-14)
        assert abs(back.Rs[-1] - math.pi / 2) <= budget + 1e-9
        assert abs(abs(back.Rps[-1]) - abs(fwd.Rps[0])) <= budget + 1e-9

    def test_inadmissible_start_rejected(self):
        p = ReductionParams(0.0, 1.0, 0.0, 0.0, SignaturePair(+1, -1))  # c1 < 0
        with pytest.raises(ValidationError, match="phi"):
            integrate_R(ELL, p, 1.0, +1, (0.0, 1.0))

    def test_domain_exit_reported(self):
        # B = 1 + R^2 on (-1, 1): phi = 1 + R^2 >= 1, R' >= 1 exits the domain
        m = catalog_lookup(
            "custom",
            profiles=(profile_from_spec(pk.P_CONST, 1.0), profile_from_spec(pk.P_ONE_PLUS_R2)),
            del2=-1,
            r_domain=(-1.0, 1.0),
        )
        p = ReductionParams(0.0, 1.0, 0.0, 0.0, SignaturePair(-1, -1))
        with pytest.raises(NumericalError, match="left the metric domain"):
            integrate_R(m, p, 0.0, +1, (0.0, 2.0), IntegratorConfig(dt=1e-3))

    def test_drift_budget_exceeded_reported(self):
        cfg = IntegratorConfig(dt=5e-2, invariant_tol=1e-14)
        with pytest.raises(NumericalError, match="drift"):
            integrate_R(ELL, FLAGSHIP, math.pi / 2, -1, (0.0, 4.7), cfg)

    def test_max_steps_guard(self):
        cfg = IntegratorConfig(dt=1e-3, max_steps=100)
        with pytest.raises(NumericalError, match="max_steps"):
            integrate_R(ELL, FLAGSHIP, math.pi / 2, -1, (0.0, 4.7), cfg)

    def test_oracle_equivalence_hyperboloid_family(self):
        # constants recovered from the closed form, march seeded with them;
        # no turning point exists in-domain (R' != 0 on the valid band)
        from warpmap import hyperboloid_map, recover_first_integrals

        cf = hyperboloid_map(SQRT2, 1.0, 0.0, 1.0)
        R0, Rp0, Hp0 = (float(v) for v in cf.frame_data(0.0))
        k, l = recover_first_integrals(cf.target, SignaturePair(1, 1), 0.0, 1.0, R0, Rp0, Hp0)
        p = ReductionParams(0.0, 1.0, k, l, SignaturePair(1, 1))
        sol = quadrature_H(cf.target, p,
                           integrate_R(cf.target, p, R0, -1, (0.0, 0.6), IntegratorConfig(dt=1e-3)))
        Rex, _, _ = cf.frame_data(sol.ts)
        assert np.max(np.abs(sol.Rs - Rex)) <= 1e-6
        Hex = np.arctanh(math.sinh(1.0) * np.tan(sol.ts))
        assert np.max(np.abs(sol.Hs - Hex)) <= 1e-6

    def test_oracle_equivalence_mixed_family(self):
        # span kept on one side of the chart singularity R = 0: the crossing
        # requires c4 = 0 exactly, and the recovered constants carry rounding
        # that turns c4/B into a pole there (the drift guard catches it)
        from warpmap import mixed_map, recover_first_integrals

        cf = mixed_map(math.pi / 6, +1)
        R0, Rp0, Hp0 = (float(v) for v in cf.frame_data(-1.0))
        k, l = recover_first_integrals(cf.target, SignaturePair(1, -1), cf.a, cf.b, R0, Rp0, Hp0)
        assert k == pytest.approx(1.0, abs=1e-12)
        assert l == pytest.approx(-math.sqrt(3) / 2, abs=1e-12)
        p = ReductionParams(cf.a, cf.b, k, l, SignaturePair(1, -1))
        sol = quadrature_H(cf.target, p,
                           integrate_R(cf.target, p, R0, +1, (-1.0, -0.05), IntegratorConfig(dt=1e-3)))
        Rex, _, _ = cf.frame_data(sol.ts)
        assert np.max(np.abs(sol.Rs - Rex)) <= 1e-6
        assert np.max(np.abs(sol.Hs - math.sqrt(3.0) * (sol.ts - sol.ts[0]))) <= 1e-6

    def test_double_root_approach_warns(self):
        # rindler with kappa=-1/2, lambda=1/2 gives phi = (R^2-1)^2/R^2:
        # a double root at R=1, approached asymptotically (R-1 ~ e^{-2t})
        m = catalog_lookup("rindler")
        p = ReductionParams(0.0, 1.0, -0.5, 0.5, SignaturePair(+1, +1))
        sol = integrate_R(m, p, 2.0, -1, (0.0, 8.0), IntegratorConfig(dt=1e-3))
        assert sol.turning_events == ()  # no sign change, only decay
        assert len(sol.warnings) == 1 and "double-root" in sol.warnings[0]
        assert abs(sol.Rs[-1] - 1.0) <= 1e-6

    def test_no_warning_at_simple_turning_point(self):
        sol = integrate_R(ELL, FLAGSHIP, math.pi / 2, -1, (0.0, 4.7), IntegratorConfig(dt=1e-3))
        assert sol.warnings == ()


class TestQuadratureH:
    def test_zero_integrand(self):
        m = flat_unit_target()
        p = ReductionParams(0.0, 1.0, 0.0, 0.0, SignaturePair(-1, -1))
        sol = quadrature_H(m, p, integrate_R(m, p, 0.0, +1, (0.0, 1.0)))
        assert np.max(np.abs(sol.Hs)) == 0.0

    def test_constant_integrand(self):
        # constant B=B0, a=0, b=1: H(t) = -2*lambda*t/B0 up to quadrature order
        B0 = 2.0
        m = catalog_lookup(
            "custom",
            profiles=(profile_from_spec(pk.P_CONST, 1.0), profile_from_spec(pk.P_CONST, B0)),
            del2=-1,
            r_domain=(-1e6, 1e6),
        )
        lam = 0.3
        p = ReductionParams(0.0, 1.0, 0.2, lam, SignaturePair(-1, -1))
        sol = quadrature_H(m, p, integrate_R(m, p, 0.0, +1, (0.0, 2.0)))
        assert np.max(np.abs(sol.Hs - (-2.0 * lam / B0) * sol.ts)) <= 1e-12

    def test_flagship_matches_unwrapped_arctan(self):
        sol = quadrature_H(ELL, FLAGSHIP,
                           integrate_R(ELL, FLAGSHIP, math.pi / 2, -1, (0.0, 1.4)))
        assert sol.Hs[0] == 0.0
        assert np.max(np.abs(sol.Hs - closed_H(sol.ts))) <= 1e-6


class TestAssembleMap:
    @pytest.fixture()
    def flagship_sol(self):
        # span covering negative t: seed the closed-form phase at t0 = -2
        # (the ODE is autonomous; H then carries the offset -closed_H(-2))
        R0 = float(closed_R(-2.0))
        sol = integrate_R(ELL, FLAGSHIP, R0, +1, (-2.0, 2.0), IntegratorConfig(dt=1e-3))
        return quadrature_H(ELL, FLAGSHIP, sol)

    def test_axis_frame_constant_along_vertical_lines(self, flagship_sol):
        ms = assemble_map(flagship_sol, FLAGSHIP, np.linspace(-1, 1, 9), np.linspace(-1, 1, 7))
        assert np.max(np.abs(ms.R - ms.R[0:1, :])) == 0.0  # t = -x, independent of y

    def test_center_values(self):
        # pipeline started at t0 = 0: the grid corner (0, 0) sits at t = 0
        sol = quadrature_H(ELL, FLAGSHIP,
                           integrate_R(ELL, FLAGSHIP, math.pi / 2, -1, (0.0, 1.5)))
        ms = assemble_map(sol, FLAGSHIP, np.linspace(-1, 0, 9), np.linspace(-1, 1, 9))
        assert ms.R[4, -1] == pytest.approx(math.pi / 2, abs=1e-10)
        assert ms.S[4, -1] == pytest.approx(0.0, abs=1e-10)

    def test_matches_closed_form(self, flagship_sol):
        xs = np.linspace(-1.3, 1.1, 11)
        ys = np.linspace(-0.7, 0.9, 8)
        ms = assemble_map(flagship_sol, FLAGSHIP, xs, ys)
        X, Y = np.meshgrid(xs, ys)
        t = -X
        offset = float(closed_H(-2.0))
        assert np.max(np.abs(ms.R - closed_R(t))) <= 1e-6
        assert np.max(np.abs(ms.S - (Y + closed_H(t) - offset))) <= 1e-6

    def test_diagonal_frame_geometry(self):
        # a=b=1 (Riemannian, nondegenerate): t and S-(x+y) constant on diagonals
        p = ReductionParams(1.0, 1.0, 0.125, -SQRT2 / 4.0, SignaturePair(-1, -1))
        sol = quadrature_H(ELL, p, integrate_R(ELL, p, math.pi / 2, -1, (-3.0, 3.0)))
        xs = ys = np.linspace(-1, 1, 5)
        ms = assemble_map(sol, p, xs, ys)
        diag_R = np.diagonal(ms.R)  # y = x => t = x - x... a*y - b*x = y - x = 0
        assert np.max(np.abs(diag_R - diag_R[0])) <= 1e-12
        X, Y = np.meshgrid(xs, ys)
        h_part = ms.S - (X + Y)
        assert np.max(np.abs(np.diagonal(h_part) - np.diagonal(h_part)[0])) <= 1e-12

    def test_out_of_range_grid_rejected(self, flagship_sol):
        with pytest.raises(ValidationError, match="exceed"):
            assemble_map(flagship_sol, FLAGSHIP, np.linspace(-5, 5, 9), np.linspace(-1, 1, 9))

    def test_requires_quadrature_first(self):
        sol = integrate_R(ELL, FLAGSHIP, math.pi / 2, -1, (0.0, 1.0))
        with pytest.raises(ValidationError, match="quadrature"):
            assemble_map(sol, FLAGSHIP, np.linspace(-0.5, 0.5, 9), np.linspace(-0.5, 0.5, 9))
