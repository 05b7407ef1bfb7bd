"""Backend equivalence: the compiled kernels must agree with the
pure-Python twin on profiles, ODE marches, and wave marches."""

import math

import numpy as np
import pytest

from warpmap import (
    IntegratorConfig,
    ReductionParams,
    SignaturePair,
    WaveEvolveConfig,
    catalog_lookup,
    integrate_R,
    mixed_map,
    wave_evolve,
)
from warpmap import kernels
from warpmap.kernels import profile_kinds as pk
from warpmap.metrics import profile_from_spec

SQRT2 = math.sqrt(2.0)
ELL = catalog_lookup("ellipsoid", {"c": SQRT2})
FLAGSHIP = ReductionParams(0.0, 1.0, 0.125, -SQRT2 / 4.0, SignaturePair(-1, -1))

needs_native = pytest.mark.skipif(not kernels.HAVE_NATIVE, reason="extension not built")


@pytest.fixture()
def python_backend():
    kernels.force_backend("python")
    yield
    kernels.force_backend(None)


# profile specs covering every kind, with sample windows
KIND_SAMPLES = [
    ((pk.P_CONST, 0.5, 0.0), (-3.0, 3.0)),
    ((pk.P_POWER, 1.0, 2.0), (0.1, 4.0)),
    ((pk.P_POWER, 1.0, 4.0), (0.1, 3.0)),
    ((pk.P_SIN2, 0.0, 0.0), (0.1, 3.0)),
    ((pk.P_COS2_SCALED, 2.0, 0.0), (-2.5, 2.5)),
    ((pk.P_SINH2, 0.0, 0.0), (0.1, 3.0)),
    ((pk.P_COSH2, 0.0, 0.0), (-3.0, 3.0)),
    ((pk.P_ELLIPSOID_A, 2.0, 0.0), (0.1, 3.0)),
    ((pk.P_TANH2_SCALED, 0.5, 0.0), (-3.0, 3.0)),
    ((pk.P_SCHWARZ_A, 2.0, 0.0), (2.5, 9.0)),
    ((pk.P_SCHWARZ_B, 2.0, 0.0), (2.5, 9.0)),
    ((pk.P_TORUS_B, 2.0, 1.0), (-3.0, 3.0)),
    ((pk.P_ONE_PLUS_R2, 0.0, 0.0), (-3.0, 3.0)),
]


@needs_native
class TestProfileDispatch:
    @pytest.mark.parametrize("spec,window", KIND_SAMPLES)
    def test_value_and_deriv_match_python(self, spec, window):
        from warpmap.kernels import _native

        kind, p0, p1 = spec
        prof = profile_from_spec(kind, p0, p1)
        for R in np.linspace(*window, 37):
            pv = float(prof.value_at(R))
            pd = float(prof.deriv_at(R))
            nv = _native.profile_value(kind, p0, p1, R)
            nd = _native.profile_deriv(kind, p0, p1, R)
            assert nv == pytest.approx(pv, rel=1e-14, abs=1e-14)
            assert nd == pytest.approx(pd, rel=1e-14, abs=1e-14)

    def test_every_kind_listed(self):
        kinds = {s[0][0] for s in KIND_SAMPLES}
        assert kinds == set(pk.ALL_KINDS)


@needs_native
class TestMarchEquivalence:
    @pytest.mark.parametrize("method", ["rk4_second_order", "velocity_verlet"])
    def test_ode_march(self, method, python_backend):
        cfg = IntegratorConfig(dt=1e-3, method=method, invariant_tol=1e-4)
        span = (0.0, 3.0)
        sol_py = integrate_R(ELL, FLAGSHIP, math.pi / 2, -1, span, cfg)
        kernels.force_backend(None)
        sol_nat = integrate_R(ELL, FLAGSHIP, math.pi / 2, -1, span, cfg)
        assert np.max(np.abs(sol_py.Rs - sol_nat.Rs)) <= 1e-13
        assert np.max(np.abs(sol_py.Rps - sol_nat.Rps)) <= 1e-13
        assert sol_py.turning_events == sol_nat.turning_events

    def test_wave_march(self, python_backend):
        cf = mixed_map(math.pi / 6, +1)
        cfg = WaveEvolveConfig(dx=1 / 50, T=0.5)
        res_py = wave_evolve(cf.target, cf, cfg, (-1.0, 1.0))
        kernels.force_backend(None)
        res_nat = wave_evolve(cf.target, cf, cfg, (-1.0, 1.0))
        assert np.max(np.abs(res_py.R - res_nat.R)) <= 1e-12
        assert np.max(np.abs(res_py.S - res_nat.S)) <= 1e-12
        assert res_py.deviation == pytest.approx(res_nat.deviation, rel=1e-9, abs=1e-12)


class TestBackendSelection:
    def test_custom_profiles_fall_back(self):
        m = catalog_lookup(
            "custom",
            profiles=(
                profile_from_spec(pk.P_CONST, 1.0),
                # hand-written callable: no kernel descriptor
                __import__("warpmap").RadialProfile(
                    value_at=lambda R: 1.0 + 0.0 * R,
                    deriv_at=lambda R: 0.0 * R,
                    second_deriv_at=lambda R: 0.0 * R,
                ),
            ),
            del2=-1,
            r_domain=(-10.0, 10.0),
        )
        assert m.kernel_spec is None
        assert kernels.active_backend(m.kernel_spec) == "python"
        p = ReductionParams(0.0, 1.0, 0.0, 0.0, SignaturePair(-1, -1))
        sol = integrate_R(m, p, 0.0, +1, (0.0, 1.0))
        assert np.max(np.abs(sol.Rs - sol.ts)) <= 1e-12

    def test_force_unknown_rejected(self):
        with pytest.raises(ValueError):
            kernels.force_backend("gpu")

    def test_force_python_round_trip(self):
        kernels.force_backend("python")
        try:
            assert kernels.active_backend((0, 1.0, 0.0, 2, 0.0, 0.0)) == "python"
        finally:
            kernels.force_backend(None)
