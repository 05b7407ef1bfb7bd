"""Independent verification of produced maps.

Everything here works in real coordinates.  The Euler-Lagrange residuals
of u = (R, S) against a warped-product target are

    E1 = 2A(R)(R_xx - eps2*R_yy) + A'(R)(R_x^2 - eps2*R_y^2)
         + del2*B'(R)(S_x^2 - eps2*S_y^2)
    E2 = 2B(R)(S_xx - eps2*S_yy) + 2B'(R)(R_x S_x - eps2*R_y S_y)

(the domain conformal factor drops out entirely: two-dimensional
conformal invariance).  The first-integral residuals along a reduced
solution, with K = A R'^2 - del2*B H'^2, are

    G1 = (a^2+eps2*b^2)K - 4*eps2*kappa
         - del2*B*(b^2+eps2*a^2 + 2(1-eps2)*a*b*H')
    G2 = a*b*K + 2*lambda - del2*B*((b^2-a^2)*H' - a*b)

Both vanish identically on maps produced by the reduction; the verifier
measures how close to zero they come, with finite-difference fallbacks
when no analytic derivatives are available.

For the Lorentzian regime (eps2 = +1, y is the evolution direction) a
method-of-lines leapfrog evolver re-solves the wave-map system from
reference initial data and reports the discrete L2 deviation at the final
time, which converges at second order for smooth exact solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .closedforms import MapDerivs
from .errors import NumericalError, ValidationError
from .integrate import MapSample, ODESolution
from .kernels import pyloop
from .metrics import DomainMetric, SignaturePair, TargetMetric
from .reduction import ReductionParams, h_prime


@dataclass(frozen=True)
class GridSpec:
    x_range: tuple[float, float]
    y_range: tuple[float, float]
    nx: int = 50
    ny: int = 50
    fd_h: float = 1e-3
    fd_order: int = 2

    def __post_init__(self):
        if self.nx < 8 or self.ny < 8:
            raise ValidationError(f"grid needs nx, ny >= 8, got {self.nx}x{self.ny}")
        if not self.fd_h > 0:
            raise ValidationError(f"fd_h must be > 0, got {self.fd_h}")
        if self.fd_order not in (2, 4):
            raise ValidationError(f"fd_order must be 2 or 4, got {self.fd_order}")

    def mesh(self):
        xs = np.linspace(*self.x_range, self.nx)
        ys = np.linspace(*self.y_range, self.ny)
        return np.meshgrid(xs, ys)


@dataclass(frozen=True)
class ResidualReport:
    sup_E1: Optional[float] = None
    sup_E2: Optional[float] = None
    worst_E1: Optional[tuple[float, float]] = None
    worst_E2: Optional[tuple[float, float]] = None
    sup_G1: Optional[float] = None
    sup_G2: Optional[float] = None
    worst_G1_t: Optional[float] = None
    worst_G2_t: Optional[float] = None
    observed_order: Optional[float] = None
    K_samples: Optional[np.ndarray] = None

    def scalar_fields(self) -> dict:
        out = {}
        for k in ("sup_E1", "sup_E2", "sup_G1", "sup_G2", "observed_order"):
            v = getattr(self, k)
            if v is not None:
                out[k] = v
        for k in ("worst_E1", "worst_E2"):
            v = getattr(self, k)
            if v is not None:
                out[k + "_x"], out[k + "_y"] = v
        for k in ("worst_G1_t", "worst_G2_t"):
            v = getattr(self, k)
            if v is not None:
                out[k] = v
        return out


def _el_from_derivs(R, d, metric, sig):
    e2, d2 = sig.eps2, metric.del2
    A = metric.A.value_at(R)
    Ap = metric.A.deriv_at(R)
    B = metric.B.value_at(R)
    Bp = metric.B.deriv_at(R)
    E1 = 2.0 * A * (d.Rxx - e2 * d.Ryy) + Ap * (d.Rx**2 - e2 * d.Ry**2) \
        + d2 * Bp * (d.Sx**2 - e2 * d.Sy**2)
    E2 = 2.0 * B * (d.Sxx - e2 * d.Syy) + 2.0 * Bp * (d.Rx * d.Sx - e2 * d.Ry * d.Sy)
    return E1, E2


def _fd_derivs_callable(eval_fn, X, Y, h, order):
    def at(dx, dy):
        return eval_fn(X + dx * h, Y + dy * h)

    R0, S0 = eval_fn(X, Y)
    if order == 2:
        Rpx, Spx = at(1, 0)
        Rmx, Smx = at(-1, 0)
        Rpy, Spy = at(0, 1)
        Rmy, Smy = at(0, -1)
        d1 = lambda p, m_: (p - m_) / (2.0 * h)
        d2_ = lambda p, z, m_: (p - 2.0 * z + m_) / (h * h)
        return R0, MapDerivs(
            Rx=d1(Rpx, Rmx), Ry=d1(Rpy, Rmy), Sx=d1(Spx, Smx), Sy=d1(Spy, Smy),
            Rxx=d2_(Rpx, R0, Rmx), Ryy=d2_(Rpy, R0, Rmy),
            Sxx=d2_(Spx, S0, Smx), Syy=d2_(Spy, S0, Smy),
        ), S0
    Rp2x, Sp2x = at(2, 0)
    Rpx, Spx = at(1, 0)
    Rmx, Smx = at(-1, 0)
    Rm2x, Sm2x = at(-2, 0)
    Rp2y, Sp2y = at(0, 2)
    Rpy, Spy = at(0, 1)
    Rmy, Smy = at(0, -1)
    Rm2y, Sm2y = at(0, -2)
    d1 = lambda p2, p, m_, m2: (-p2 + 8.0 * p - 8.0 * m_ + m2) / (12.0 * h)
    d2_ = lambda p2, p, z, m_, m2: (-p2 + 16.0 * p - 30.0 * z + 16.0 * m_ - m2) / (12.0 * h * h)
    return R0, MapDerivs(
        Rx=d1(Rp2x, Rpx, Rmx, Rm2x), Ry=d1(Rp2y, Rpy, Rmy, Rm2y),
        Sx=d1(Sp2x, Spx, Smx, Sm2x), Sy=d1(Sp2y, Spy, Smy, Sm2y),
        Rxx=d2_(Rp2x, Rpx, R0, Rmx, Rm2x), Ryy=d2_(Rp2y, Rpy, R0, Rmy, Rm2y),
        Sxx=d2_(Sp2x, Spx, S0, Smx, Sm2x), Syy=d2_(Sp2y, Spy, S0, Smy, Sm2y),
    ), S0


def _grid_fd_derivs(F, hx, hy, order):
    # derivatives of a 2-D sample array on its own lattice; returns the
    # interior block (pad cells stripped)
    if order == 2:
        C = F[1:-1, 1:-1]
        Fx = (F[1:-1, 2:] - F[1:-1, :-2]) / (2.0 * hx)
        Fy = (F[2:, 1:-1] - F[:-2, 1:-1]) / (2.0 * hy)
        Fxx = (F[1:-1, 2:] - 2.0 * C + F[1:-1, :-2]) / hx**2
        Fyy = (F[2:, 1:-1] - 2.0 * C + F[:-2, 1:-1]) / hy**2
    else:
        C = F[2:-2, 2:-2]
        Fx = (-F[2:-2, 4:] + 8 * F[2:-2, 3:-1] - 8 * F[2:-2, 1:-3] + F[2:-2, :-4]) / (12.0 * hx)
        Fy = (-F[4:, 2:-2] + 8 * F[3:-1, 2:-2] - 8 * F[1:-3, 2:-2] + F[:-4, 2:-2]) / (12.0 * hy)
        Fxx = (-F[2:-2, 4:] + 16 * F[2:-2, 3:-1] - 30 * C + 16 * F[2:-2, 1:-3] - F[2:-2, :-4]) / (12.0 * hx**2)
        Fyy = (-F[4:, 2:-2] + 16 * F[3:-1, 2:-2] - 30 * C + 16 * F[1:-3, 2:-2] - F[:-4, 2:-2]) / (12.0 * hy**2)
    return C, Fx, Fy, Fxx, Fyy


def _el_once(map_like, metric, sig, grid, derivs):
    if isinstance(map_like, MapSample):
        hx = float(map_like.xs[1] - map_like.xs[0])
        hy = float(map_like.ys[1] - map_like.ys[0])
        p = 1 if grid.fd_order == 2 else 2
        R, Rx, Ry, Rxx, Ryy = _grid_fd_derivs(map_like.R, hx, hy, grid.fd_order)
        S, Sx, Sy, Sxx, Syy = _grid_fd_derivs(map_like.S, hx, hy, grid.fd_order)
        d = MapDerivs(Rx, Ry, Sx, Sy, Rxx, Ryy, Sxx, Syy)
        X, Y = np.meshgrid(map_like.xs[p:-p], map_like.ys[p:-p])
    else:
        X, Y = grid.mesh()
        use_analytic = derivs == "analytic" or (derivs == "auto" and hasattr(map_like, "eval_derivs"))
        if use_analytic:
            R, _ = map_like.eval(X, Y)
            d = map_like.eval_derivs(X, Y)
        else:
            eval_fn = map_like.eval if hasattr(map_like, "eval") else map_like
            R, d, _ = _fd_derivs_callable(eval_fn, X, Y, grid.fd_h, grid.fd_order)
    if not metric.contains(R):
        raise NumericalError("map image leaves the target r_domain on the grid")
    E1, E2 = _el_from_derivs(R, d, metric, sig)
    if not (np.isfinite(E1).all() and np.isfinite(E2).all()):
        raise NumericalError("non-finite residual on the grid")
    i1 = np.unravel_index(np.argmax(np.abs(E1)), E1.shape)
    i2 = np.unravel_index(np.argmax(np.abs(E2)), E2.shape)
    return (
        float(np.abs(E1).max()), float(np.abs(E2).max()),
        (float(X[i1]), float(Y[i1])), (float(X[i2]), float(Y[i2])),
    )


def el_residual(map_like, metric: TargetMetric, sig: SignaturePair,
                grid: GridSpec, derivs: str = "auto",
                richardson: bool = False) -> ResidualReport:
    """Sup-norm Euler-Lagrange residuals on the grid.

    ``map_like`` may be a ClosedFormMap (analytic derivatives), a
    MapSample (derivatives from its own lattice with one or two cells of
    padding), or any object with ``eval(x, y) -> (R, S)`` (centered
    stencils of width fd_h).  ``derivs`` forces "analytic" or "fd";
    ``richardson=True`` re-runs the fd path at fd_h/2 and reports the
    observed convergence order.
    """
    if derivs not in ("auto", "analytic", "fd"):
        raise ValidationError(f"derivs must be auto|analytic|fd, got {derivs!r}")
    s1, s2, w1, w2 = _el_once(map_like, metric, sig, grid, derivs)
    order = None
    if richardson and not isinstance(map_like, MapSample):
        half = GridSpec(grid.x_range, grid.y_range, grid.nx, grid.ny, grid.fd_h / 2.0, grid.fd_order)
        h1, h2, _, _ = _el_once(map_like, metric, sig, half, derivs)
        order = math.log2(max(s1, s2) / max(h1, h2)) if max(h1, h2) > 0 else math.inf
    return ResidualReport(sup_E1=s1, sup_E2=s2, worst_E1=w1, worst_E2=w2, observed_order=order)


def first_integral_residual(metric: TargetMetric, params: ReductionParams,
                            sol: ODESolution) -> ResidualReport:
    """Sup-norm residuals of the two first integrals along a solution."""
    a, b = params.a, params.b
    e2, d2 = params.sig.eps2, params.sig.del2
    R = sol.Rs
    A = metric.A.value_at(R)
    B = metric.B.value_at(R)
    Hp = np.asarray(h_prime(metric, params, R), dtype=float)
    K = A * sol.Rps**2 - d2 * B * Hp**2
    q = b * b + e2 * a * a
    G1 = (a * a + e2 * b * b) * K - 4.0 * e2 * params.kappa \
        - d2 * B * (q + 2.0 * (1.0 - e2) * a * b * Hp)
    G2 = a * b * K + 2.0 * params.lambda_ - d2 * B * ((b * b - a * a) * Hp - a * b)
    i1 = int(np.argmax(np.abs(G1)))
    i2 = int(np.argmax(np.abs(G2)))
    return ResidualReport(
        sup_G1=float(np.abs(G1).max()), sup_G2=float(np.abs(G2).max()),
        worst_G1_t=float(sol.ts[i1]), worst_G2_t=float(sol.ts[i2]),
        K_samples=K,
    )


def energy_density(map_like, metric: TargetMetric, dom: DomainMetric,
                   at: tuple[float, float], fd_h: float = 1e-5) -> float:
    """e(u) = exp(-f)/4 * [A(R)(R_x^2 - eps2 R_y^2) - del2 B(R)(S_x^2 - eps2 S_y^2)].

    This is the complex-coordinate density written in real form; it is
    half the g-trace convention (the flat identity map gives 1/2), which
    leaves harmonicity untouched.
    """
    x, y = float(at[0]), float(at[1])
    X = np.asarray(x)
    Y = np.asarray(y)
    if hasattr(map_like, "eval_derivs"):
        R, _ = map_like.eval(X, Y)
        d = map_like.eval_derivs(X, Y)
    else:
        eval_fn = map_like.eval if hasattr(map_like, "eval") else map_like
        R, d, _ = _fd_derivs_callable(eval_fn, X, Y, fd_h, 2)
    e2, d2 = dom.eps2, metric.del2
    A = metric.A.value_at(R)
    B = metric.B.value_at(R)
    f = dom.conformal_factor(x, y)
    e = 0.25 * math.exp(-float(f)) * (
        A * (d.Rx**2 - e2 * d.Ry**2) - d2 * B * (d.Sx**2 - e2 * d.Sy**2)
    )
    return float(e)


# --------------------------------------------------------------------------
# wave-map evolution (eps2 = +1; y is time)

@dataclass(frozen=True)
class WaveEvolveConfig:
    dx: float
    T: float
    cfl: float = 0.5
    bc: str = "dirichlet_exact"
    n_corr: int = 2  # fixed-point sweeps resolving the centered y-derivative
    coupling_cap: Optional[float] = 0.5  # |B'/B| clipped at coupling_cap/dx; None = raw

    def __post_init__(self):
        if not self.dx > 0:
            raise ValidationError(f"dx must be > 0, got {self.dx}")
        if not self.T > 0:
            raise ValidationError(f"T must be > 0, got {self.T}")
        if not self.cfl > 0:
            raise ValidationError(f"cfl must be > 0, got {self.cfl}")
        if self.bc != "dirichlet_exact":
            raise ValidationError(f"unknown boundary condition {self.bc!r}")
        if self.n_corr < 1:
            raise ValidationError("n_corr must be >= 1")


@dataclass(frozen=True)
class WaveResult:
    xs: np.ndarray
    y_final: float
    R: np.ndarray
    S: np.ndarray
    deviation: float  # discrete L2 distance from the reference at y_final
    steps: int
    dx: float
    dy: float


def wave_evolve(metric: TargetMetric, init, cfg: WaveEvolveConfig,
                x_interval: tuple[float, float]) -> WaveResult:
    """Leapfrog evolution of the wave-map system

        R_yy = R_xx + (A'/2A)(R_x^2 - R_y^2) + (del2 B'/2A)(S_x^2 - S_y^2)
        S_yy = S_xx + (B'/B)(R_x S_x - R_y S_y)

    from `init` values and y-derivatives at y = 0, Dirichlet boundary
    values taken from `init` (second order in both dx and dy).  Returns
    the final fields and their deviation from `init` at the final time.
    """
    if getattr(init, "eps2", +1) != +1:
        raise ValidationError("wave evolution requires a Lorentzian domain (eps2 = +1)")
    if cfg.cfl > 1.0:
        raise NumericalError(f"CFL violation: cfl = {cfg.cfl} > 1")
    x0, x1 = float(x_interval[0]), float(x_interval[1])
    if not x1 > x0:
        raise ValidationError(f"empty x interval {x_interval}")
    ncell = max(2, round((x1 - x0) / cfg.dx))
    xs = np.linspace(x0, x1, ncell + 1)
    dx = float(xs[1] - xs[0])
    dy = cfg.cfl * dx
    nsteps = max(1, round(cfg.T / dy))
    cap = math.inf if cfg.coupling_cap is None else cfg.coupling_cap / dx

    R0, S0 = init.eval(xs, np.zeros_like(xs))
    d = init.eval_derivs(xs, np.zeros_like(xs))
    Ry0 = np.asarray(d.Ry, dtype=float)
    Sy0 = np.asarray(d.Sy, dtype=float)
    R0 = np.asarray(R0, dtype=float).copy()
    S0 = np.asarray(S0, dtype=float).copy()

    ysteps = dy * np.arange(nsteps + 1)
    bl_R, bl_S = init.eval(np.full(nsteps + 1, xs[0]), ysteps)
    br_R, br_S = init.eval(np.full(nsteps + 1, xs[-1]), ysteps)
    bc = np.column_stack([bl_R, br_R, bl_S, br_S]).astype(float)

    # first step by Taylor expansion, using the exact initial y-derivatives
    fR, fS = pyloop.wave_rhs(metric, metric.del2, R0, S0, Ry0, Sy0, dx, cap)
    if not (np.isfinite(fR).all() and np.isfinite(fS).all()):
        raise NumericalError("non-finite right-hand side on the initial slice "
                             "(B -> 0 blow-up of the S equation?)")
    R1, S1 = R0.copy(), S0.copy()
    R1[1:-1] += dy * Ry0[1:-1] + 0.5 * dy * dy * fR
    S1[1:-1] += dy * Sy0[1:-1] + 0.5 * dy * dy * fS
    R1[0], R1[-1], S1[0], S1[-1] = bc[1, 0], bc[1, 1], bc[1, 2], bc[1, 3]

    R, S, status, bad = kernels.wave_march(
        metric, metric.del2, R0, S0, R1, S1, bc, dx, dy, nsteps, cap, cfg.n_corr,
    )
    if status == kernels.STATUS_NAN:
        raise NumericalError(
            f"non-finite fields at step {bad} (y = {bad * dy:.6g}): "
            "S equation blow-up (B -> 0) or instability"
        )
    y_final = nsteps * dy
    Rref, Sref = init.eval(xs, np.full_like(xs, y_final))
    deviation = math.sqrt(dx * float(np.sum((R - Rref) ** 2 + (S - Sref) ** 2)))
    return WaveResult(xs=xs, y_final=y_final, R=R, S=S,
                      deviation=deviation, steps=nsteps, dx=dx, dy=dy)
