"""Command-line surface.

Subcommands: ``metrics list``, ``metrics curvature``, ``solve``,
``closedform``, ``verify``, ``evolve``.  Every leaf command accepts
``--config FILE`` (line-oriented ``key = value``, ``#`` comments); flags
override file values, remaining gaps are filled by documented defaults,
and unknown config keys are rejected.  Exit status: 0 on success, 2 on
validation errors, 3 on numerical failures (drift budget, CFL, domain
exit, blow-up).

Output is bit-stable: shortest round-trip decimals, deterministic row
order, no timestamps.  JSON output echoes the full resolved config under
"meta" so runs are self-describing.
"""

from __future__ import annotations

import functools
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import export, kernels
from .closedforms import ellipsoid_map, embed, hyperboloid_map, mixed_map
from .errors import NumericalError, ValidationError
from .integrate import IntegratorConfig, MapSample, ODESolution, assemble_map, integrate_R, quadrature_H
from .metrics import (
    CATALOG_DISPLAY_PARAMS,
    CATALOG_NAMES,
    CATALOG_SAMPLE_WINDOWS,
    SignaturePair,
    catalog_lookup,
    curvature_classify,
    gauss_curvature,
)
from .reduction import ReductionParams, recover_first_integrals
from .verify import GridSpec, WaveEvolveConfig, el_residual, first_integral_residual, wave_evolve

_MISSING = object()


def parse_config_text(text: str) -> dict[str, str]:
    """Parse line-oriented ``key = value`` config text ('#' comments)."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


class Resolver:
    """Merge flag values over config-file values over defaults."""

    def __init__(self, config_path: str | None):
        self.config = parse_config_text(Path(config_path).read_text(encoding="utf-8")) if config_path else {}
        self.seen: set[str] = set()
        self.resolved: dict = {}

    def get(self, key: str, flag_value, typ=float, default=_MISSING):
        self.seen.add(key)
        value = flag_value
        if value is None and key in self.config:
            raw = self.config[key]
            try:
                if typ is bool:
                    value = raw.lower() in ("1", "true", "yes", "on")
                else:
                    value = typ(raw)
            except ValueError:
                raise ValidationError(f"config key {key!r}: cannot parse {raw!r} as {typ.__name__}")
        if value is None:
            if default is _MISSING:
                raise ValidationError(f"missing required option --{key.replace('_', '-')} (or config key {key!r})")
            value = default
        self.resolved[key] = value
        return value

    def finish(self):
        unknown = sorted(set(self.config) - self.seen)
        if unknown:
            raise ValidationError(f"unknown config key(s): {', '.join(unknown)}")


def _parse_param_items(items) -> dict[str, float]:
    params: dict[str, float] = {}
    for item in items:
        for piece in str(item).split(","):
            piece = piece.strip()
            if not piece:
                continue
            if "=" not in piece:
                raise ValidationError(f"--param expects name=value, got {piece!r}")
            k, v = piece.split("=", 1)
            try:
                params[k.strip()] = float(v)
            except ValueError:
                raise ValidationError(f"--param {k.strip()}: cannot parse {v!r} as a number")
    return params


def _metric_params(res: Resolver, param_flags, c_flag) -> dict[str, float]:
    params = _parse_param_items(param_flags)
    extra = res.get("param", ",".join(param_flags) if param_flags else None, str, "")
    if not param_flags and extra:
        params = _parse_param_items([extra])
    c = res.get("c", c_flag, float, None)
    if c is not None:
        params.setdefault("c", c)
    res.resolved["param"] = dict(sorted(params.items()))
    return params


def cli_errors(f):
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except ValidationError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(2)
        except NumericalError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(3)

    return wrapper


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


def _fmt_opt(f):
    f = click.option("--out", default=None, help="output path (default: stdout)")(f)
    f = click.option("--format", "fmt", default=None, type=click.Choice(["csv", "json"]))(f)
    f = click.option("--config", "config_path", default=None,
                     type=click.Path(exists=True, dir_okay=False), help="key = value config file")(f)
    return f


@click.group()
def main():
    """Explicit harmonic and wave maps into warped-product surfaces."""


@main.group()
def metrics():
    """Catalog inspection: listing and curvature tables."""


@metrics.command("list")
@cli_errors
def metrics_list():
    """Print the catalog with signature and curvature class."""
    for name in CATALOG_NAMES:
        if name == "custom":
            click.echo(f"{name:22s} del2=?   (programmatic profiles)")
            continue
        params = CATALOG_DISPLAY_PARAMS[name]
        m = catalog_lookup(name, params)
        lo, hi = CATALOG_SAMPLE_WINDOWS[name]
        cls = curvature_classify(m, np.linspace(lo, hi, 12))
        if cls.constant:
            shown = 0.0 if abs(cls.value) < 1e-12 else cls.value
            kind = f"constant K={export.fmt_number(shown)}"
        else:
            kind = "variable"
        ptxt = ",".join(f"{k}={export.fmt_number(v)}" for k, v in params.items()) or "-"
        click.echo(f"{name:22s} del2={m.del2:+d}  params: {ptxt:24s} curvature: {kind}")


@metrics.command("curvature")
@click.option("--name", default=None)
@click.option("--param", "param_flags", multiple=True)
@click.option("--c", "c_flag", type=float, default=None)
@click.option("--r-min", "r_min", type=float, default=None)
@click.option("--r-max", "r_max", type=float, default=None)
@click.option("--samples", type=int, default=None)
@_fmt_opt
@cli_errors
def metrics_curvature(name, param_flags, c_flag, r_min, r_max, samples, out, fmt, config_path):
    """Emit a K(R) table for a catalog metric."""
    res = Resolver(config_path)
    name = res.get("name", name, str)
    params = _metric_params(res, param_flags, c_flag)
    r_min = res.get("r_min", r_min, float)
    r_max = res.get("r_max", r_max, float)
    samples = res.get("samples", samples, int, 16)
    fmt = res.get("format", fmt, str, "csv")
    out = res.get("out", out, str, None)
    res.finish()
    m = catalog_lookup(name, params)
    Rs = np.linspace(r_min, r_max, samples)
    rows = [(R, gauss_curvature(m, R)) for R in Rs]
    meta = {"subcommand": "metrics curvature", **res.resolved}
    _emit(export.render(("R", "K"), rows, fmt, meta), out)


@main.command()
@click.option("--metric", default=None)
@click.option("--param", "param_flags", multiple=True)
@click.option("--c", "c_flag", type=float, default=None)
@click.option("--eps2", type=int, default=None)
@click.option("--del2", "del2_flag", type=int, default=None)
@click.option("--a", "a_", type=float, default=None)
@click.option("--b", "b_", type=float, default=None)
@click.option("--kappa", type=float, default=None)
@click.option("--lambda", "lambda_", type=float, default=None)
@click.option("--r0", type=float, default=None)
@click.option("--sign", type=int, default=None)
@click.option("--t0", type=float, default=None)
@click.option("--t1", type=float, default=None)
@click.option("--dt", type=float, default=None)
@click.option("--method", default=None, type=click.Choice(["rk4_second_order", "velocity_verlet"]))
@click.option("--invariant-tol", "invariant_tol", type=float, default=None)
@click.option("--max-steps", "max_steps", type=int, default=None)
@click.option("--map-out", "map_out", default=None, help="also assemble the map on a grid")
@click.option("--x-min", type=float, default=None)
@click.option("--x-max", type=float, default=None)
@click.option("--nx", type=int, default=None)
@click.option("--y-min", type=float, default=None)
@click.option("--y-max", type=float, default=None)
@click.option("--ny", type=int, default=None)
@_fmt_opt
@cli_errors
def solve(metric, param_flags, c_flag, eps2, del2_flag, a_, b_, kappa, lambda_, r0, sign,
          t0, t1, dt, method, invariant_tol, max_steps, map_out,
          x_min, x_max, nx, y_min, y_max, ny, out, fmt, config_path):
    """Run the reduction pipeline: march R(t), integrate H, export."""
    res = Resolver(config_path)
    metric_name = res.get("metric", metric, str)
    params = _metric_params(res, param_flags, c_flag)
    eps2 = res.get("eps2", eps2, int)
    del2_given = res.get("del2", del2_flag, int, None)
    a_ = res.get("a", a_, float)
    b_ = res.get("b", b_, float)
    kappa = res.get("kappa", kappa, float)
    lambda_ = res.get("lambda", lambda_, float)
    r0 = res.get("r0", r0, float)
    sign = res.get("sign", sign, int)
    t0 = res.get("t0", t0, float, 0.0)
    t1 = res.get("t1", t1, float)
    dt = res.get("dt", dt, float, 1e-3)
    method = res.get("method", method, str, "rk4_second_order")
    invariant_tol = res.get("invariant_tol", invariant_tol, float, 1e-8)
    max_steps = res.get("max_steps", max_steps, int, 20_000_000)
    fmt = res.get("format", fmt, str, "csv")
    out = res.get("out", out, str, None)
    map_out = res.get("map_out", map_out, str, None)
    grid_vals = {k: res.get(k, v, float if k[0] in "xy" else int, None)
                 for k, v in [("x_min", x_min), ("x_max", x_max), ("nx", nx),
                              ("y_min", y_min), ("y_max", y_max), ("ny", ny)]}
    res.finish()

    m = catalog_lookup(metric_name, params)
    if del2_given is not None and del2_given != m.del2:
        raise ValidationError(
            f"--del2 {del2_given} contradicts the catalog: {metric_name} has del2 = {m.del2}"
        )
    if sign not in (-1, 1):
        raise ValidationError(f"--sign must be -1 or +1, got {sign}")
    rp = ReductionParams(a_, b_, kappa, lambda_, SignaturePair(eps2, m.del2))
    cfg = IntegratorConfig(dt=dt, method=method, invariant_tol=invariant_tol, max_steps=max_steps)
    sol = quadrature_H(m, rp, integrate_R(m, rp, r0, sign, (t0, t1), cfg))

    meta = {"subcommand": "solve", **res.resolved,
            "backend": kernels.active_backend(m.kernel_spec),
            "turning_events": list(sol.turning_events)}
    _emit(export.render(export.SOLUTION_HEADER, export.solution_rows(sol), fmt, meta), out)

    if map_out:
        missing = [k for k, v in grid_vals.items() if v is None]
        if missing:
            raise ValidationError(f"--map-out needs grid options: {', '.join(missing)}")
        xs = np.linspace(grid_vals["x_min"], grid_vals["x_max"], int(grid_vals["nx"]))
        ys = np.linspace(grid_vals["y_min"], grid_vals["y_max"], int(grid_vals["ny"]))
        ms = assemble_map(sol, rp, xs, ys)
        _emit(export.render(export.MAP_HEADER, export.map_rows(ms), fmt, meta), map_out)


def _build_family(res: Resolver, family, c_flag, theta, a_, b_, eps2):
    family = res.get("family", family, str)
    theta = res.get("theta", theta, float)
    if family == "ellipsoid":
        c = res.get("c", c_flag, float, math.sqrt(2.0))
        a_ = res.get("a", a_, float, 0.0)
        b_ = res.get("b", b_, float, 1.0)
        res.get("eps2", eps2, int, -1)
        return ellipsoid_map(c, theta, a_, b_)
    if family == "hyperboloid":
        c = res.get("c", c_flag, float, math.sqrt(2.0))
        a_ = res.get("a", a_, float, 0.0)
        b_ = res.get("b", b_, float, 1.0)
        res.get("eps2", eps2, int, +1)
        return hyperboloid_map(c, theta, a_, b_)
    if family == "mixed":
        e2 = res.get("eps2", eps2, int)
        res.get("c", c_flag, float, None)
        res.get("a", a_, float, None)
        res.get("b", b_, float, None)
        return mixed_map(theta, e2)
    raise ValidationError(f"unknown family {family!r}; known: ellipsoid, hyperboloid, mixed")


@main.command()
@click.option("--family", default=None)
@click.option("--c", "c_flag", type=float, default=None)
@click.option("--theta", type=float, default=None)
@click.option("--a", "a_", type=float, default=None)
@click.option("--b", "b_", type=float, default=None)
@click.option("--eps2", type=int, default=None)
@click.option("--x-min", type=float, default=None)
@click.option("--x-max", type=float, default=None)
@click.option("--nx", type=int, default=None)
@click.option("--y-min", type=float, default=None)
@click.option("--y-max", type=float, default=None)
@click.option("--ny", type=int, default=None)
@click.option("--embed", "do_embed", is_flag=True, default=False,
              help="export ambient coordinates instead of chart values")
@click.option("--recover", "do_recover", is_flag=True, default=False,
              help="print the first-integral constants recovered from the map")
@_fmt_opt
@cli_errors
def closedform(family, c_flag, theta, a_, b_, eps2, x_min, x_max, nx, y_min, y_max, ny,
               do_embed, do_recover, out, fmt, config_path):
    """Evaluate a closed-form solution family on a grid."""
    res = Resolver(config_path)
    cf = _build_family(res, family, c_flag, theta, a_, b_, eps2)
    x_min = res.get("x_min", x_min, float, -1.0)
    x_max = res.get("x_max", x_max, float, 1.0)
    nx = res.get("nx", nx, int, 50)
    y_min = res.get("y_min", y_min, float, -1.0)
    y_max = res.get("y_max", y_max, float, 1.0)
    ny = res.get("ny", ny, int, 50)
    fmt = res.get("format", fmt, str, "csv")
    out = res.get("out", out, str, None)
    res.finish()

    xs = np.linspace(x_min, x_max, nx)
    ys = np.linspace(y_min, y_max, ny)
    X, Y = np.meshgrid(xs, ys)
    R, S = cf.eval(X, Y)
    meta = {"subcommand": "closedform", **res.resolved}

    if do_recover:
        t_mid = cf.a * 0.5 * (y_min + y_max) - cf.b * 0.5 * (x_min + x_max)
        Rt, Rpt, Hpt = cf.frame_data(t_mid)
        k, l = recover_first_integrals(cf.target, SignaturePair(cf.eps2, cf.del2),
                                       cf.a, cf.b, float(Rt), float(Rpt), float(Hpt))
        meta["kappa"] = k
        meta["lambda"] = l
        click.echo(f"kappa = {export.fmt_number(k)}")
        click.echo(f"lambda = {export.fmt_number(l)}")

    if do_embed:
        if cf.family not in ("ellipsoid", "hyperboloid"):
            raise ValidationError(f"family {cf.family!r} has no ambient embedding")
        emb = embed(cf.family, cf.params["c"], R, S)
        rows = export.embedding_rows(xs, ys, emb.point)
        _emit(export.render(export.EMBED_HEADER, rows, fmt, meta), out)
    else:
        ms = MapSample(xs=xs, ys=ys, t=cf.a * Y - cf.b * X, R=np.asarray(R), S=np.asarray(S),
                       a=cf.a, b=cf.b)
        _emit(export.render(export.MAP_HEADER, export.map_rows(ms), fmt, meta), out)


@main.command()
@click.option("--input", "input_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--metric", default=None)
@click.option("--param", "param_flags", multiple=True)
@click.option("--c", "c_flag", type=float, default=None)
@click.option("--eps2", type=int, default=None)
@click.option("--a", "a_", type=float, default=None)
@click.option("--b", "b_", type=float, default=None)
@click.option("--kappa", type=float, default=None)
@click.option("--lambda", "lambda_", type=float, default=None)
@click.option("--fd-order", "fd_order", type=int, default=None)
@_fmt_opt
@cli_errors
def verify(input_path, metric, param_flags, c_flag, eps2, a_, b_, kappa, lambda_,
           fd_order, out, fmt, config_path):
    """Check an exported solution or map against the governing equations.

    Solution tables (t,R,Rprime,H,drift) get first-integral residuals;
    map tables (x,y,t,R,S) get finite-difference Euler-Lagrange residuals.
    """
    res = Resolver(config_path)
    input_path = res.get("input", input_path, str)
    metric_name = res.get("metric", metric, str)
    params = _metric_params(res, param_flags, c_flag)
    eps2 = res.get("eps2", eps2, int)
    fmt = res.get("format", fmt, str, "json")
    out = res.get("out", out, str, None)

    header, cols = export.read_table(input_path)
    m = catalog_lookup(metric_name, params)
    if tuple(header) == export.SOLUTION_HEADER:
        a_ = res.get("a", a_, float)
        b_ = res.get("b", b_, float)
        kappa = res.get("kappa", kappa, float)
        lambda_ = res.get("lambda", lambda_, float)
        res.get("fd_order", fd_order, int, 2)
        res.finish()
        rp = ReductionParams(a_, b_, kappa, lambda_, SignaturePair(eps2, m.del2))
        sol = ODESolution(ts=cols["t"], Rs=cols["R"], Rps=cols["Rprime"],
                          drift=cols["drift"], turning_events=(), Hs=cols["H"])
        rep = first_integral_residual(m, rp, sol)
    elif tuple(header) == export.MAP_HEADER:
        fd_order = res.get("fd_order", fd_order, int, 2)
        res.get("a", a_, float, None)
        res.get("b", b_, float, None)
        res.get("kappa", kappa, float, None)
        res.get("lambda", lambda_, float, None)
        res.finish()
        xs = np.unique(cols["x"])
        ys = np.unique(cols["y"])
        nxy = len(xs) * len(ys)
        if nxy != len(cols["x"]):
            raise ValidationError(f"{input_path}: not a rectangular grid")
        shape = (len(ys), len(xs))
        ms = MapSample(xs=xs, ys=ys, t=cols["t"].reshape(shape),
                       R=cols["R"].reshape(shape), S=cols["S"].reshape(shape),
                       a=math.nan, b=math.nan)
        grid = GridSpec((float(xs[0]), float(xs[-1])), (float(ys[0]), float(ys[-1])),
                        len(xs), len(ys), fd_h=float(xs[1] - xs[0]), fd_order=fd_order)
        rep = el_residual(ms, m, SignaturePair(eps2, m.del2), grid)
    else:
        raise ValidationError(
            f"{input_path}: unrecognized header {','.join(header)!r}; expected a "
            "solution table (t,R,Rprime,H,drift) or a map table (x,y,t,R,S)"
        )
    meta = {"subcommand": "verify", **res.resolved}
    fields = rep.scalar_fields()
    _emit(export.render(export.REPORT_HEADER, export.report_rows(fields), fmt, meta), out)


@main.command()
@click.option("--family", default=None)
@click.option("--c", "c_flag", type=float, default=None)
@click.option("--theta", type=float, default=None)
@click.option("--a", "a_", type=float, default=None)
@click.option("--b", "b_", type=float, default=None)
@click.option("--eps2", type=int, default=None)
@click.option("--x-min", type=float, default=None)
@click.option("--x-max", type=float, default=None)
@click.option("--dx", type=float, default=None)
@click.option("--cfl", type=float, default=None)
@click.option("--t-final", "--T", "t_final", type=float, default=None)
@click.option("--n-corr", "n_corr", type=int, default=None)
@click.option("--coupling-cap", "coupling_cap", type=float, default=None)
@_fmt_opt
@cli_errors
def evolve(family, c_flag, theta, a_, b_, eps2, x_min, x_max, dx, cfl, t_final,
           n_corr, coupling_cap, out, fmt, config_path):
    """Re-solve the wave-map system from closed-form initial data and report
    the deviation at the final time."""
    res = Resolver(config_path)
    cf = _build_family(res, family, c_flag, theta, a_, b_, eps2)
    x_min = res.get("x_min", x_min, float, -1.0)
    x_max = res.get("x_max", x_max, float, 1.0)
    dx = res.get("dx", dx, float)
    cfl = res.get("cfl", cfl, float, 0.5)
    t_final = res.get("T", t_final, float)
    n_corr = res.get("n_corr", n_corr, int, 2)
    coupling_cap = res.get("coupling_cap", coupling_cap, float, 0.5)
    fmt = res.get("format", fmt, str, "json")
    out = res.get("out", out, str, None)
    res.finish()

    cfg = WaveEvolveConfig(dx=dx, T=t_final, cfl=cfl, n_corr=n_corr, coupling_cap=coupling_cap)
    result = wave_evolve(cf.target, cf, cfg, (x_min, x_max))
    meta = {"subcommand": "evolve", **res.resolved,
            "backend": kernels.active_backend(cf.target.kernel_spec)}
    fields = {
        "deviation_l2": result.deviation,
        "steps": result.steps,
        "dx": result.dx,
        "dy": result.dy,
        "y_final": result.y_final,
    }
    _emit(export.render(export.REPORT_HEADER, export.report_rows(fields), fmt, meta), out)


if __name__ == "__main__":
    main()
