"""Benchmark the compiled kernels against the pure-Python fallback.

Run:  python benchmarks/bench_kernels.py

Times the two hot marches on representative workloads: the flagship
ellipsoid ODE march (scalar loop) and the mixed-family wave evolution
(vectorized in x on the fallback, typed loops in the extension).
"""

import math
import time

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

SQRT2 = math.sqrt(2.0)


def time_best(fn, repeats=5):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_ode():
    metric = catalog_lookup("ellipsoid", {"c": SQRT2})
    params = ReductionParams(0.0, 1.0, 0.125, -SQRT2 / 4.0, SignaturePair(-1, -1))
    cfg = IntegratorConfig(dt=1e-4)

    def run():
        integrate_R(metric, params, math.pi / 2, -1, (0.0, 4.7), cfg)

    return "ODE march (47k RK4 steps)", run


def bench_wave():
    cf = mixed_map(math.pi / 6, +1)
    cfg = WaveEvolveConfig(dx=1 / 400, T=1.0)

    def run():
        wave_evolve(cf.target, cf, cfg, (-1.0, 1.0))

    return "wave march (801 pts x 800 steps)", run


def main():
    cases = [bench_ode(), bench_wave()]
    backends = ["python"] + (["native"] if kernels.HAVE_NATIVE else [])
    print(f"{'case':36s}" + "".join(f"{b:>12s}" for b in backends) + f"{'speedup':>10s}")
    for label, run in cases:
        times = {}
        for b in backends:
            kernels.force_backend(b if b == "python" else None)
            times[b] = time_best(run)
        kernels.force_backend(None)
        row = f"{label:36s}" + "".join(f"{times[b] * 1e3:>10.1f}ms" for b in backends)
        if "native" in times:
            row += f"{times['python'] / times['native']:>9.1f}x"
        print(row)
    if not kernels.HAVE_NATIVE:
        print("(compiled extension not built; showing fallback only)")


if __name__ == "__main__":
    main()
