"""Benchmark the compiled theta kernel against the numpy fallback.

Times the raw batched summation at quadrature-grid sizes and one end-to-end
Gram matrix per backend.  Run as: python benchmarks/bench_theta_kernel.py
"""

import os
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import numpy as np

from cmtheta.kernels import reference

try:
    from cmtheta.kernels import _speed
except ImportError:
    _speed = None


def time_call(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_raw():
    rng = np.random.default_rng(0)
    print(f"{'points':>8} {'nmax':>5} {'numpy':>10} {'compiled':>10} {'speedup':>8}")
    for npts, nmax in ((4096, 8), (4096, 24), (16384, 8), (16384, 24), (65536, 12)):
        u = (rng.standard_normal(npts) + 1j * rng.standard_normal(npts)) * 0.5
        shift = np.pi * u.imag**2 / 2.0
        t_ref = time_call(lambda: reference.theta_sum(u, 2j, 0.25, 0.5, nmax, False, shift))
        if _speed is None:
            print(f"{npts:>8} {nmax:>5} {t_ref * 1e3:>9.2f}ms {'absent':>10}")
            continue
        t_fast = time_call(lambda: _speed.theta_sum(u, 2j, 0.25, 0.5, nmax, False, shift))
        print(f"{npts:>8} {nmax:>5} {t_ref * 1e3:>9.2f}ms {t_fast * 1e3:>8.2f}ms "
              f"{t_ref / t_fast:>7.2f}x")


def bench_gram():
    import importlib

    results = {}
    for disable in ("1", ""):
        os.environ["CMTHETA_DISABLE_EXT"] = disable
        for mod in [m for m in list(sys.modules) if m.startswith("cmtheta")]:
            del sys.modules[mod]
        import cmtheta.pairing as pairing
        import cmtheta.theta as theta
        from cmtheta import kernels
        from cmtheta.lattice import CurveTag, Lattice

        importlib.reload(kernels)
        bundle = theta.LineBundleData(Lattice.default(), 3, CurveTag.EPRIME)
        pairing.quadrature_grid.cache_clear()
        t = time_call(lambda: pairing.gram_matrix(bundle, n=64), repeats=3)
        results[kernels.backend_name()] = t
        print(f"gram matrix r=3, n=64, backend {kernels.backend_name():>8}: {t * 1e3:8.2f}ms")
    if len(results) == 2:
        print(f"end-to-end speedup: {results['python'] / results['compiled']:.2f}x")
    os.environ.pop("CMTHETA_DISABLE_EXT", None)


if __name__ == "__main__":
    print("raw theta summation")
    bench_raw()
    print("\nend to end")
    bench_gram()
