"""Benchmark: compiled kernel core vs pure-NumPy fallback.

Run as ``python benchmarks/bench_kernels.py``.  Times the elementwise
kernels and the projected-gradient inner loop that dominates the brute-force
oracles, then a full oracle call through each backend.
"""

import time

import numpy as np

from lpproj import _kernels_py

try:
    from lpproj import _kernels
except ImportError:
    _kernels = None


def timeit(fn, reps):
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps


def bench_kernels():
    rng = np.random.default_rng(0)
    x = rng.normal(0, 2, 6)
    y = rng.normal(0, 2, 6)
    mask = np.array([True, True, True, False, False, False])
    p = 3.0

    cases = [
        ("lp_norm", lambda m: (lambda: m.lp_norm(x, p)), 20000),
        ("duality", lambda m: (lambda: m.duality(x, p)), 20000),
        ("psi_value", lambda m: (lambda: m.psi_value(x, y, p)), 20000),
        ("lyapunov_value", lambda m: (lambda: m.lyapunov_value(x, y, p)), 20000),
        ("metric_grad", lambda m: (lambda: m.metric_grad(x, y, p)), 20000),
        (
            "pgd_minimize",
            lambda m: (
                lambda: m.pgd_minimize(
                    x, p, mask, 1.0, True, 0, np.zeros(6), 800, 1.0, 1e-10
                )
            ),
            200,
        ),
    ]

    backends = [("pure-python", _kernels_py)]
    if _kernels is not None:
        backends.append(("compiled", _kernels))

    header = f"{'kernel':16s}" + "".join(f"{name:>14s}" for name, _ in backends)
    if _kernels is not None:
        header += f"{'speedup':>10s}"
    print(header)
    print("-" * len(header))
    for name, make, reps in cases:
        times = [timeit(make(mod), reps) for _, mod in backends]
        row = f"{name:16s}" + "".join(f"{t * 1e6:11.2f} us" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:9.1f}x"
        print(row)


def bench_oracle():
    import os
    import subprocess
    import sys

    sys.stdout.flush()
    code = r"""
import time
import numpy as np
import lpproj as lp
from lpproj import ConvexSetSpec
cfg = lp.OracleConfig(rng_seed=1)
rng = np.random.default_rng(7)
xs = [lp.LpVector.of(rng.normal(0, 2, 5), 3) for _ in range(40)]
spec = ConvexSetSpec.masked_ball(lp.IndexMask.of([0, 1, 2]), 1.0)
t0 = time.perf_counter()
for x in xs:
    lp.brute_gpi(x, spec, cfg)
dt = (time.perf_counter() - t0) / len(xs)
print(f"{lp.BACKEND_NAME}: brute_gpi {dt * 1e3:.2f} ms/call")
"""
    print()
    for env_val in ("0", "1"):
        env = dict(os.environ, LPPROJ_PURE_PYTHON=env_val)
        subprocess.run([sys.executable, "-c", code], env=env, check=True)


if __name__ == "__main__":
    bench_kernels()
    bench_oracle()
