"""Kernel backend selection.

Prefers the compiled Cython core and falls back to the pure-NumPy twin when
the extension is missing or ``LPPROJ_PURE_PYTHON=1`` is set.  Both expose the
same surface: lp_norm, pairing, duality, lyapunov_value, psi_value,
metric_power, metric_grad, pgd_minimize.
"""

import os

if os.environ.get("LPPROJ_PURE_PYTHON") == "1":
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels

IS_COMPILED = bool(kernels.IS_COMPILED)
BACKEND_NAME = "compiled" if IS_COMPILED else "pure-python"

lp_norm = kernels.lp_norm
pairing = kernels.pairing
duality = kernels.duality
lyapunov_value = kernels.lyapunov_value
psi_value = kernels.psi_value
metric_power = kernels.metric_power
metric_grad = kernels.metric_grad
pgd_minimize = kernels.pgd_minimize
