"""Compiled and pure-Python kernels agree and are both selectable."""

import math
import subprocess
import sys

import numpy as np
import pytest

from lpproj import _kernels_py

try:
    from lpproj import _kernels

    HAVE_COMPILED = True
except ImportError:
    _kernels = None
    HAVE_COMPILED = False

BACKENDS = [_kernels_py] + ([_kernels] if HAVE_COMPILED else [])


@pytest.fixture
def cases(rng):
    out = []
    for p in (1.5, 2.0, 2.5, 3.0, 4.0):
        for n in (1, 3, 6):
            out.append((rng.normal(0, 2, n), rng.normal(0, 2, n), p))
    return out


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_kernel_values(backend, cases):
    for x, y, p in cases:
        ref_norm = float((np.abs(x) ** p).sum() ** (1 / p))
        assert backend.lp_norm(x, p) == pytest.approx(ref_norm, rel=1e-14)
        assert backend.pairing(x, y) == pytest.approx(float(x @ y), rel=1e-13, abs=1e-13)
        assert backend.metric_power(x, y, p) == pytest.approx(
            float((np.abs(x - y) ** p).sum()), rel=1e-13
        )


def test_backend_flags():
    assert _kernels_py.IS_COMPILED is False
    if HAVE_COMPILED:
        assert _kernels.IS_COMPILED is True


@pytest.mark.skipif(not HAVE_COMPILED, reason="extension not built")
def test_backends_agree(cases):
    for x, y, p in cases:
        assert _kernels.lp_norm(x, p) == pytest.approx(
            _kernels_py.lp_norm(x, p), rel=1e-14
        )
        np.testing.assert_allclose(
            _kernels.duality(x, p), _kernels_py.duality(x, p), rtol=1e-13, atol=1e-15
        )
        assert _kernels.psi_value(x, y, p) == pytest.approx(
            _kernels_py.psi_value(x, y, p), rel=1e-12, abs=1e-13
        )
        assert _kernels.lyapunov_value(x, y, p) == pytest.approx(
            _kernels_py.lyapunov_value(x, y, p), rel=1e-12, abs=1e-12
        )
        np.testing.assert_allclose(
            _kernels.metric_grad(x, y, p),
            _kernels_py.metric_grad(x, y, p),
            rtol=1e-13,
            atol=1e-14,
        )


@pytest.mark.skipif(not HAVE_COMPILED, reason="extension not built")
def test_pgd_agrees_between_backends(rng):
    for p in (2.0, 3.0, 1.5):
        n = 4
        x = rng.normal(0, 2, n)
        mask = np.array([True, True, False, False])
        for objective in (0, 1):
            args = (x, p, mask, 1.0, True, objective, np.zeros(n), 800, 1.0, 1e-10)
            yc, ic, sc = _kernels.pgd_minimize(*args)
            yp, ip, sp = _kernels_py.pgd_minimize(*args)
            np.testing.assert_allclose(yc, yp, rtol=0, atol=1e-9)
            assert (ic, sc) == (ip, sp)


def test_pure_python_env_selection():
    code = (
        "import lpproj.backend as b; print(b.BACKEND_NAME)"
    )
    out = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True,
        text=True,
        env={"LPPROJ_PURE_PYTHON": "1", "PATH": "/usr/bin:/bin"},
        cwd="/",
    )
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip() == "pure-python"


def test_duality_handles_readonly_arrays():
    x = np.array([1.0, -2.0])
    x.setflags(write=False)
    for backend in BACKENDS:
        out = backend.duality(x, 3.0)
        assert np.isfinite(out).all()
