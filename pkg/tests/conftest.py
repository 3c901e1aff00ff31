import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240809)


def assert_close(actual, expected, tol=1e-12):
    actual = np.atleast_1d(np.asarray(actual, dtype=float))
    expected = np.atleast_1d(np.asarray(expected, dtype=float))
    assert actual.shape == expected.shape
    err = float(np.max(np.abs(actual - expected)))
    assert err <= tol, f"max coordinate error {err:.3e} > {tol:.1e}\n{actual}\nvs\n{expected}"
