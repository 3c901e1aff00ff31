"""Brute-force minimizers, finite differences, and VI certificates."""

import numpy as np
import pytest

import lpproj as lp
from lpproj import ConvexSetSpec
from lpproj.errors import (
    InfeasibleCandidate,
    InvalidInput,
    UnstableDerivative,
    ZeroDirection,
)
from lpproj.oracles import (
    OracleConfig,
    brute_gpi,
    brute_mpi,
    fd_derivative,
    vi_certificate,
)

from conftest import assert_close

M0 = lp.IndexMask.of([0])
CFG = OracleConfig(rng_seed=17)


def test_config_validation():
    with pytest.raises(InvalidInput):
        OracleConfig(tol_opt=0.0)
    with pytest.raises(InvalidInput):
        OracleConfig(fd_t_sequence=(1e-3, 1e-2))
    with pytest.raises(InvalidInput):
        OracleConfig(fd_t_sequence=(1e-3,))


def test_brute_feasible_returns_exactly():
    x = lp.LpVector.of([0.2, -0.1, 0.0], 3)
    spec = ConvexSetSpec.full_ball(1.0)
    assert brute_gpi(x, spec, CFG) is x
    assert brute_mpi(x, spec, CFG) is x


def test_brute_gpi_examples():
    out = brute_gpi(lp.LpVector.of([3, 4], 2), ConvexSetSpec.full_ball(1.0), CFG)
    assert_close(out.coords, [0.6, 0.8], tol=1e-6)
    out = brute_gpi(
        lp.LpVector.of([1.2, 10], 3), ConvexSetSpec.masked_ball(M0, 1.0), CFG
    )
    assert_close(out.coords, [0.14391715142325145, 0.0], tol=1e-6)


def test_brute_mpi_examples():
    out = brute_mpi(lp.LpVector.of([2, 3], 3), ConvexSetSpec.masked_ball(M0, 1.0), CFG)
    assert_close(out.coords, [1.0, 0.0], tol=1e-6)
    out = brute_mpi(lp.LpVector.of([2, 3], 3), ConvexSetSpec.cylinder(M0, 1.0), CFG)
    assert_close(out.coords, [1.0, 3.0], tol=1e-6)


def test_brute_dimension_cap():
    x = lp.LpVector.of(np.ones(9), 2)
    with pytest.raises(InvalidInput):
        brute_gpi(x, ConvexSetSpec.full_ball(1.0), CFG)


def test_brute_determinism():
    x = lp.LpVector.of([1.7, -2.3, 0.4], 2.5)
    spec = ConvexSetSpec.masked_ball(lp.IndexMask.of([0, 2]), 1.0)
    a = brute_gpi(x, spec, CFG).coords
    b = brute_gpi(x, spec, CFG).coords
    assert (a == b).all()


# --------------------------------------------------------------------------
# finite differences


def test_fd_constant_projector():
    fixed = lp.LpVector.of([0.5, 0.5], 2)
    d = fd_derivative(lambda z: fixed, lp.LpVector.of([1, 2], 2), lp.LpVector.of([1, 0], 2), CFG)
    assert_close(d.vector.coords, [0.0, 0.0], tol=1e-12)
    assert d.method == "finite_difference"
    assert d.fd_error_estimate <= 1e-12


def test_fd_identity_projector():
    v = lp.LpVector.of([0.3, -1], 2)
    d = fd_derivative(lambda z: z, lp.LpVector.of([1, 2], 2), v, CFG)
    # roundoff in x + t*v limits one-sided quotients to ~1e-9 accuracy
    assert_close(d.vector.coords, v.coords, tol=1e-8)


def test_fd_ball_example():
    d = fd_derivative(
        lambda z: lp.gpi_ball(z, 1.0).point,
        lp.LpVector.of([3, 4], 2),
        lp.LpVector.of([1, 0], 2),
        CFG,
    )
    assert_close(d.vector.coords, [0.128, -0.096], tol=1e-6)
    assert d.fd_error_estimate is not None


def test_fd_unstable_detection():
    def kinked(z):
        return z.with_coords([abs(z.coords[0]) ** 0.5, 0.0])

    with pytest.raises(UnstableDerivative):
        fd_derivative(kinked, lp.LpVector.of([0, 1], 2), lp.LpVector.of([1, 0], 2), CFG)


def test_fd_zero_direction():
    with pytest.raises(ZeroDirection):
        fd_derivative(lambda z: z, lp.LpVector.of([1], 2), lp.LpVector.of([0], 2), CFG)


# --------------------------------------------------------------------------
# VI certificates


def test_certificate_true_projection_passes():
    x = lp.LpVector.of([3, 4], 2)
    y = lp.LpVector.of([0.6, 0.8], 2)
    spec = ConvexSetSpec.full_ball(1.0)
    for flavor in ("generalized", "metric"):
        rep = vi_certificate(x, y, spec, flavor, CFG)
        assert rep.passed
        assert rep.min_margin >= -1e-9
        assert rep.samples == CFG.vi_samples


def test_certificate_counterexample():
    # hand check: at z = (0.6, 0.8) the metric pairing is exactly -2.4
    x = lp.LpVector.of([3, 4], 2)
    bad = lp.LpVector.of([1, 0], 2)
    w = lp.duality_map(x.with_coords(x.coords - bad.coords))
    z = np.array([0.6, 0.8])
    assert float(w.coords @ (bad.coords - z)) == pytest.approx(-2.4, abs=1e-12)
    rep = vi_certificate(x, bad, ConvexSetSpec.full_ball(1.0), "metric", CFG)
    assert not rep.passed
    assert rep.min_margin <= -2.0


def test_certificate_rejects_infeasible_candidate():
    x = lp.LpVector.of([3, 4], 2)
    with pytest.raises(InfeasibleCandidate):
        vi_certificate(x, x, ConvexSetSpec.full_ball(1.0), "generalized", CFG)


def test_certificate_cylinder_and_subspace():
    x = lp.LpVector.of([1.2, 2], 3)
    y = lp.gpi_cylinder_l3(x, M0).point
    rep = vi_certificate(x, y, ConvexSetSpec.cylinder(M0, 1.0), "generalized", CFG)
    assert rep.passed
    x2 = lp.LpVector.of([1, 2], 3)
    y2 = lp.gpi_subspace(x2, M0).point
    rep = vi_certificate(x2, y2, ConvexSetSpec.subspace(M0), "generalized", CFG)
    assert rep.passed


def test_certificate_determinism():
    x = lp.LpVector.of([3, 4], 2)
    y = lp.LpVector.of([0.6, 0.8], 2)
    spec = ConvexSetSpec.full_ball(1.0)
    a = vi_certificate(x, y, spec, "generalized", CFG)
    b = vi_certificate(x, y, spec, "generalized", CFG)
    assert a.min_margin == b.min_margin
    assert (a.worst_z.coords == b.worst_z.coords).all()
