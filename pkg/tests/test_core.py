"""Vector arithmetic, duality mapping, splitting, Lyapunov functional, Psi."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import lpproj as lp
from lpproj.errors import InvalidInput, InvalidMask, ZeroVector

from conftest import assert_close

CBRT9 = 9.0 ** (1.0 / 3.0)  # 2.0800838230519041


# --------------------------------------------------------------------------
# construction and validation


def test_params_conjugate():
    params = lp.LpParams.from_p(3.0)
    assert params.q == pytest.approx(1.5, abs=1e-15)
    assert abs(1.0 / params.p + 1.0 / params.q - 1.0) <= 1e-14


@pytest.mark.parametrize("p", [1.0, 0.5, -2.0, float("inf"), float("nan")])
def test_params_rejects_bad_exponent(p):
    with pytest.raises(InvalidInput):
        lp.LpParams.from_p(p)


def test_params_rejects_non_conjugate():
    with pytest.raises(InvalidInput):
        lp.LpParams(3.0, 1.6)


def test_vector_rejects_nan_and_empty():
    with pytest.raises(InvalidInput):
        lp.LpVector.of([1.0, float("nan")], 2)
    with pytest.raises(InvalidInput):
        lp.LpVector.of([], 2)


def test_vector_coords_immutable():
    x = lp.LpVector.of([1.0, 2.0], 2)
    with pytest.raises(ValueError):
        x.coords[0] = 5.0


def test_mask_validation():
    with pytest.raises(InvalidMask):
        lp.IndexMask.of([])
    with pytest.raises(InvalidMask):
        lp.IndexMask.of([-1])
    mask = lp.IndexMask.of([0, 2])
    with pytest.raises(InvalidMask):
        mask.validate_for_dim(2)
    assert mask.bool_array(3).tolist() == [True, False, True]


# --------------------------------------------------------------------------
# norm


def test_norm_euclidean():
    assert lp.norm(lp.LpVector.of([3, 4], 2)) == pytest.approx(5.0, abs=1e-15)


def test_norm_zero():
    for p in (1.5, 2, 3, 4):
        assert lp.norm(lp.LpVector.of([0, 0, 0], p)) == 0.0


def test_norm_p3_against_bisection_oracle():
    # independent oracle: the norm is the unique t > 0 with sum |x_i/t|^p = 1
    x = np.array([1.0, 2.0])
    p = 3.0
    lo, hi = 1e-9, 1e9
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (np.abs(x / mid) ** p).sum() > 1.0:
            lo = mid
        else:
            hi = mid
    assert lp.norm(lp.LpVector.of(x, p)) == pytest.approx(0.5 * (lo + hi), abs=1e-9)
    assert lp.norm(lp.LpVector.of(x, p)) == pytest.approx(CBRT9, abs=1e-14)


# --------------------------------------------------------------------------
# duality mapping


def test_duality_identity_when_p2(rng):
    x = lp.LpVector.of(rng.normal(0, 1, 5), 2)
    assert_close(lp.duality_map(x).coords, x.coords, tol=1e-14)


def test_duality_zero_maps_to_zero():
    jx = lp.duality_map(lp.LpVector.of([0, 0], 3))
    assert jx.is_zero


def test_duality_p3_frozen():
    x = lp.LpVector.of([1, 2], 3)
    jx = lp.duality_map(x)
    assert_close(jx.coords, [0.48074985676913606, 1.9229994270765443], tol=1e-15)
    assert lp.pair(jx, x) == pytest.approx(9.0 ** (2.0 / 3.0), abs=1e-12)
    # the image lives in the dual space: its norm is the q-norm
    assert jx.params.p == pytest.approx(1.5)
    assert jx.norm == pytest.approx(x.norm, abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.floats(-10, 10), min_size=1, max_size=6),
    st.sampled_from([1.5, 2.0, 2.5, 3.0, 4.0]),
)
def test_duality_pairing_identity_property(coords, p):
    x = lp.LpVector.of(coords, p)
    if x.norm < 1e-6:
        return
    jx = lp.duality_map(x)
    nx = x.norm
    assert abs(lp.pair(jx, x) - nx * nx) <= 1e-10 * nx * nx
    assert abs(jx.norm - nx) <= 1e-10 * nx


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(-10, 10), min_size=1, max_size=6),
    st.sampled_from([1.5, 2.5, 3.0, 4.0]),
    st.sampled_from([0.5, 2.0, 10.0]),
)
def test_duality_homogeneity_property(coords, p, lam):
    x = lp.LpVector.of(coords, p)
    if x.norm < 1e-6:
        return
    lhs = lp.duality_map(x.with_coords(lam * x.coords)).coords
    rhs = lam * lp.duality_map(x).coords
    assert float(np.max(np.abs(lhs - rhs))) <= 1e-10 * lam * x.norm


# --------------------------------------------------------------------------
# split / decompose


def test_split_examples():
    x = lp.LpVector.of([1, 2, 3], 2)
    xm, xo = lp.split(x, lp.IndexMask.of([0, 2]))
    assert xm.coords.tolist() == [1, 0, 3]
    assert xo.coords.tolist() == [0, 2, 0]
    assert_close(xm.coords + xo.coords, x.coords, tol=0.0)


def test_split_inside_subspace():
    x = lp.LpVector.of([1, 0, 3], 3)
    xm, xo = lp.split(x, lp.IndexMask.of([0, 2]))
    assert_close(xm.coords, x.coords, tol=0.0)
    assert xo.is_zero


def test_split_power_additivity_p3():
    x = lp.LpVector.of([1, 2], 3)
    xm, xo = lp.split(x, lp.IndexMask.of([0]))
    assert xm.norm**3 + xo.norm**3 == pytest.approx(9.0, rel=1e-14)


def test_split_bad_mask():
    with pytest.raises(InvalidMask):
        lp.split(lp.LpVector.of([1, 2], 2), lp.IndexMask.of([5]))


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(-10, 10), min_size=2, max_size=6),
    st.sampled_from([1.5, 2.0, 3.0, 4.0]),
    st.data(),
)
def test_split_additivity_property(coords, p, data):
    x = lp.LpVector.of(coords, p)
    k = data.draw(st.integers(1, x.dim))
    mask = lp.IndexMask.of(range(k))
    xm, xo = lp.split(x, mask)
    assert_close(xm.coords + xo.coords, x.coords, tol=0.0)
    if x.norm > 1e-6:
        assert abs(x.norm**p - xm.norm**p - xo.norm**p) <= 1e-12 * x.norm**p


def test_decompose_p2_weights_are_one(rng):
    x = lp.LpVector.of(rng.normal(0, 1, 4), 2)
    assert lp.decompose_duality(x, lp.IndexMask.of([0, 1])) == (1.0, 1.0)


def test_decompose_inside_subspace():
    x = lp.LpVector.of([1, 0], 3)
    wm, wo = lp.decompose_duality(x, lp.IndexMask.of([0]))
    assert wm == pytest.approx(1.0, abs=1e-15)
    assert wo == 0.0


def test_decompose_p3_frozen_and_reconstruction():
    x = lp.LpVector.of([1, 2], 3)
    mask = lp.IndexMask.of([0])
    wm, wo = lp.decompose_duality(x, mask)
    assert wm == pytest.approx(1.0 / CBRT9, abs=1e-14)
    assert wo == pytest.approx(2.0 / CBRT9, abs=1e-14)
    xm, xo = lp.split(x, mask)
    rec = wm * lp.duality_map(xm).coords + wo * lp.duality_map(xo).coords
    assert_close(rec, lp.duality_map(x).coords, tol=1e-10)


def test_decompose_rejects_zero():
    with pytest.raises(ZeroVector):
        lp.decompose_duality(lp.LpVector.of([0, 0], 3), lp.IndexMask.of([0]))


# --------------------------------------------------------------------------
# Lyapunov functional


def test_lyapunov_self_is_zero(rng):
    for p in (1.5, 2, 3):
        x = lp.LpVector.of(rng.normal(0, 2, 4), p)
        assert abs(lp.lyapunov(x, x)) <= 1e-12


def test_lyapunov_hilbert_is_squared_distance():
    x, y = lp.LpVector.of([1, 0], 2), lp.LpVector.of([0, 1], 2)
    assert lp.lyapunov(x, y) == pytest.approx(2.0, abs=1e-14)


def test_lyapunov_p3_frozen():
    x, y = lp.LpVector.of([1, 2], 3), lp.LpVector.of([1, 0], 3)
    assert lp.lyapunov(x, y) == pytest.approx(4.3652489973839534, abs=1e-14)


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.floats(-10, 10), min_size=1, max_size=6),
    st.lists(st.floats(-10, 10), min_size=1, max_size=6),
    st.sampled_from([1.5, 2.0, 2.5, 3.0, 4.0]),
)
def test_lyapunov_lower_bound_property(a, b, p):
    n = min(len(a), len(b))
    x = lp.LpVector.of(a[:n], p)
    y = lp.LpVector.of(b[:n], p)
    assert lp.lyapunov(x, y) >= (x.norm - y.norm) ** 2 - 1e-12


# --------------------------------------------------------------------------
# Psi (directional derivative of the norm)


def test_psi_self_is_norm():
    x = lp.LpVector.of([1, 2], 3)
    assert lp.psi(x, x) == pytest.approx(x.norm, abs=1e-14)
    assert lp.psi(x, x) == pytest.approx(CBRT9, abs=1e-14)


def test_psi_at_origin_is_norm_of_direction():
    v = lp.LpVector.of([3, 4], 2)
    assert lp.psi(v.zero_like(), v) == pytest.approx(5.0, abs=1e-14)


def test_psi_zero_direction_extension():
    x = lp.LpVector.of([1, 2], 3)
    assert lp.psi(x, x.zero_like()) == 0.0


def test_psi_p3_frozen_and_fd():
    x, v = lp.LpVector.of([1, 2], 3), lp.LpVector.of([1, 0], 3)
    val = lp.psi(x, v)
    assert val == pytest.approx(0.23112042478354489, abs=1e-15)
    t = 1e-6
    quot = (lp.norm(x.with_coords(x.coords + t * v.coords)) - x.norm) / t
    assert abs(quot - val) <= 1e-5
    assert quot >= val - 1e-9  # convexity: the quotient overestimates


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.floats(-10, 10), min_size=1, max_size=6),
    st.lists(st.floats(-10, 10), min_size=1, max_size=6),
    st.sampled_from([1.5, 2.0, 3.0, 4.0]),
)
def test_psi_bounded_and_homogeneous_property(a, b, p):
    n = min(len(a), len(b))
    x = lp.LpVector.of(a[:n], p)
    v = lp.LpVector.of(b[:n], p)
    val = lp.psi(x, v)
    assert abs(val) <= v.norm + 1e-10 * max(1.0, v.norm)
    if v.norm > 1e-6:
        assert abs(lp.psi(x, v.with_coords(2.0 * v.coords)) - 2.0 * val) <= 1e-10 * max(
            1.0, v.norm
        )


def test_psi_scaling_law():
    x, v = lp.LpVector.of([1, 2], 3), lp.LpVector.of([-2, 0.5], 3)
    lhs = lp.psi(x, v)
    rhs = v.norm * lp.psi(
        x.with_coords(x.coords / x.norm), v.with_coords(v.coords / v.norm)
    )
    assert lhs == pytest.approx(rhs, abs=1e-12)
