"""Property suites: randomized invariant checks and oracle-equivalence sweeps.

Every check draws its own deterministic generator from (seed, check index),
reports the worst observed margin, and records enough detail to reproduce a
failure.  The CLI exposes these through the ``suite`` subcommand and the
acceptance tests drive the same functions.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .backend import duality, lp_norm
from .core import IndexMask, LpVector, duality_map, lyapunov, pair, psi, split
from .derivatives import (
    closed_derivative,
    d_gpi_ball,
    d_gpi_masked_ball,
    d_mpi_cylinder,
    d_mpi_masked_ball,
)
from .errors import CaseBoundary, LpProjError, NoClosedForm, NonIntegerP, OnBoundary
from .oracles import (
    OracleConfig,
    brute_gpi,
    brute_mpi,
    fd_derivative,
    project_with_fallback,
    projection_operator,
    vi_certificate,
)
from .sets import (
    ConvexSetSpec,
    RegionTag,
    SetKind,
    classify_region,
    condition_618,
    cylinder_aux_b,
    gpi_ball,
    gpi_cylinder_l3,
    gpi_masked_ball,
    gpi_subspace,
    mpi_cylinder,
    mpi_masked_ball,
    project,
)

P_GRID = (1.5, 2.0, 2.5, 3.0, 4.0)


@dataclass(frozen=True)
class SuiteCheck:
    name: str
    passed: bool
    count: int
    worst: float
    tolerance: float
    detail: str = ""

    def as_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "count": self.count,
            "worst": self.worst,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class SuiteReport:
    name: str
    seed: int
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self):
        return {
            "suite": self.name,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
        }


# ---------------------------------------------------------------------------
# instance generators


def _rng(seed, tag):
    return np.random.default_rng([seed, tag])


def _unit_block(rng, idx, n, p):
    v = np.zeros(n)
    block = rng.normal(0.0, 1.0, idx.size)
    block[np.abs(block) < 0.05] += 0.1 * np.sign(block[np.abs(block) < 0.05] + 0.5)
    v[idx] = block / lp_norm(block, p)
    return v


def _rand_vec(rng, n, p, scale=2.0) -> LpVector:
    v = rng.normal(0.0, scale, n)
    while not np.any(v):
        v = rng.normal(0.0, scale, n)
    return LpVector.of(v, p)


def _rand_mask(rng, n, proper=True) -> tuple[IndexMask, np.ndarray]:
    hi = n if not proper else n - 1
    k = int(rng.integers(1, max(hi, 1) + 1))
    idx = np.sort(rng.choice(n, size=k, replace=False))
    return IndexMask.of(idx.tolist()), idx


def masked_instance(rng, p, region, n=None):
    """(x, mask, r) lying in the requested region with comfortable margins.

    region is one of 'a', 'b', 'c', 'd1', 'd2' ('d2' needs p > 2; the
    duality-weighted branch cannot lose the case test for p <= 2).
    """
    if region == "d2" and p <= 2.0:
        raise ValueError("region d2 requires p > 2")
    for _ in range(100):
        n_ = int(n if n is not None else rng.integers(2, 7))
        mask, idx = _rand_mask(rng, n_, proper=True)
        off_idx = np.setdiff1d(np.arange(n_), idx)
        r = float(rng.uniform(0.5, 2.0))
        um = _unit_block(rng, idx, n_, p)
        uo = _unit_block(rng, off_idx, n_, p)
        if region == "a":
            x = um * (r * rng.uniform(0.15, 0.85))
        elif region == "b":
            x = um * (r * rng.uniform(1.2, 3.0))
        elif region == "c":
            x = um * (r * rng.uniform(0.15, 0.85)) + uo * rng.uniform(0.3, 2.0)
        else:
            nxm = r * rng.uniform(1.2, 2.0)
            if p > 2.0:
                ub = nxm * (nxm / r) ** (1.0 / (p - 2.0))
                if region == "d1":
                    target = nxm + (ub - nxm) * rng.uniform(0.15, 0.7)
                else:
                    target = ub * rng.uniform(1.5, 3.0)
            else:
                target = nxm * rng.uniform(1.1, 2.0)
            off = (target**p - nxm**p) ** (1.0 / p)
            x = um * nxm + uo * off
        v = LpVector.of(x, p)
        xm, xo = split(v, mask)
        if region in ("a", "b"):
            v = LpVector.of(np.where(np.isin(np.arange(n_), idx), x, 0.0), p)
            xm, xo = split(v, mask)
        # reject instances too close to a region or case boundary
        if abs(xm.norm - r) < 1e-2 * r:
            continue
        if region in ("c", "d1", "d2") and xm.norm > 0:
            s = (xm.norm / v.norm) ** (p - 2.0)
            c = r / xm.norm
            if abs(s - c) < 1e-3 * max(s, c):
                continue
        return v, mask, r
    raise LpProjError(f"could not generate a region-{region} instance")


def cylinder_l3_instance(rng, admissible=True, n=None):
    """(x, mask) for the unit l_3 cylinder, outside it, with the
    admissibility condition holding (or violated)."""
    golden = (1.0 + math.sqrt(5.0)) / 2.0
    for _ in range(100):
        n_ = int(n if n is not None else rng.integers(2, 7))
        mask, idx = _rand_mask(rng, n_, proper=True)
        off_idx = np.setdiff1d(np.arange(n_), idx)
        um = _unit_block(rng, idx, n_, 3.0)
        uo = _unit_block(rng, off_idx, n_, 3.0)
        a = rng.uniform(1.05, 1.5)
        c = rng.uniform(1.6, 3.0) if admissible else rng.uniform(0.05, 0.3)
        x = LpVector.of(um * a + uo * c, 3.0)
        bound = golden ** (1.0 / 3.0) * c * c
        if admissible and x.norm > 0.95 * bound:
            continue
        if not admissible and x.norm < 1.05 * bound:
            continue
        return x, mask
    raise LpProjError("could not generate a cylinder instance")


def _spec_for(kind, mask, r):
    if kind is SetKind.FULL_BALL:
        return ConvexSetSpec.full_ball(r)
    if kind is SetKind.MASKED_BALL:
        return ConvexSetSpec.masked_ball(mask, r)
    if kind is SetKind.CYLINDER:
        return ConvexSetSpec.cylinder(mask, r)
    return ConvexSetSpec.subspace(mask)


def _feasible_point(rng, spec, n, p):
    sel, r, zero_off = spec.structure(n)
    v = rng.normal(0.0, 1.0, n)
    if zero_off:
        v[~sel] = 0.0
    if math.isfinite(r):
        nm = lp_norm(v[sel], p)
        if nm > 0:
            v[sel] *= r * rng.uniform(0.1, 0.95) / nm
    return LpVector.of(v, p)


# ---------------------------------------------------------------------------
# check helpers


def _check(name, records, tolerance, count, detail=""):
    worst = max(records) if records else 0.0
    return SuiteCheck(
        name=name,
        passed=worst <= tolerance,
        count=count,
        worst=worst,
        tolerance=tolerance,
        detail=detail,
    )


def _coord_err(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


# ---------------------------------------------------------------------------
# lp_core invariants


def check_pairing_identity(seed, trials=200):
    rng = _rng(seed, 1)
    errs = []
    for k in range(trials):
        p = P_GRID[k % len(P_GRID)]
        x = _rand_vec(rng, int(rng.integers(1, 7)), p)
        jx = duality_map(x)
        nx = x.norm
        errs.append(abs(pair(jx, x) - nx * nx) / nx**2)
        errs.append(abs(jx.norm - nx) / nx)
    return _check("core_pairing_identity", errs, 1e-10, trials)


def check_duality_homogeneity(seed, trials=200):
    rng = _rng(seed, 2)
    errs = []
    for k in range(trials):
        p = P_GRID[k % len(P_GRID)]
        x = _rand_vec(rng, int(rng.integers(1, 7)), p)
        jx = duality_map(x).coords
        for lam in (0.5, 2.0, 10.0):
            jl = duality_map(x.with_coords(lam * x.coords)).coords
            errs.append(_coord_err(jl, lam * jx) / (lam * max(x.norm, 1e-30)))
    return _check("core_duality_homogeneity", errs, 1e-10, trials)


def check_decomposition(seed, trials=200):
    from .core import decompose_duality

    rng = _rng(seed, 3)
    errs_rec, errs_add = [], []
    for k in range(trials):
        p = P_GRID[k % len(P_GRID)]
        n = int(rng.integers(2, 7))
        x = _rand_vec(rng, n, p)
        mask, _ = _rand_mask(rng, n, proper=True)
        wm, wo = decompose_duality(x, mask)
        xm, xo = split(x, mask)
        rec = wm * duality_map(xm).coords + wo * duality_map(xo).coords
        errs_rec.append(_coord_err(rec, duality_map(x).coords))
        errs_add.append(
            abs(x.norm**p - xm.norm**p - xo.norm**p) / x.norm**p
        )
    a = _check("core_decomposition_reconstruction", errs_rec, 1e-10, trials)
    b = _check("core_norm_power_additivity", errs_add, 1e-12, trials)
    return a, b


def check_lyapunov_bound(seed, trials=200):
    rng = _rng(seed, 4)
    errs = []
    for k in range(trials):
        p = P_GRID[k % len(P_GRID)]
        n = int(rng.integers(1, 7))
        x, y = _rand_vec(rng, n, p), _rand_vec(rng, n, p)
        slack = lyapunov(x, y) - (x.norm - y.norm) ** 2
        errs.append(max(0.0, -slack))
        errs.append(abs(lyapunov(x, x)))
    return _check("core_lyapunov_lower_bound", errs, 1e-12, trials)


def check_psi_fd(seed, trials=200):
    # absolute tolerance, so compare on unit directions (Psi is homogeneous
    # in v) with ||x|| bounded away from zero
    rng = _rng(seed, 5)
    errs, one_sided = [], []
    t = 1e-6
    for k in range(trials):
        p = P_GRID[k % len(P_GRID)]
        n = int(rng.integers(1, 7))
        x, v = _rand_vec(rng, n, p), _rand_vec(rng, n, p)
        x = x.with_coords(x.coords * (rng.uniform(0.5, 3.0) / x.norm))
        v = v.with_coords(v.coords / v.norm)
        quot = (x.with_coords(x.coords + t * v.coords).norm - x.norm) / t
        val = psi(x, v)
        errs.append(abs(quot - val))
        one_sided.append(max(0.0, val - quot))  # convexity: quot >= psi
    a = _check("core_psi_fd_agreement", errs, 1e-5, trials)
    b = _check("core_psi_fd_one_sided", one_sided, 1e-9, trials)
    return a, b


def check_psi_scaling(seed, trials=200):
    rng = _rng(seed, 6)
    errs = []
    for k in range(trials):
        p = P_GRID[k % len(P_GRID)]
        n = int(rng.integers(1, 7))
        x, v = _rand_vec(rng, n, p), _rand_vec(rng, n, p)
        lhs = psi(x, v)
        rhs = v.norm * psi(
            x.with_coords(x.coords / x.norm), v.with_coords(v.coords / v.norm)
        )
        errs.append(abs(lhs - rhs) / max(1.0, abs(lhs)))
        errs.append(abs(psi(x, x) - x.norm) / x.norm)
        errs.append(abs(psi(x.zero_like(), v) - v.norm) / v.norm)
        for lam in (0.5, 3.0):
            errs.append(abs(psi(x, v.with_coords(lam * v.coords)) - lam * lhs))
    return _check("core_psi_scaling_law", errs, 1e-10, trials)


# ---------------------------------------------------------------------------
# sets_projections invariants


_REGIONS = ("a", "b", "c", "d1", "d2")


def _masked_cases(rng, trials):
    for k in range(trials):
        p = P_GRID[k % len(P_GRID)]
        region = _REGIONS[k % len(_REGIONS)]
        if region == "d2" and p <= 2.0:
            region = "d1"
        yield masked_instance(rng, p, region), region


def check_region_partition(seed, trials=200):
    rng = _rng(seed, 7)
    bad = 0
    for (x, mask, r), region in _masked_cases(rng, trials):
        label = classify_region(x, mask, r)
        xm, xo = split(x, mask)
        expected = {
            "a": RegionTag.IN_BALL,
            "b": RegionTag.MASKED_OUTSIDE,
            "c": RegionTag.CYLINDER_OFF_SUBSPACE,
            "d1": RegionTag.OUTSIDE_BOTH,
            "d2": RegionTag.OUTSIDE_BOTH,
        }[region]
        if label.tag is not expected:
            bad += 1
            continue
        # recompute from scratch
        if xo.is_zero:
            tag = RegionTag.IN_BALL if x.norm <= r else RegionTag.MASKED_OUTSIDE
        else:
            tag = (
                RegionTag.CYLINDER_OFF_SUBSPACE
                if xm.norm <= r
                else RegionTag.OUTSIDE_BOTH
            )
        if tag is not label.tag:
            bad += 1
    return _check("sets_region_partition", [float(bad)], 0.0, trials)


def check_case_equality(seed, trials=200):
    """On the case-test boundary the radial and weighted branches coincide."""
    rng = _rng(seed, 8)
    errs = []
    for k in range(trials):
        p = float(rng.uniform(2.1, 4.0))
        n = int(rng.integers(2, 7))
        mask, idx = _rand_mask(rng, n, proper=True)
        off_idx = np.setdiff1d(np.arange(n), idx)
        r = float(rng.uniform(0.5, 2.0))
        nxm = r * rng.uniform(1.2, 2.0)
        # at equality the total norm satisfies ||x|| = ||x^M|| (||x^M||/r)^{1/(p-2)}
        target = nxm * (nxm / r) ** (1.0 / (p - 2.0))
        um = _unit_block(rng, idx, n, p)
        uo = _unit_block(rng, off_idx, n, p)
        off = (target**p - nxm**p) ** (1.0 / p)
        x = LpVector.of(um * nxm + uo * off, p)
        xm, _ = split(x, mask)
        s = (xm.norm / x.norm) ** (p - 2.0)
        radial = (r / xm.norm) * xm.coords
        weighted = s * xm.coords
        errs.append(_coord_err(radial, weighted))
    return _check("sets_case_equality_consistency", errs, 1e-9, trials)


def _all_projections(x, mask, r):
    out = [
        ("gpi_masked", gpi_masked_ball(x, mask, r), _spec_for(SetKind.MASKED_BALL, mask, r)),
        ("mpi_masked", mpi_masked_ball(x, mask, r), _spec_for(SetKind.MASKED_BALL, mask, r)),
        ("mpi_cyl", mpi_cylinder(x, mask, r), _spec_for(SetKind.CYLINDER, mask, r)),
        ("gpi_sub", gpi_subspace(x, mask), _spec_for(SetKind.SUBSPACE, mask, None)),
        ("gpi_ball", gpi_ball(x, r), _spec_for(SetKind.FULL_BALL, None, r)),
    ]
    return out


def check_feasibility(seed, trials=200):
    rng = _rng(seed, 9)
    bad = 0
    n_checked = 0
    for (x, mask, r), _region in _masked_cases(rng, trials):
        for _name, res, spec in _all_projections(x, mask, r):
            n_checked += 1
            if not spec.is_feasible(res.point):
                bad += 1
    return _check("sets_feasibility", [float(bad)], 0.0, n_checked)


def check_idempotence(seed, trials=200):
    rng = _rng(seed, 10)
    errs = []
    for k in range(trials):
        p = P_GRID[k % len(P_GRID)]
        n = int(rng.integers(2, 7))
        mask, _ = _rand_mask(rng, n, proper=True)
        r = float(rng.uniform(0.5, 2.0))
        for kind in SetKind:
            spec = _spec_for(kind, mask, r)
            z = _feasible_point(rng, spec, n, p)
            for flavor in ("generalized", "metric"):
                res = project_with_fallback(z, spec, flavor)
                errs.append(_coord_err(res.point.coords, z.coords))
    return _check("sets_idempotence", errs, 0.0, trials)


def check_p2_collapse(seed, trials=200):
    rng = _rng(seed, 11)
    errs = []
    k = 0
    while k < trials:
        region = _REGIONS[k % 4]  # d2 unreachable at p = 2
        (x, mask, r) = masked_instance(rng, 2.0, region)
        a = gpi_masked_ball(x, mask, r).point.coords
        b = mpi_masked_ball(x, mask, r).point.coords
        errs.append(_coord_err(a, b))
        k += 1
    return _check("sets_p2_collapse", errs, 1e-10, trials)


def check_cone_homogeneity(seed, trials=200):
    rng = _rng(seed, 12)
    errs = []
    for k in range(trials):
        p = P_GRID[k % len(P_GRID)]
        n = int(rng.integers(2, 7))
        mask, _ = _rand_mask(rng, n, proper=True)
        x = _rand_vec(rng, n, p)
        base = gpi_subspace(x, mask).point.coords
        for lam in (0.5, 3.0):
            scaled = gpi_subspace(x.with_coords(lam * x.coords), mask).point.coords
            errs.append(_coord_err(scaled, lam * base) / max(1.0, lam * x.norm))
    return _check("sets_cone_homogeneity", errs, 1e-10, trials)


def check_subspace_orthogonality(seed, trials=200):
    rng = _rng(seed, 13)
    vertex, inv_img = [], []
    for k in range(trials):
        p = P_GRID[k % len(P_GRID)]
        n = int(rng.integers(2, 7))
        mask, idx = _rand_mask(rng, n, proper=True)
        x = _rand_vec(rng, n, p)
        y = gpi_subspace(x, mask).point
        jdiff = duality_map(x).coords - duality_map(y).coords
        # vertex orthogonality: <Jx - J(Pi x), Pi x> = 0
        vertex.append(abs(float(jdiff @ y.coords)))
        # inverse-image membership: Jx - Jy vanishes on the mask block
        inv_img.append(float(np.max(np.abs(jdiff[idx]))))
    a = _check("sets_vertex_orthogonality", vertex, 1e-9, trials)
    b = _check("sets_subspace_orthogonality", inv_img, 1e-10, trials)
    return a, b


def check_vi_certificates(seed, trials=200, samples=1000):
    rng = _rng(seed, 14)
    cfg = OracleConfig(vi_samples=samples, rng_seed=seed)
    margins = []
    count = 0
    for (x, mask, r), _region in _masked_cases(rng, trials // 2):
        cases = [
            (gpi_masked_ball(x, mask, r), _spec_for(SetKind.MASKED_BALL, mask, r), "generalized"),
            (mpi_masked_ball(x, mask, r), _spec_for(SetKind.MASKED_BALL, mask, r), "metric"),
            (mpi_cylinder(x, mask, r), _spec_for(SetKind.CYLINDER, mask, r), "metric"),
            (gpi_ball(x, r), _spec_for(SetKind.FULL_BALL, None, r), "generalized"),
            (gpi_subspace(x, mask), _spec_for(SetKind.SUBSPACE, mask, None), "generalized"),
        ]
        for res, spec, flavor in cases:
            rep = vi_certificate(x, res.point, spec, flavor, cfg)
            margins.append(max(0.0, -rep.min_margin))
            count += 1
    return _check("sets_vi_certificates", margins, 1e-9, count)


# ---------------------------------------------------------------------------
# derivative invariants


def _derivative_case(rng, k):
    """A (x, h, mask, r, p, region) tuple with margins >= 1e-3."""
    p = P_GRID[k % len(P_GRID)]
    region = _REGIONS[k % len(_REGIONS)]
    if region == "d2" and p <= 2.0:
        region = "d1"
    x, mask, r = masked_instance(rng, p, region)
    n = x.dim
    if k % 3 == 0:
        h = LpVector.of(
            np.where(mask.bool_array(n), rng.normal(0, 1, n), 0.0), p
        )
        if h.is_zero:
            h = x
    elif k % 3 == 1:
        h = _rand_vec(rng, n, p)
    else:
        h = x
    return x, h, mask, r, p, region


def _try_closed(fn, *args):
    try:
        return fn(*args)
    except (NonIntegerP, CaseBoundary, OnBoundary, NoClosedForm):
        return None


def check_deriv_homogeneity(seed, trials=200):
    rng = _rng(seed, 15)
    errs = []
    for k in range(trials):
        x, h, mask, r, p, _region = _derivative_case(rng, k)
        for op in (d_gpi_masked_ball, d_mpi_masked_ball, d_mpi_cylinder):
            base = _try_closed(op, x, h, mask, r)
            if base is None:
                continue
            for lam in (0.5, 2.0):
                scaled = op(x, h.with_coords(lam * h.coords), mask, r)
                errs.append(
                    _coord_err(scaled.vector.coords, lam * base.vector.coords)
                    / max(1.0, lam * h.norm)
                )
        base = _try_closed(d_gpi_ball, x, h, r)
        if base is not None:
            for lam in (0.5, 2.0):
                scaled = d_gpi_ball(x, h.with_coords(lam * h.coords), r)
                errs.append(
                    _coord_err(scaled.vector.coords, lam * base.vector.coords)
                    / max(1.0, lam * h.norm)
                )
    return _check("deriv_homogeneity", errs, 1e-10, trials)


def check_deriv_interior_identity(seed, trials=200):
    rng = _rng(seed, 16)
    errs = []
    cfg = OracleConfig(rng_seed=seed)
    for k in range(trials):
        p = P_GRID[k % len(P_GRID)]
        n = int(rng.integers(2, 7))
        mask, _ = _rand_mask(rng, n, proper=True)
        r = float(rng.uniform(0.5, 2.0))
        # strictly interior feasible points, direction inside the tangent space
        sel = mask.bool_array(n)
        v = rng.normal(0.0, 1.0, n)
        v[~sel] = 0.0
        x = LpVector.of(v * (r * rng.uniform(0.1, 0.8) / lp_norm(v[sel], p)), p)
        h = LpVector.of(np.where(sel, rng.normal(0, 1, n), 0.0), p)
        if h.is_zero:
            continue
        d = d_gpi_masked_ball(x, h, mask, r)
        errs.append(_coord_err(d.vector.coords, h.coords))
        d = d_mpi_masked_ball(x, h, mask, r)
        errs.append(_coord_err(d.vector.coords, h.coords))
        # full-dimension directions for the cylinder / full ball cases
        hfull = _rand_vec(rng, n, p)
        xc = LpVector.of(np.where(sel, x.coords, rng.normal(0, 1, n)), p)
        d = d_mpi_cylinder(xc, hfull, mask, r)
        errs.append(_coord_err(d.vector.coords, hfull.coords))
        xb = _rand_vec(rng, n, p)
        xb = xb.with_coords(xb.coords * (r * 0.5 / xb.norm))
        d = d_gpi_ball(xb, hfull, r)
        errs.append(_coord_err(d.vector.coords, hfull.coords))
    return _check("deriv_interior_identity", errs, 1e-10, trials)


def check_deriv_locally_constant(seed, trials=200):
    """Radial-branch points with h^M = 0: the projection is locally constant
    along h, so the derivative vanishes."""
    rng = _rng(seed, 17)
    errs = []
    k = 0
    attempts = 0
    while k < trials and attempts < trials * 20:
        attempts += 1
        p = P_GRID[attempts % len(P_GRID)]
        x, mask, r = masked_instance(rng, p, "d1")
        n = x.dim
        sel = mask.bool_array(n)
        h = LpVector.of(np.where(sel, 0.0, rng.normal(0, 1, n)), p)
        if h.is_zero:
            continue
        d = d_gpi_masked_ball(x, h, mask, r)
        errs.append(float(np.max(np.abs(d.vector.coords))))
        k += 1
    return _check("deriv_locally_constant", errs, 1e-10, k)


def check_deriv_fd_agreement(seed, trials=200):
    rng = _rng(seed, 18)
    cfg = OracleConfig(rng_seed=seed)
    errs = []
    used = 0
    for k in range(trials):
        x, h, mask, r, p, _region = _derivative_case(rng, k)
        cases = [
            (d_gpi_masked_ball, SetKind.MASKED_BALL, "generalized"),
            (d_mpi_masked_ball, SetKind.MASKED_BALL, "metric"),
            (d_mpi_cylinder, SetKind.CYLINDER, "metric"),
        ]
        for op, kind, flavor in cases:
            closed = _try_closed(op, x, h, mask, r)
            if closed is None:
                continue
            spec = _spec_for(kind, mask, r)
            fd = fd_derivative(projection_operator(spec, flavor, cfg), x, h, cfg)
            errs.append(_coord_err(closed.vector.coords, fd.vector.coords))
            used += 1
        closed = _try_closed(d_gpi_ball, x, h, r)
        if closed is not None:
            spec = _spec_for(SetKind.FULL_BALL, None, r)
            fd = fd_derivative(projection_operator(spec, "generalized", cfg), x, h, cfg)
            errs.append(_coord_err(closed.vector.coords, fd.vector.coords))
            used += 1
    return _check("deriv_fd_agreement", errs, 1e-6, used)


def check_deriv_p2_collapse(seed, trials=200):
    rng = _rng(seed, 19)
    errs = []
    k = 0
    while k < trials:
        region = _REGIONS[k % 4]
        x, mask, r = masked_instance(rng, 2.0, region)
        h = _rand_vec(rng, x.dim, 2.0)
        a = _try_closed(d_gpi_masked_ball, x, h, mask, r)
        b = _try_closed(d_mpi_masked_ball, x, h, mask, r)
        if a is not None and b is not None:
            errs.append(_coord_err(a.vector.coords, b.vector.coords))
        k += 1
    return _check("deriv_p2_collapse", errs, 1e-10, trials)


def check_deriv_chord(seed, trials=60):
    """Feasible u, w: the derivative of the projection at u along w - u is
    w - u (checked with the FD oracle on every set kind)."""
    rng = _rng(seed, 20)
    cfg = OracleConfig(rng_seed=seed)
    errs = []
    count = 0
    for k in range(trials):
        p = P_GRID[k % len(P_GRID)]
        n = int(rng.integers(2, 7))
        mask, _ = _rand_mask(rng, n, proper=True)
        r = float(rng.uniform(0.5, 2.0))
        for kind in SetKind:
            if kind is SetKind.CYLINDER and p != 3.0:
                # generalized cylinder projections fall back to the brute
                # oracle; restrict the sweep to keep the suite fast
                flavors = ("metric",)
            else:
                flavors = ("generalized", "metric")
            spec = _spec_for(kind, mask, r if kind is not SetKind.CYLINDER else 1.0)
            for flavor in flavors:
                u = _feasible_point(rng, spec, n, p)
                w = _feasible_point(rng, spec, n, p)
                if np.allclose(u.coords, w.coords):
                    continue
                h = u.with_coords(w.coords - u.coords)
                fd = fd_derivative(projection_operator(spec, flavor, cfg), u, h, cfg)
                errs.append(_coord_err(fd.vector.coords, h.coords))
                count += 1
    return _check("deriv_chord_identity", errs, 1e-6, count)


def check_deriv_subspace_cone(seed, trials=60):
    """FD checks on the subspace projection: identity inside the subspace
    and the radial derivative identity Pi'(x; x) = Pi(x)."""
    rng = _rng(seed, 21)
    cfg = OracleConfig(rng_seed=seed)
    id_errs, radial_errs = [], []
    for k in range(trials):
        p = P_GRID[k % len(P_GRID)]
        n = int(rng.integers(2, 7))
        mask, _ = _rand_mask(rng, n, proper=True)
        spec = _spec_for(SetKind.SUBSPACE, mask, None)
        op = projection_operator(spec, "generalized", cfg)
        sel = mask.bool_array(n)
        y = LpVector.of(np.where(sel, rng.normal(0, 1, n), 0.0), p)
        v = LpVector.of(np.where(sel, rng.normal(0, 1, n), 0.0), p)
        if y.is_zero or v.is_zero:
            continue
        fd = fd_derivative(op, y, v, cfg)
        id_errs.append(_coord_err(fd.vector.coords, v.coords))
        x = _rand_vec(rng, n, p)
        fd = fd_derivative(op, x, x, cfg)
        radial_errs.append(
            _coord_err(fd.vector.coords, gpi_subspace(x, mask).point.coords)
        )
    a = _check("deriv_subspace_identity", id_errs, 1e-6, len(id_errs))
    b = _check("deriv_cone_radial", radial_errs, 1e-6, len(radial_errs))
    return a, b


# ---------------------------------------------------------------------------
# oracle invariants


def check_certificate_soundness(seed, trials=60):
    """Closed-form projections pass; a >= 1e-3 feasible perturbation fails."""
    rng = _rng(seed, 22)
    cfg = OracleConfig(rng_seed=seed)
    bad = 0
    count = 0
    for k in range(trials):
        p = P_GRID[k % len(P_GRID)]
        region = ("b", "c", "d1")[k % 3]
        x, mask, r = masked_instance(rng, p, region)
        for flavor, res in (
            ("generalized", gpi_masked_ball(x, mask, r)),
            ("metric", mpi_masked_ball(x, mask, r)),
        ):
            spec = _spec_for(SetKind.MASKED_BALL, mask, r)
            good = vi_certificate(x, res.point, spec, flavor, cfg)
            if not good.passed:
                bad += 1
            # perturb toward a feasible point, staying feasible by convexity
            z = _feasible_point(rng, spec, x.dim, p)
            direction = z.coords - res.point.coords
            nd = lp_norm(direction, p)
            if nd < 1e-6:
                continue
            step = max(1e-3 / nd, min(0.3, 1.0))
            pert = res.point.with_coords(res.point.coords + step * direction)
            report = vi_certificate(x, pert, spec, flavor, cfg)
            if report.passed:
                bad += 1
            count += 2
    return _check("oracle_certificate_soundness", [float(bad)], 0.0, count)


def check_fd_convergence_order(seed, trials=100):
    """Quotient spreads decrease monotonically down to the noise floor."""
    rng = _rng(seed, 23)
    cfg = OracleConfig(rng_seed=seed)
    bad = 0
    for k in range(trials):
        x, h, mask, r, p, _region = _derivative_case(rng, k)
        op = projection_operator(_spec_for(SetKind.MASKED_BALL, mask, r), "metric", cfg)
        base = op(x).coords
        prev = None
        quots = []
        for t in cfg.fd_t_sequence:
            quots.append((op(x.with_coords(x.coords + t * h.coords)).coords - base) / t)
        spreads = [
            float(np.max(np.abs(a - b))) for a, b in zip(quots[1:], quots[:-1])
        ]
        scale = 1.0 + float(np.max(np.abs(base)))
        for (a, b), t in zip(zip(spreads[1:], spreads[:-1]), cfg.fd_t_sequence[2:]):
            # quotients carry roundoff ~ eps * scale / t, so the monotone
            # decrease is only required above that floor (>= 1e-9)
            floor = max(1e-9, 1e-15 / t) * scale
            if a > max(b * 1.05, floor):
                bad += 1
                break
    return _check("oracle_fd_convergence_order", [float(bad)], 0.0, trials)


def check_lyapunov_gap(seed, trials=40):
    """V(x, brute_gpi(x)) is within 1e-8 of the sampled feasible minimum."""
    rng = _rng(seed, 24)
    cfg = OracleConfig(rng_seed=seed)
    errs = []
    for k in range(trials):
        p = P_GRID[k % len(P_GRID)]
        region = ("b", "c", "d1")[k % 3]
        x, mask, r = masked_instance(rng, p, region)
        spec = _spec_for(SetKind.MASKED_BALL, mask, r)
        y = brute_gpi(x, spec, cfg)
        vy = lyapunov(x, y)
        worst = 0.0
        for _ in range(50):
            z = _feasible_point(rng, spec, x.dim, p)
            worst = max(worst, vy - lyapunov(x, z))
        errs.append(max(0.0, worst))
    return _check("oracle_lyapunov_gap", errs, 1e-8, trials)


# ---------------------------------------------------------------------------
# oracle equivalence sweeps


def _oracle_sweep_masked(seed, flavor, trials):
    rng = _rng(seed, 25 if flavor == "generalized" else 26)
    cfg = OracleConfig(rng_seed=seed)
    errs = []
    for (x, mask, r), _region in _masked_cases(rng, trials):
        spec = _spec_for(SetKind.MASKED_BALL, mask, r)
        if flavor == "generalized":
            closed = gpi_masked_ball(x, mask, r).point.coords
            oracle = brute_gpi(x, spec, cfg).coords
        else:
            closed = mpi_masked_ball(x, mask, r).point.coords
            oracle = brute_mpi(x, spec, cfg).coords
        errs.append(_coord_err(closed, oracle))
    return _check(f"oracle_eq_masked_ball_{flavor}", errs, 1e-6, trials)


def _oracle_sweep_full_ball(seed, flavor, trials):
    rng = _rng(seed, 27 if flavor == "generalized" else 28)
    cfg = OracleConfig(rng_seed=seed)
    errs = []
    for k in range(trials):
        p = P_GRID[k % len(P_GRID)]
        n = int(rng.integers(1, 7))
        x = _rand_vec(rng, n, p)
        r = float(rng.uniform(0.3, 1.5))
        if abs(x.norm - r) < 1e-2 * r:
            continue
        spec = ConvexSetSpec.full_ball(r)
        closed = gpi_ball(x, r).point.coords
        oracle = (
            brute_gpi(x, spec, cfg) if flavor == "generalized" else brute_mpi(x, spec, cfg)
        ).coords
        errs.append(_coord_err(closed, oracle))
    return _check(f"oracle_eq_full_ball_{flavor}", errs, 1e-6, trials)


def _oracle_sweep_cylinder_gpi(seed, trials):
    rng = _rng(seed, 29)
    cfg = OracleConfig(rng_seed=seed)
    errs = []
    for k in range(trials):
        x, mask = cylinder_l3_instance(rng, admissible=True)
        spec = ConvexSetSpec.cylinder(mask, 1.0)
        closed = gpi_cylinder_l3(x, mask).point.coords
        oracle = brute_gpi(x, spec, cfg).coords
        errs.append(_coord_err(closed, oracle))
    return _check("oracle_eq_cylinder_generalized_l3", errs, 1e-6, trials)


def _oracle_sweep_cylinder_mpi(seed, trials):
    rng = _rng(seed, 30)
    cfg = OracleConfig(rng_seed=seed)
    errs = []
    for k in range(trials):
        p = P_GRID[k % len(P_GRID)]
        region = ("c", "d1", "d2")[k % 3]
        if region == "d2" and p <= 2.0:
            region = "d1"
        x, mask, r = masked_instance(rng, p, region)
        spec = ConvexSetSpec.cylinder(mask, r)
        closed = mpi_cylinder(x, mask, r).point.coords
        oracle = brute_mpi(x, spec, cfg).coords
        errs.append(_coord_err(closed, oracle))
    return _check("oracle_eq_cylinder_metric", errs, 1e-6, trials)


def _oracle_sweep_subspace(seed, trials):
    rng = _rng(seed, 31)
    cfg = OracleConfig(rng_seed=seed)
    errs_g, errs_m = [], []
    for k in range(trials):
        p = P_GRID[k % len(P_GRID)]
        n = int(rng.integers(2, 7))
        mask, idx = _rand_mask(rng, n, proper=True)
        x = _rand_vec(rng, n, p)
        spec = ConvexSetSpec.subspace(mask)
        errs_g.append(
            _coord_err(gpi_subspace(x, mask).point.coords, brute_gpi(x, spec, cfg).coords)
        )
        xm, _ = split(x, mask)
        errs_m.append(_coord_err(xm.coords, brute_mpi(x, spec, cfg).coords))
    a = _check("oracle_eq_subspace_generalized", errs_g, 1e-6, trials)
    b = _check("oracle_eq_subspace_metric", errs_m, 1e-6, trials)
    return a, b


def check_cylinder_aux(seed, trials=200):
    """Sextic residual of b, the duality match of the auxiliary point, and
    the admissibility routing."""
    rng = _rng(seed, 32)
    resid_errs, dual_errs = [], []
    routing_bad = 0
    for k in range(trials):
        x, mask = cylinder_l3_instance(rng, admissible=True)
        b = cylinder_aux_b(x, mask)
        xm, xo = split(x, mask)
        resid = b**6 * x.norm**3 - b**3 * xo.norm**3 - 1.0
        resid_errs.append(abs(resid))
        a = x.with_coords(xm.coords / xm.norm + b * xo.coords)
        off = ~mask.bool_array(x.dim)
        dual_errs.append(
            float(np.max(np.abs(duality(x.coords, 3.0)[off] - duality(a.coords, 3.0)[off])))
        )
        # mask-part of the constructed point sits on the unit mask sphere
        am, _ = split(a, mask)
        resid_errs.append(abs(am.norm - 1.0))
    for k in range(trials // 4):
        x, mask = cylinder_l3_instance(rng, admissible=False)
        try:
            gpi_cylinder_l3(x, mask)
            routing_bad += 1
        except LpProjError:
            res = project_with_fallback(x, ConvexSetSpec.cylinder(mask, 1.0), "generalized")
            if res.method != "oracle_fallback":
                routing_bad += 1
    a = _check("cylinder_aux_residuals", resid_errs, 1e-10, trials)
    b = _check("cylinder_aux_duality_match", dual_errs, 1e-9, trials)
    c = _check("cylinder_condition_routing", [float(routing_bad)], 0.0, trials // 4)
    return a, b, c


# ---------------------------------------------------------------------------
# suite runners


def run_invariants(seed=0) -> SuiteReport:
    checks = []
    checks.append(check_pairing_identity(seed))
    checks.append(check_duality_homogeneity(seed))
    checks.extend(check_decomposition(seed))
    checks.append(check_lyapunov_bound(seed))
    checks.extend(check_psi_fd(seed))
    checks.append(check_psi_scaling(seed))
    checks.append(check_region_partition(seed))
    checks.append(check_case_equality(seed))
    checks.append(check_feasibility(seed))
    checks.append(check_idempotence(seed))
    checks.append(check_p2_collapse(seed))
    checks.append(check_cone_homogeneity(seed))
    checks.extend(check_subspace_orthogonality(seed))
    checks.append(check_vi_certificates(seed))
    checks.append(check_deriv_homogeneity(seed))
    checks.append(check_deriv_interior_identity(seed))
    checks.append(check_deriv_locally_constant(seed))
    checks.append(check_deriv_fd_agreement(seed))
    checks.append(check_deriv_p2_collapse(seed))
    checks.append(check_deriv_chord(seed))
    checks.extend(check_deriv_subspace_cone(seed))
    checks.append(check_certificate_soundness(seed))
    checks.append(check_fd_convergence_order(seed))
    checks.append(check_lyapunov_gap(seed))
    checks.extend(check_cylinder_aux(seed))
    return SuiteReport("invariants", seed, tuple(checks))


def run_oracle_equivalence(seed=0, trials=200) -> SuiteReport:
    checks = [
        _oracle_sweep_full_ball(seed, "generalized", trials),
        _oracle_sweep_full_ball(seed, "metric", trials),
        _oracle_sweep_masked(seed, "generalized", trials),
        _oracle_sweep_masked(seed, "metric", trials),
        _oracle_sweep_cylinder_gpi(seed, trials),
        _oracle_sweep_cylinder_mpi(seed, trials),
    ]
    checks.extend(_oracle_sweep_subspace(seed, trials))
    return SuiteReport("oracle_equivalence", seed, tuple(checks))


def run_suite(name: str, seed: int = 0) -> SuiteReport:
    if name == "invariants":
        return run_invariants(seed)
    if name == "oracle_equivalence":
        return run_oracle_equivalence(seed)
    if name == "all":
        a = run_invariants(seed)
        b = run_oracle_equivalence(seed)
        return SuiteReport("all", seed, a.checks + b.checks)
    from .errors import SchemaError

    raise SchemaError(f"unknown suite {name!r} (choose invariants, oracle_equivalence, all)")
