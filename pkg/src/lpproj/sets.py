"""Convex-set descriptors, the four-region classifier, and the closed-form
generalized (Pi) and standard (P) metric projections.

Region tags follow the case structure of the masked-ball projection:
a point is classified by whether it lies in the coordinate subspace and by
how the norms of its mask/off-mask parts compare with the radius.  Boundary
comparisons use the relative tolerance ``TOL_REGION`` and resolve ties toward
the closed set.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .core import TOL_FEAS, TOL_REGION, IndexMask, LpVector, full_mask, split
from .errors import (
    ConditionViolated,
    InvalidInput,
    InvalidRegion,
    LpProjError,
    WrongExponent,
)


class SetKind(enum.Enum):
    FULL_BALL = "full_ball"
    MASKED_BALL = "masked_ball"
    CYLINDER = "cylinder"
    SUBSPACE = "subspace"


@dataclass(frozen=True)
class ConvexSetSpec:
    """Tagged descriptor of the supported convex sets."""

    kind: SetKind
    r: float | None = None
    mask: IndexMask | None = None

    def __post_init__(self):
        if self.kind is SetKind.SUBSPACE:
            if self.r is not None:
                raise InvalidInput("subspace takes no radius")
        else:
            if self.r is None or not (self.r > 0.0 and math.isfinite(self.r)):
                raise InvalidInput(f"{self.kind.value} requires a radius r > 0")
        if self.kind is SetKind.FULL_BALL:
            if self.mask is not None:
                raise InvalidInput("full ball takes no mask")
        elif self.mask is None:
            raise InvalidInput(f"{self.kind.value} requires a mask")

    @classmethod
    def full_ball(cls, r: float) -> "ConvexSetSpec":
        return cls(SetKind.FULL_BALL, r=float(r))

    @classmethod
    def masked_ball(cls, mask: IndexMask, r: float) -> "ConvexSetSpec":
        return cls(SetKind.MASKED_BALL, r=float(r), mask=mask)

    @classmethod
    def cylinder(cls, mask: IndexMask, r: float) -> "ConvexSetSpec":
        return cls(SetKind.CYLINDER, r=float(r), mask=mask)

    @classmethod
    def subspace(cls, mask: IndexMask) -> "ConvexSetSpec":
        return cls(SetKind.SUBSPACE, mask=mask)

    def mask_for_dim(self, n: int) -> IndexMask:
        return full_mask(n) if self.mask is None else self.mask

    def structure(self, n: int) -> tuple[np.ndarray, float, bool]:
        """(mask bool array, effective radius, zero-off-mask flag) for solvers."""
        sel = self.mask_for_dim(n).bool_array(n)
        if self.kind is SetKind.FULL_BALL:
            return sel, float(self.r), False
        if self.kind is SetKind.MASKED_BALL:
            return sel, float(self.r), True
        if self.kind is SetKind.CYLINDER:
            return sel, float(self.r), False
        return sel, math.inf, True

    def is_feasible(self, x: LpVector, tol: float = TOL_FEAS) -> bool:
        sel, r, zero_off = self.structure(x.dim)
        xm, xo = split(x, self.mask_for_dim(x.dim))
        if zero_off and xo.norm > tol * max(1.0, x.norm):
            return False
        if math.isfinite(r) and xm.norm > r * (1.0 + tol):
            return False
        return True


class RegionTag(enum.Enum):
    IN_BALL = "in_ball"
    MASKED_OUTSIDE = "masked_outside"
    CYLINDER_OFF_SUBSPACE = "cylinder_off_subspace"
    OUTSIDE_BOTH = "outside_both"


@dataclass(frozen=True)
class RegionLabel:
    tag: RegionTag
    boundary_flags: frozenset = field(default_factory=frozenset)

    def near(self, flag: str) -> bool:
        return flag in self.boundary_flags


@dataclass(frozen=True)
class ProjectionResult:
    point: LpVector
    region: RegionLabel
    method: str = "closed_form"
    certificate: object | None = None  # CertificateReport when attached


def _near(a: float, b: float, tol: float = TOL_REGION) -> bool:
    return abs(a - b) <= tol * max(abs(a), abs(b), 1.0)


def classify_region(x: LpVector, mask: IndexMask, r: float) -> RegionLabel:
    """Assign x to exactly one of the four projection regions.

    ``r = inf`` is accepted for subspace classification (the radius tests are
    then vacuous).  Membership in the subspace is exact: all off-mask
    coordinates must be 0.0.
    """
    if not r > 0.0:
        raise InvalidInput("radius must be positive")
    xm, xo = split(x, mask)
    nx, nxm = x.norm, xm.norm
    flags = set()
    finite_r = math.isfinite(r)
    if finite_r:
        if _near(nxm, r):
            flags.add("mask_norm_eq_radius")
        if _near(nx, r):
            flags.add("norm_eq_radius")
    if not xo.is_zero and xo.norm <= TOL_REGION * max(1.0, nx):
        flags.add("off_mask_near_zero")

    if xo.is_zero:
        if not finite_r or nx <= r * (1.0 + TOL_REGION):
            tag = RegionTag.IN_BALL
        else:
            tag = RegionTag.MASKED_OUTSIDE
    else:
        if not finite_r or nxm <= r * (1.0 + TOL_REGION):
            tag = RegionTag.CYLINDER_OFF_SUBSPACE
        else:
            tag = RegionTag.OUTSIDE_BOTH
        if finite_r and nxm > 0.0:
            s = (nxm / nx) ** (x.params.p - 2.0)
            if _near(s, r / nxm):
                flags.add("case_test_eq")
    return RegionLabel(tag, frozenset(flags))


def _scaling_weight(x: LpVector, nxm: float) -> float:
    # (||x^M||/||x||)^{p-2}; safe at ||x^M|| = 0, where the scaled mask part
    # vanishes anyway (returns 0, or 1 for p = 2 where the exponent is 0).
    p = x.params.p
    if nxm == 0.0 and p != 2.0:
        return 0.0
    return (nxm / x.norm) ** (p - 2.0)


def gpi_ball(x: LpVector, r: float) -> ProjectionResult:
    """Generalized metric projection onto the full ball B(r): identity
    inside, radial scaling r x/||x|| outside."""
    region = classify_region(x, full_mask(x.dim), r)
    if region.tag is RegionTag.IN_BALL:
        return ProjectionResult(x, region)
    return ProjectionResult(x.with_coords((r / x.norm) * x.coords), region)


def gpi_masked_ball(x: LpVector, mask: IndexMask, r: float) -> ProjectionResult:
    """Generalized metric projection onto the masked ball B_M(r).

    Off the subspace the formula switches between duality-weighted scaling of
    x^M and radial scaling onto the mask sphere, according to the sign of the
    case test (||x^M||/||x||)^{p-2} vs r/||x^M||; at equality both branches
    coincide and the closed-case branch is returned.  For p >= 2 the weighted
    branch always wins inside the cylinder, but for 1 < p < 2 the weight
    exceeds 1 and the radial cap can engage there as well (the weighted point
    would leave the ball; the capped point is the one that satisfies the
    variational inequality).
    """
    region = classify_region(x, mask, r)
    xm, _ = split(x, mask)
    nx, nxm = x.norm, xm.norm
    if region.tag is RegionTag.IN_BALL:
        point = x
    elif region.tag is RegionTag.MASKED_OUTSIDE:
        point = x.with_coords((r / nx) * x.coords)
    elif nxm == 0.0:
        point = x.zero_like()
    else:
        s = _scaling_weight(x, nxm)
        c = r / nxm
        radial = c * xm.coords
        weighted = s * xm.coords
        if region.near("case_test_eq"):
            if not np.allclose(radial, weighted, rtol=0.0, atol=1e-9 * max(1.0, r)):
                raise LpProjError("case-test equality but branch formulas disagree")
            point = x.with_coords(weighted)
        elif s > c:
            point = x.with_coords(radial)
        else:
            point = x.with_coords(weighted)
    return ProjectionResult(point, region)


def mpi_masked_ball(x: LpVector, mask: IndexMask, r: float) -> ProjectionResult:
    """Standard metric projection onto the masked ball B_M(r)."""
    region = classify_region(x, mask, r)
    xm, _ = split(x, mask)
    if region.tag is RegionTag.IN_BALL:
        point = x
    elif region.tag is RegionTag.MASKED_OUTSIDE:
        point = x.with_coords((r / x.norm) * x.coords)
    elif region.tag is RegionTag.CYLINDER_OFF_SUBSPACE:
        point = xm
    else:
        point = x.with_coords((r / xm.norm) * xm.coords)
    return ProjectionResult(point, region)


def mpi_cylinder(x: LpVector, mask: IndexMask, r: float) -> ProjectionResult:
    """Standard metric projection onto the cylinder C_M(r): radial scaling of
    the mask part, off-mask part untouched."""
    region = classify_region(x, mask, r)
    if region.tag in (RegionTag.IN_BALL, RegionTag.CYLINDER_OFF_SUBSPACE):
        return ProjectionResult(x, region)
    xm, xo = split(x, mask)
    point = x.with_coords((r / xm.norm) * xm.coords + xo.coords)
    return ProjectionResult(point, region)


def _require_p3(x: LpVector) -> None:
    if abs(x.params.p - 3.0) > 1e-12:
        raise WrongExponent(f"operation requires p = 3, got p = {x.params.p}")


def cylinder_aux_b(x: LpVector, mask: IndexMask) -> float:
    """Auxiliary scale b for the l_3 unit-cylinder projection.

    Positive root of b^6 ||x||^3 - b^3 ||x^{N\\M}||^3 - 1 = 0, which matches
    the off-mask duality coordinates of x and of x^M/||x^M|| + b x^{N\\M}.
    """
    _require_p3(x)
    xm, xo = split(x, mask)
    if not xm.norm > 1.0:
        raise InvalidRegion("requires ||x^M|| > 1")
    if xo.norm == 0.0:
        raise InvalidRegion("requires a nonzero off-mask part")
    nx3 = x.norm**3
    co3 = xo.norm**3
    b3 = (co3 + math.sqrt(co3 * co3 + 4.0 * nx3)) / (2.0 * nx3)
    return b3 ** (1.0 / 3.0)


_GOLDEN_CBRT = ((1.0 + math.sqrt(5.0)) / 2.0) ** (1.0 / 3.0)


def condition_618(x: LpVector, mask: IndexMask) -> bool:
    """Admissibility test ||x|| <= ((1+sqrt(5))/2)^(1/3) ||x^{N\\M}||^2 for
    the l_3 cylinder closed form."""
    _require_p3(x)
    _, xo = split(x, mask)
    return x.norm <= _GOLDEN_CBRT * xo.norm**2


def gpi_cylinder_l3(x: LpVector, mask: IndexMask) -> ProjectionResult:
    """Generalized metric projection onto the unit cylinder C_M(1) in l_3.

    Closed form x^M/||x^M|| + b x^{N\\M} is only available under the
    admissibility condition; otherwise ConditionViolated is raised and the
    caller may fall back to the brute-force oracle.
    """
    _require_p3(x)
    region = classify_region(x, mask, 1.0)
    if region.tag in (RegionTag.IN_BALL, RegionTag.CYLINDER_OFF_SUBSPACE):
        return ProjectionResult(x, region)
    if not condition_618(x, mask):
        raise ConditionViolated(
            "admissibility condition fails; no closed form (use the oracle fallback)"
        )
    xm, xo = split(x, mask)
    b = cylinder_aux_b(x, mask)
    point = x.with_coords(xm.coords / xm.norm + b * xo.coords)
    return ProjectionResult(point, region)


def gpi_subspace(x: LpVector, mask: IndexMask) -> ProjectionResult:
    """Generalized metric projection onto the subspace l_p^M.

    The duality-weighted scaling (||x^M||/||x||)^{p-2} x^M is the unique
    point whose duality image agrees with Jx on every mask coordinate.
    """
    region = classify_region(x, mask, math.inf)
    if x.is_zero:
        return ProjectionResult(x.zero_like(), region)
    xm, _ = split(x, mask)
    if xm.norm == 0.0:
        return ProjectionResult(x.zero_like(), region)
    point = x.with_coords(_scaling_weight(x, xm.norm) * xm.coords)
    return ProjectionResult(point, region)


def project(x: LpVector, spec: ConvexSetSpec, flavor: str) -> ProjectionResult:
    """Dispatch to the closed-form projection for (set, flavor).

    flavor "generalized" computes Pi, "metric" computes P.  Raises
    ConditionViolated for the generalized cylinder projection outside its
    admissible region (and WrongExponent off p = 3), so callers can route to
    the oracle.
    """
    n = x.dim
    if spec.mask is not None:
        spec.mask.validate_for_dim(n)
    if flavor == "generalized":
        if spec.kind is SetKind.FULL_BALL:
            return gpi_ball(x, spec.r)
        if spec.kind is SetKind.MASKED_BALL:
            return gpi_masked_ball(x, spec.mask, spec.r)
        if spec.kind is SetKind.SUBSPACE:
            return gpi_subspace(x, spec.mask)
        if abs(spec.r - 1.0) > TOL_REGION:
            raise ConditionViolated(
                "generalized cylinder projection has a closed form only for r = 1"
            )
        return gpi_cylinder_l3(x, spec.mask)
    if flavor == "metric":
        if spec.kind is SetKind.FULL_BALL:
            # P and Pi coincide on full balls.
            return gpi_ball(x, spec.r)
        if spec.kind is SetKind.MASKED_BALL:
            return mpi_masked_ball(x, spec.mask, spec.r)
        if spec.kind is SetKind.CYLINDER:
            return mpi_cylinder(x, spec.mask, spec.r)
        # Metric projection onto l_p^M: drop the off-mask coordinates
        # (coordinatewise distance is minimized separately).
        xm, _ = split(x, spec.mask)
        return ProjectionResult(xm, classify_region(x, spec.mask, math.inf))
    raise InvalidInput(f"unknown flavor {flavor!r}")
