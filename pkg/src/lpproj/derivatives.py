"""Closed-form Gateaux directional derivatives of the projections.

Each operation mirrors the case structure of the corresponding projection
formula.  Points within ``TOL_REGION`` of a region shell, case tests at
equality, and branches that require an integer exponent raise typed errors
(OnBoundary / CaseBoundary / NonIntegerP) instead of extrapolating; callers
fall back to the finite-difference oracle.
"""

import enum
from dataclasses import dataclass

from .core import TOL_REGION, IndexMask, LpVector, psi, split
from .errors import (
    CaseBoundary,
    InvalidInput,
    NonIntegerP,
    NotOnSphere,
    OnBoundary,
    ZeroDirection,
)


class DirectionClass(enum.Enum):
    UP = "up"      # ||x + t v|| >= r for small t > 0
    DOWN = "down"  # ||x + t v|| < r for small t > 0


@dataclass(frozen=True)
class DerivativeResult:
    vector: LpVector
    method: str = "closed_form"
    fd_error_estimate: float | None = None

    def __post_init__(self):
        if self.method == "closed_form" and self.fd_error_estimate is not None:
            raise InvalidInput("closed-form results carry no error estimate")


def _closed(v: LpVector) -> DerivativeResult:
    return DerivativeResult(vector=v)


def _side(value: float, bound: float) -> int:
    """-1 / 0 / +1 for value below / within tolerance of / above bound."""
    if abs(value - bound) <= TOL_REGION * max(abs(value), abs(bound), 1.0):
        return 0
    return 1 if value > bound else -1


def _integer_p(p: float) -> int | None:
    k = round(p)
    return k if abs(p - k) <= 1e-12 else None


def classify_direction(x: LpVector, v: LpVector, r: float) -> DirectionClass:
    """Split directions at a sphere point into outward-or-tangent vs inward.

    Decided by the sign of the norm's directional derivative: Psi(x, v) >= 0
    classifies UP (ties go up: for p > 1 the norm is strictly convex, so a
    vanishing right derivative still forces ||x + t v|| >= r near 0).
    """
    if v.is_zero:
        raise ZeroDirection("direction must be nonzero")
    if _side(x.norm, r) != 0:
        raise NotOnSphere(f"||x|| = {x.norm} is not on the sphere of radius {r}")
    return DirectionClass.UP if psi(x, v) >= 0.0 else DirectionClass.DOWN


def d_gpi_ball(x: LpVector, v: LpVector, r: float) -> DerivativeResult:
    """Derivative of the full-ball projection: identity inside, tangential
    part of the rescaled direction outside, direction-class split on the
    sphere."""
    if v.is_zero:
        raise ZeroDirection("direction must be nonzero")
    if not r > 0.0:
        raise InvalidInput("radius must be positive")
    nx = x.norm
    side = _side(nx, r)
    if side < 0:
        return _closed(v)
    if side > 0:
        coeff = psi(x, v)
        out = (r / nx) * v.coords - (r / nx**2) * coeff * x.coords
        return _closed(x.with_coords(out))
    if classify_direction(x, v, r) is DirectionClass.DOWN:
        return _closed(v)
    return _closed(x.with_coords(v.coords - (psi(x, v) / r) * x.coords))


def d_gpi_masked_ball(x: LpVector, h: LpVector, mask: IndexMask, r: float) -> DerivativeResult:
    """Derivative of the generalized projection onto the masked ball.

    Off the subspace the projection is either the radial cap r x^M/||x^M||
    or the duality-weighted scaling (||x^M||/||x||)^{p-2} x^M, decided by the
    case test; each branch is differentiated where it holds with a margin.
    The weighted branch (and its interior limit for h off the subspace) is
    only returned for integer exponents, matching the range on which that
    formula is established; everything else routes to the FD oracle via
    typed errors.
    """
    if h.is_zero:
        raise ZeroDirection("direction must be nonzero")
    if not r > 0.0:
        raise InvalidInput("radius must be positive")
    p = x.params.p
    xm, xo = split(x, mask)
    hm, _ = split(h, mask)
    nx, nxm = x.norm, xm.norm

    if xo.is_zero:
        side = _side(nx, r)
        if side == 0:
            raise OnBoundary("x lies on the masked sphere; no derivative formula")
        if side < 0:
            # interior of the masked ball
            if (h.coords == hm.coords).all():
                return _closed(h)
            k = _integer_p(p)
            if k == 2:
                return _closed(hm)
            if k is None or k < 2:
                raise NonIntegerP(
                    f"off-subspace branch requires an integer exponent, got p = {p}"
                )
            if x.is_zero:
                raise OnBoundary("no derivative formula at the origin for h off the subspace")
            s = (nxm / nx) ** (p - 2.0)
            out = s * hm.coords + ((p - 2.0) / nx) * (psi(x, hm) - psi(x, h)) * x.coords
            return _closed(x.with_coords(out))
        # outside the ball but inside the subspace
        out = (r / nx) * hm.coords - (r / nx**2) * psi(x, hm) * x.coords
        return _closed(x.with_coords(out))

    if _side(nxm, r) == 0:
        raise OnBoundary("||x^M|| sits on the cylinder shell; no derivative formula")
    if nxm == 0.0:
        raise OnBoundary("x^M vanishes; no derivative formula off the subspace")

    s = (nxm / nx) ** (p - 2.0)
    c = r / nxm
    case = _side(s, c)
    if case == 0:
        raise CaseBoundary("case test at equality; derivative not established")
    if case > 0:
        # radial cap: r x^M/||x^M|| locally, any exponent
        out = (r / nxm) * hm.coords - (r / nxm**2) * psi(xm, hm) * xm.coords
        return _closed(x.with_coords(out))
    k = _integer_p(p)
    if k is None or k < 2:
        raise NonIntegerP(
            f"duality-weighted branch requires an integer exponent, got p = {p}"
        )
    if k == 2:
        # the weight is identically 1 and its derivative vanishes
        return _closed(hm)
    out = s * hm.coords + (p - 2.0) * s * (psi(xm, hm) / nxm - psi(x, h) / nx) * xm.coords
    return _closed(x.with_coords(out))


def d_mpi_masked_ball(x: LpVector, h: LpVector, mask: IndexMask, r: float) -> DerivativeResult:
    """Derivative of the standard projection onto the masked ball (all p)."""
    if h.is_zero:
        raise ZeroDirection("direction must be nonzero")
    if not r > 0.0:
        raise InvalidInput("radius must be positive")
    xm, xo = split(x, mask)
    hm, _ = split(h, mask)
    nx, nxm = x.norm, xm.norm

    if xo.is_zero:
        side = _side(nx, r)
        if side == 0:
            raise OnBoundary("x lies on the masked sphere; no derivative formula")
        if side < 0:
            return _closed(h) if (h.coords == hm.coords).all() else _closed(hm)
        out = (r / nx) * (hm.coords - (psi(x, hm) / nx) * x.coords)
        return _closed(x.with_coords(out))

    side_m = _side(nxm, r)
    if side_m == 0:
        raise OnBoundary("||x^M|| sits on the cylinder shell; no derivative formula")
    if side_m < 0:
        return _closed(hm)
    out = (r / nxm) * (hm.coords - (psi(xm, hm) / nxm) * xm.coords)
    return _closed(x.with_coords(out))


def d_mpi_cylinder(x: LpVector, h: LpVector, mask: IndexMask, r: float) -> DerivativeResult:
    """Derivative of the standard projection onto the cylinder: tangential
    part on the mask block, identity off it."""
    if h.is_zero:
        raise ZeroDirection("direction must be nonzero")
    if not r > 0.0:
        raise InvalidInput("radius must be positive")
    xm, _ = split(x, mask)
    hm, ho = split(h, mask)
    nxm = xm.norm
    side_m = _side(nxm, r)
    if side_m == 0:
        raise OnBoundary("||x^M|| sits on the cylinder shell; no derivative formula")
    if side_m < 0:
        return _closed(h)
    out = (r / nxm) * (hm.coords - (psi(xm, hm) / nxm) * xm.coords) + ho.coords
    return _closed(x.with_coords(out))


def closed_derivative(x: LpVector, h: LpVector, spec, flavor: str) -> DerivativeResult:
    """Dispatch to the closed-form derivative for (set, flavor).

    Raises NoClosedForm where none is exposed (the generalized projection
    onto cylinders and subspaces), and propagates the branch errors of the
    individual operations; callers fall back to the FD oracle.
    """
    from .errors import NoClosedForm
    from .sets import SetKind

    if flavor == "generalized":
        if spec.kind is SetKind.FULL_BALL:
            return d_gpi_ball(x, h, spec.r)
        if spec.kind is SetKind.MASKED_BALL:
            return d_gpi_masked_ball(x, h, spec.mask, spec.r)
        raise NoClosedForm(
            f"no closed-form generalized derivative for {spec.kind.value}; use the FD oracle"
        )
    if flavor == "metric":
        if spec.kind is SetKind.FULL_BALL:
            # P and Pi coincide on full balls, derivatives included.
            return d_gpi_ball(x, h, spec.r)
        if spec.kind is SetKind.MASKED_BALL:
            return d_mpi_masked_ball(x, h, spec.mask, spec.r)
        if spec.kind is SetKind.CYLINDER:
            return d_mpi_cylinder(x, h, spec.mask, spec.r)
        # metric projection onto l_p^M is the linear truncation map
        if h.is_zero:
            raise ZeroDirection("direction must be nonzero")
        hm, _ = split(h, spec.mask)
        return _closed(hm)
    raise InvalidInput(f"unknown flavor {flavor!r}")
