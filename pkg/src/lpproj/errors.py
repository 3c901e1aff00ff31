"""Error taxonomy shared by all modules.

Every exception carries a stable machine-readable ``code`` so the CLI can
propagate failures without parsing messages.
"""


class LpProjError(Exception):
    """Base class for all library errors."""

    code = "error"


class InvalidInput(LpProjError):
    """A precondition on plain input data was violated."""

    code = "invalid_input"


class InvalidMask(InvalidInput):
    """Mask index out of range, or empty mask."""

    code = "invalid_mask"


class ZeroVector(InvalidInput):
    """Operation requires a nonzero vector."""

    code = "zero_vector"


class WrongExponent(InvalidInput):
    """Operation is only defined for a specific exponent (p = 3)."""

    code = "wrong_exponent"


class InvalidRegion(InvalidInput):
    """Point does not lie in the region the formula requires."""

    code = "invalid_region"


class ConditionViolated(LpProjError):
    """Admissibility condition for the l_3 cylinder closed form fails."""

    code = "condition_violated"


class NotOnSphere(InvalidInput):
    """Direction classification requires a point on the sphere."""

    code = "not_on_sphere"


class ZeroDirection(InvalidInput):
    """Directional operations require a nonzero direction."""

    code = "zero_direction"


class NonIntegerP(LpProjError):
    """Derivative branch is only available for integer exponents.

    Callers should fall back to the finite-difference oracle.
    """

    code = "non_integer_p"


class CaseBoundary(LpProjError):
    """Case test sits at equality; no derivative formula is available.

    Callers should fall back to the finite-difference oracle.
    """

    code = "case_boundary"


class OnBoundary(LpProjError):
    """Point sits on a region shell where no derivative formula exists.

    Callers should fall back to the finite-difference oracle.
    """

    code = "on_boundary"


class NoClosedForm(LpProjError):
    """No closed-form expression exists for this operation.

    Callers should fall back to the brute-force / finite-difference oracles.
    """

    code = "no_closed_form"


class NoConvergence(LpProjError):
    """Brute-force minimizer failed to reach first-order stationarity."""

    code = "no_convergence"


class UnstableDerivative(LpProjError):
    """Finite-difference quotients diverge; nondifferentiability suspected."""

    code = "unstable_derivative"


class InfeasibleCandidate(InvalidInput):
    """Certificate candidate violates the set constraints."""

    code = "infeasible_candidate"


class SchemaError(LpProjError):
    """Request JSON does not validate."""

    code = "schema_error"


class SuiteFailure(LpProjError):
    """A property suite reported failing checks."""

    code = "suite_failure"
