"""Independent ground-truth generators.

Three oracles validate every closed form in the library:

* brute_gpi / brute_mpi minimize the Lyapunov functional or the distance
  directly, with multi-start projected gradient descent (radial feasibility
  restoration) followed by a stationarity polish that solves the first-order
  optimality system of the minimization problem with a general-purpose root
  finder.  Nothing here reuses the closed-form projection formulas.
* fd_derivative computes one-sided difference quotients of an arbitrary
  projector along a direction and extrapolates them.
* vi_certificate checks the variational-inequality characterization of a
  candidate projection by sampling feasible points, densely on the boundary
  where the (linear in z) pairing attains its minimum.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import root

from . import backend
from .core import TOL_CERT, TOL_FEAS, LpVector, split
from .derivatives import DerivativeResult, closed_derivative
from .errors import (
    CaseBoundary,
    ConditionViolated,
    InfeasibleCandidate,
    InvalidInput,
    NoClosedForm,
    NoConvergence,
    NonIntegerP,
    OnBoundary,
    UnstableDerivative,
    WrongExponent,
    ZeroDirection,
)
from .sets import ConvexSetSpec, ProjectionResult, SetKind, classify_region, project

_DEF_T = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7)


@dataclass(frozen=True)
class OracleConfig:
    max_iters: int = 1500
    step_init: float = 1.0
    tol_opt: float = 1e-10
    fd_t_sequence: tuple = _DEF_T
    vi_samples: int = 1000
    rng_seed: int = 0

    def __post_init__(self):
        if not self.tol_opt > 0.0:
            raise InvalidInput("tol_opt must be positive")
        ts = tuple(float(t) for t in self.fd_t_sequence)
        if len(ts) < 2 or any(t <= 0 for t in ts) or any(
            b >= a for a, b in zip(ts, ts[1:])
        ):
            raise InvalidInput("fd_t_sequence must be strictly decreasing and positive")
        object.__setattr__(self, "fd_t_sequence", ts)

    def replace(self, **kw) -> "OracleConfig":
        data = {
            "max_iters": self.max_iters,
            "step_init": self.step_init,
            "tol_opt": self.tol_opt,
            "fd_t_sequence": self.fd_t_sequence,
            "vi_samples": self.vi_samples,
            "rng_seed": self.rng_seed,
        }
        data.update(kw)
        return OracleConfig(**data)


@dataclass(frozen=True)
class CertificateReport:
    min_margin: float
    worst_z: LpVector
    passed: bool
    samples: int = 0


# ---------------------------------------------------------------------------
# brute-force minimization


def _objective(x, p, objective):
    if objective == 0:
        return lambda y: backend.lyapunov_value(x, y, p)
    return lambda y: backend.metric_power(x, y, p)


def _gradient(x, p, objective):
    if objective == 0:
        jx = backend.duality(x, p)
        return lambda y: 2.0 * (backend.duality(y, p) - jx)
    return lambda y: backend.metric_grad(x, y, p)


def _restore(y, sel, r, zero_off, p):
    y = y.copy()
    if zero_off:
        y[~sel] = 0.0
    if math.isfinite(r):
        nm = backend.lp_norm(y[sel], p)
        if nm > r:
            y[sel] *= r / nm
    return y


def _block_norm_grad(y, sel, p):
    # Gradient of ||y_sel||_p as a full-length vector.
    nm = backend.lp_norm(y[sel], p)
    w = np.zeros_like(y)
    w[sel] = (np.abs(y[sel]) / nm) ** (p - 1.0) * np.sign(y[sel])
    return w, nm


def _polish(p, sel, r, zero_off, y_in, grad, free_off):
    """Refine a PGD iterate by solving the stationarity system.

    Unknowns are the mask-block coordinates (plus the off-mask block when it
    is genuinely free, i.e. the cylinder with the Lyapunov objective) and,
    when the radius bound is active, the multiplier of the constraint
    ||y_sel||_p = r.  Returns None when the solve fails or does not improve.
    """
    n = y_in.size
    unknown = sel.copy()
    if free_off:
        unknown[:] = True
    fixed = ~unknown
    fixed_vals = y_in[fixed]

    def assemble(u):
        y = np.empty(n)
        y[unknown] = u
        y[fixed] = fixed_vals
        return y

    nm = backend.lp_norm(y_in[sel], p)
    active = math.isfinite(r) and nm >= r * (1.0 - 1e-5)

    if active:
        g0 = grad(y_in)
        w0, _ = _block_norm_grad(y_in, sel, p)
        denom = float(w0 @ w0)
        mu0 = max(0.0, -float(g0 @ w0) / denom) if denom > 0 else 0.0

        def system(vec):
            y = assemble(vec[:-1])
            mu = vec[-1]
            g = grad(y)
            w, nmy = _block_norm_grad(y, sel, p)
            out = g[unknown] + mu * w[unknown]
            return np.append(out, nmy - r)

        sol = root(system, np.append(y_in[unknown], mu0), method="hybr", tol=1e-13)
        resid = float(np.max(np.abs(system(sol.x))))
        mu = sol.x[-1]
        if resid > 1e-8 or mu < -1e-8:
            active = False  # fall through to the inactive solve
        else:
            y = assemble(sol.x[:-1])
            y = _restore(y, sel, r, zero_off, p)
            return y
    if not active:
        def system(vec):
            return grad(assemble(vec))[unknown]

        sol = root(system, y_in[unknown], method="hybr", tol=1e-13)
        resid = float(np.max(np.abs(system(sol.x))))
        if resid > 1e-8:
            return None
        y = assemble(sol.x)
        if math.isfinite(r) and backend.lp_norm(y[sel], p) > r * (1.0 + 1e-9):
            return None
        return _restore(y, sel, r, zero_off, p)
    return None


def _stationarity_residual(p, sel, r, y, grad, free_off):
    g = grad(y)
    unknown = sel.copy()
    if free_off:
        unknown[:] = True
    nm = backend.lp_norm(y[sel], p)
    if math.isfinite(r) and nm >= r * (1.0 - 1e-7):
        w, _ = _block_norm_grad(y, sel, p)
        denom = float(w[unknown] @ w[unknown])
        mu = max(0.0, -float(g[unknown] @ w[unknown]) / denom) if denom > 0 else 0.0
        res = g[unknown] + mu * w[unknown]
    else:
        res = g[unknown]
    return float(np.max(np.abs(res))) if res.size else 0.0


def _brute(x: LpVector, spec: ConvexSetSpec, cfg: OracleConfig, objective: int) -> LpVector:
    n = x.dim
    if n > 8:
        raise InvalidInput("brute-force oracle is limited to dimension <= 8")
    if spec.mask is not None:
        spec.mask.validate_for_dim(n)
    if spec.is_feasible(x):
        return x

    p = x.params.p
    sel, r, zero_off = spec.structure(n)
    xc = x.coords.astype(float)

    if objective == 1 and spec.kind is SetKind.SUBSPACE:
        # Distance is coordinatewise separable: drop the off-mask block.
        xm, _ = split(x, spec.mask)
        return xm

    cylinder = spec.kind is SetKind.CYLINDER
    solver_free_off = cylinder and objective == 0
    f = _objective(xc, p, objective)
    grad = _gradient(xc, p, objective)

    rng = np.random.default_rng(cfg.rng_seed)
    scale = max(1.0, x.norm)
    starts = [
        _restore(xc, sel, r, zero_off, p),
        np.zeros(n),
    ]
    for _ in range(2):
        starts.append(_restore(rng.normal(0.0, scale, n), sel, r, zero_off, p))

    tol_step = max(cfg.tol_opt, 1e-12)
    candidates = []
    for y0 in starts:
        y, _iters, _stalled = backend.pgd_minimize(
            xc, p, sel, r, zero_off, objective, y0, cfg.max_iters, cfg.step_init, tol_step
        )
        if cylinder and objective == 1:
            # the distance objective is separable; the free off-mask block is
            # minimized exactly at x itself
            y[~sel] = xc[~sel]
        candidates.append(y)
    candidates.sort(key=f)
    polished = []
    for y in candidates[:2]:
        refined = _polish(p, sel, r, zero_off, y, grad, solver_free_off)
        if refined is not None and f(refined) <= f(y) + 1e-9 * (1.0 + abs(f(y))):
            polished.append(refined)

    # objective values of near-optimal candidates differ only by rounding
    # noise, so break ties with the first-order stationarity residual
    pool = candidates + polished
    fvals = [f(y) for y in pool]
    fmin = min(fvals)
    slack = 1e-9 * (1.0 + abs(fmin))
    near = [y for y, fy in zip(pool, fvals) if fy <= fmin + slack]
    best = min(
        near,
        key=lambda y: _stationarity_residual(p, sel, r, y, grad, cylinder or solver_free_off),
    )
    best = _restore(best, sel, r, zero_off, p)

    g_scale = 1.0 + float(np.max(np.abs(grad(starts[0]))))
    res = _stationarity_residual(p, sel, r, best, grad, cylinder or solver_free_off)
    if res > 1e-6 * g_scale:
        raise NoConvergence(
            f"stationarity residual {res:.3e} after {cfg.max_iters} iterations"
        )
    return x.with_coords(best)


def brute_gpi(x: LpVector, spec: ConvexSetSpec, cfg: OracleConfig | None = None) -> LpVector:
    """Minimize the Lyapunov functional V(x, .) over the set by brute force."""
    return _brute(x, spec, cfg or OracleConfig(), objective=0)


def brute_mpi(x: LpVector, spec: ConvexSetSpec, cfg: OracleConfig | None = None) -> LpVector:
    """Minimize the distance ||x - .||_p over the set by brute force."""
    return _brute(x, spec, cfg or OracleConfig(), objective=1)


def project_with_fallback(
    x: LpVector, spec: ConvexSetSpec, flavor: str, cfg: OracleConfig | None = None
) -> ProjectionResult:
    """Closed-form projection, or the brute-force minimizer where no closed
    form exists (generalized cylinder off its admissible region)."""
    try:
        return project(x, spec, flavor)
    except (ConditionViolated, WrongExponent):
        oracle = brute_gpi(x, spec, cfg) if flavor == "generalized" else brute_mpi(x, spec, cfg)
        mask = spec.mask_for_dim(x.dim)
        r = spec.r if spec.r is not None else math.inf
        return ProjectionResult(
            oracle, classify_region(x, mask, r), method="oracle_fallback"
        )


def projection_operator(spec: ConvexSetSpec, flavor: str, cfg: OracleConfig | None = None):
    """Plain LpVector -> LpVector projection callable for the FD oracle."""

    def operator(z: LpVector) -> LpVector:
        return project_with_fallback(z, spec, flavor, cfg).point

    return operator


def derivative_with_fallback(
    x: LpVector,
    h: LpVector,
    spec: ConvexSetSpec,
    flavor: str,
    cfg: OracleConfig | None = None,
) -> DerivativeResult:
    """Closed-form directional derivative with FD fallback.

    Falls back on NonIntegerP / CaseBoundary / OnBoundary / NoClosedForm,
    i.e. wherever the closed forms are not established.
    """
    try:
        return closed_derivative(x, h, spec, flavor)
    except (NonIntegerP, CaseBoundary, OnBoundary, NoClosedForm):
        return fd_derivative(projection_operator(spec, flavor, cfg), x, h, cfg)


# ---------------------------------------------------------------------------
# finite differences


def fd_derivative(projector, x: LpVector, v: LpVector, cfg: OracleConfig | None = None) -> DerivativeResult:
    """One-sided difference quotients of ``projector`` at x along v.

    Quotients are computed over ``cfg.fd_t_sequence``; the final value applies
    Richardson extrapolation to the last two and the error estimate is their
    coordinatewise spread.  Raises UnstableDerivative when the spreads grow
    instead of shrinking, which signals nondifferentiability.
    """
    cfg = cfg or OracleConfig()
    if v.is_zero:
        raise ZeroDirection("finite differences require v != 0")
    base = projector(x).coords
    scale = 1.0 + float(np.max(np.abs(base)))
    quots = []
    spreads = []
    for t in cfg.fd_t_sequence:
        shifted = x.with_coords(x.coords + t * v.coords)
        quots.append((projector(shifted).coords - base) / t)
        if len(quots) >= 2:
            spreads.append(float(np.max(np.abs(quots[-1] - quots[-2]))))
    if len(spreads) >= 2 and spreads[-1] > 1e-6 * scale and spreads[-1] > 3.0 * spreads[-2]:
        raise UnstableDerivative(
            f"difference quotients diverge (spreads {spreads[-2]:.3e} -> {spreads[-1]:.3e})"
        )
    t_prev, t_last = cfg.fd_t_sequence[-2], cfg.fd_t_sequence[-1]
    ratio = t_prev / t_last
    vec = (ratio * quots[-1] - quots[-2]) / (ratio - 1.0)
    return DerivativeResult(
        vector=x.with_coords(vec),
        method="finite_difference",
        fd_error_estimate=spreads[-1],
    )


# ---------------------------------------------------------------------------
# variational-inequality certificates


def _feasible_samples(x: LpVector, y: LpVector, spec: ConvexSetSpec, cfg: OracleConfig) -> np.ndarray:
    """vi_samples feasible points, biased toward boundary and extreme points."""
    n = x.dim
    p = x.params.p
    sel, r, zero_off = spec.structure(n)
    m = max(int(cfg.vi_samples), 4)
    rng = np.random.default_rng(cfg.rng_seed)
    rows = [y.coords.copy(), np.zeros(n)]

    subspace = not math.isfinite(r)
    amp = 2.0 * (1.0 + max(x.norm, y.norm))
    if subspace:
        rows.append(2.0 * y.coords)
        rows.append(-y.coords)
    else:
        rows.append(0.5 * y.coords)
        for i in np.flatnonzero(sel):
            e = np.zeros(n)
            e[i] = r
            rows.append(e.copy())
            e[i] = -r
            rows.append(e)

    def off_noise(row):
        if spec.kind is SetKind.CYLINDER:
            row[~sel] = rng.uniform(-amp, amp, int((~sel).sum()))
        return row

    while len(rows) < m:
        z = np.zeros(n)
        block = rng.normal(0.0, 1.0, int(sel.sum()))
        nb = backend.lp_norm(block, p)
        if nb == 0.0:
            continue
        if subspace:
            radius = amp * rng.uniform(0.0, 1.0) ** 0.5
        else:
            u = rng.uniform()
            # half the random rows sit exactly on the boundary sphere
            radius = r if u < 0.5 else r * rng.uniform(0.0, 1.0)
        z[sel] = block * (radius / nb)
        rows.append(off_noise(z))
    return np.array(rows[:m])


def vi_certificate(
    x: LpVector,
    y: LpVector,
    spec: ConvexSetSpec,
    flavor: str,
    cfg: OracleConfig | None = None,
) -> CertificateReport:
    """Sampled variational-inequality check of a candidate projection y.

    generalized: <Jx - Jy, y - z> >= 0 for all feasible z.
    metric:      <J(x - y), y - z> >= 0 for all feasible z.
    """
    cfg = cfg or OracleConfig()
    if spec.mask is not None:
        spec.mask.validate_for_dim(x.dim)
    if not spec.is_feasible(y, tol=TOL_FEAS):
        raise InfeasibleCandidate("candidate projection violates the set constraints")
    p = x.params.p
    if flavor == "generalized":
        w = backend.duality(x.coords, p) - backend.duality(y.coords, p)
    elif flavor == "metric":
        w = backend.duality(x.coords - y.coords, p)
    else:
        raise InvalidInput(f"unknown flavor {flavor!r}")
    Z = _feasible_samples(x, y, spec, cfg)
    margins = (y.coords[None, :] - Z) @ w
    k = int(np.argmin(margins))
    min_margin = float(margins[k])
    return CertificateReport(
        min_margin=min_margin,
        worst_z=x.with_coords(Z[k]),
        passed=min_margin >= -TOL_CERT,
        samples=Z.shape[0],
    )
