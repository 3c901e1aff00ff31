"""Pure-NumPy implementation of the hot kernels.

This is the fallback used when the compiled extension is unavailable.  The
compiled module in ``_kernels.pyx`` mirrors these semantics exactly; both are
exercised by the test suite and compared by ``benchmarks/bench_kernels.py``.

All kernels work on raw float64 arrays.  Exponents are validated upstream.
"""

import numpy as np

IS_COMPILED = False


def lp_norm(x, p):
    """(sum |x_i|^p)^(1/p) of a coordinate array."""
    return float((np.abs(x) ** p).sum() ** (1.0 / p))


def pairing(a, b):
    """Canonical evaluation pairing <a, b> = sum a_i b_i."""
    return float(np.dot(a, b))


def duality(x, p):
    """Normalized duality mapping, coordinatewise.

    (Jx)_i = |x_i|^{p-2} x_i / ||x||^{p-2}, written in the scale-stable form
    ||x|| * (|x_i|/||x||)^{p-1} * sign(x_i).  The zero vector maps to itself.
    """
    n = lp_norm(x, p)
    if n == 0.0:
        return np.zeros_like(x)
    return n * (np.abs(x) / n) ** (p - 1.0) * np.sign(x)


def lyapunov_value(x, y, p):
    """||x||^2 - 2 <Jx, y> + ||y||^2."""
    nx = lp_norm(x, p)
    return nx * nx - 2.0 * pairing(duality(x, p), y) + lp_norm(y, p) ** 2


def psi_value(x, v, p):
    """Right derivative of t -> ||x + t v|| at 0, in closed form.

    Equals <Jx, v>/||x|| for x != 0 and ||v|| at x = 0 (the v = 0 extension
    gives 0 in both branches).
    """
    n = lp_norm(x, p)
    if n == 0.0:
        return lp_norm(v, p)
    return float(np.dot((np.abs(x) / n) ** (p - 1.0) * np.sign(x), v))


def metric_power(x, y, p):
    """sum |x_i - y_i|^p, the p-th power of the distance."""
    return float((np.abs(x - y) ** p).sum())


def metric_grad(x, y, p):
    """Gradient of metric_power with respect to y."""
    d = x - y
    return -p * np.abs(d) ** (p - 1.0) * np.sign(d)


def pgd_minimize(x, p, mask, r, zero_off, objective, y0, max_iters, step_init, tol_step):
    """Projected gradient descent with Armijo backtracking.

    Parameters
    ----------
    x : ndarray
        Anchor point of the objective.
    p : float
        Norm exponent, p > 1.
    mask : ndarray of bool
        Coordinates subject to the radius constraint.
    r : float
        Radius bound on the mask block; ``inf`` disables it (subspace).
    zero_off : bool
        Force off-mask coordinates to zero (sets inside the subspace).
    objective : int
        0 minimizes ||x||^2 - 2<Jx,y> + ||y||^2, 1 minimizes sum |x_i-y_i|^p.
    y0 : ndarray
        Start point; restored to feasibility before iterating.
    max_iters, step_init, tol_step :
        Iteration budget, initial step, and step-size stopping scale.

    Returns
    -------
    (y, iters, stalled) : feasible iterate, iterations used, and whether the
    line search failed to find any decrease (callers then polish).
    """
    off = ~mask

    def restore(y):
        if zero_off:
            y[off] = 0.0
        if np.isfinite(r):
            nm = lp_norm(y[mask], p)
            if nm > r:
                y[mask] *= r / nm
        return y

    jx = duality(x, p)
    nx2 = lp_norm(x, p) ** 2

    def f(y):
        if objective == 0:
            return nx2 - 2.0 * pairing(jx, y) + lp_norm(y, p) ** 2
        return metric_power(x, y, p)

    def grad(y):
        if objective == 0:
            return 2.0 * (duality(y, p) - jx)
        return metric_grad(x, y, p)

    y = restore(y0.astype(float).copy())
    fy = f(y)
    step = step_init
    iters = 0
    stalled = False
    small = 0
    for k in range(max_iters):
        iters = k + 1
        g = grad(y)
        t = step
        accepted = False
        for _ in range(60):
            ynew = restore(y - t * g)
            d = ynew - y
            gd = pairing(g, d)
            fnew = f(ynew)
            if fnew <= fy + 1e-4 * min(gd, 0.0):
                accepted = True
                break
            t *= 0.5
        if not accepted:
            stalled = True
            break
        move = float(np.max(np.abs(d)))
        y = ynew
        fy = fnew
        step = min(max(t * 2.0, 1e-14), 1e8)
        if move <= tol_step * (1.0 + float(np.max(np.abs(y)))):
            small += 1
            if small >= 2:
                break
        else:
            small = 0
    return y, iters, stalled
