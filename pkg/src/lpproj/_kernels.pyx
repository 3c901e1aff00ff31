# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_kernels_py``.

Same surface, same semantics; only the inner loops are written out in C.
"""

from libc.math cimport fabs, pow, isfinite

import numpy as np

IS_COMPILED = True


cdef inline double _sign(double v) nogil:
    if v > 0.0:
        return 1.0
    if v < 0.0:
        return -1.0
    return 0.0


cdef double _norm(const double[::1] x, double p) nogil:
    cdef double s = 0.0
    cdef Py_ssize_t i
    for i in range(x.shape[0]):
        s += pow(fabs(x[i]), p)
    return pow(s, 1.0 / p)


cdef double _dot(const double[::1] a, const double[::1] b) nogil:
    cdef double s = 0.0
    cdef Py_ssize_t i
    for i in range(a.shape[0]):
        s += a[i] * b[i]
    return s


cdef void _duality_into(const double[::1] x, double p, double[::1] out) nogil:
    cdef double n = _norm(x, p)
    cdef Py_ssize_t i
    if n == 0.0:
        for i in range(x.shape[0]):
            out[i] = 0.0
        return
    for i in range(x.shape[0]):
        out[i] = n * pow(fabs(x[i]) / n, p - 1.0) * _sign(x[i])


cdef double _psi(const double[::1] x, const double[::1] v, double p) nogil:
    cdef double n = _norm(x, p)
    cdef double s = 0.0
    cdef Py_ssize_t i
    if n == 0.0:
        return _norm(v, p)
    for i in range(x.shape[0]):
        s += pow(fabs(x[i]) / n, p - 1.0) * _sign(x[i]) * v[i]
    return s


cdef double _metric_power(const double[::1] x, const double[::1] y, double p) nogil:
    cdef double s = 0.0
    cdef Py_ssize_t i
    for i in range(x.shape[0]):
        s += pow(fabs(x[i] - y[i]), p)
    return s


cdef void _metric_grad_into(const double[::1] x, const double[::1] y, double p, double[::1] out) nogil:
    cdef double d
    cdef Py_ssize_t i
    for i in range(x.shape[0]):
        d = x[i] - y[i]
        out[i] = -p * pow(fabs(d), p - 1.0) * _sign(d)


cdef double _block_norm(const double[::1] y, const unsigned char[::1] mask, double p) nogil:
    cdef double s = 0.0
    cdef Py_ssize_t i
    for i in range(y.shape[0]):
        if mask[i]:
            s += pow(fabs(y[i]), p)
    return pow(s, 1.0 / p)


cdef void _restore(double[::1] y, const unsigned char[::1] mask, double r,
                   bint zero_off, double p) nogil:
    cdef Py_ssize_t i
    cdef double nm, scale
    if zero_off:
        for i in range(y.shape[0]):
            if not mask[i]:
                y[i] = 0.0
    if isfinite(r):
        nm = _block_norm(y, mask, p)
        if nm > r:
            scale = r / nm
            for i in range(y.shape[0]):
                if mask[i]:
                    y[i] *= scale


def lp_norm(x, double p):
    """(sum |x_i|^p)^(1/p) of a coordinate array."""
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    return _norm(xv, p)


def pairing(a, b):
    """Canonical evaluation pairing <a, b> = sum a_i b_i."""
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    return _dot(av, bv)


def duality(x, double p):
    """Normalized duality mapping, coordinatewise."""
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty(xv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    _duality_into(xv, p, ov)
    return out


def lyapunov_value(x, y, double p):
    """||x||^2 - 2 <Jx, y> + ||y||^2."""
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef double nx = _norm(xv, p)
    cdef double ny = _norm(yv, p)
    jx = np.empty(xv.shape[0], dtype=np.float64)
    cdef double[::1] jv = jx
    _duality_into(xv, p, jv)
    return nx * nx - 2.0 * _dot(jv, yv) + ny * ny


def psi_value(x, v, double p):
    """Right derivative of t -> ||x + t v|| at 0, in closed form."""
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    return _psi(xv, vv, p)


def metric_power(x, y, double p):
    """sum |x_i - y_i|^p."""
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    return _metric_power(xv, yv, p)


def metric_grad(x, y, double p):
    """Gradient of metric_power with respect to y."""
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    out = np.empty(xv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    _metric_grad_into(xv, yv, p, ov)
    return out


def pgd_minimize(x, double p, mask, double r, bint zero_off, int objective,
                 y0, int max_iters, double step_init, double tol_step):
    """Projected gradient descent with Armijo backtracking.

    Mirrors the pure-Python twin; see ``_kernels_py.pgd_minimize``.
    """
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const unsigned char[::1] mv = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t n = xv.shape[0]

    y_arr = np.array(y0, dtype=np.float64, copy=True)
    cdef double[::1] y = y_arr
    ynew_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] ynew = ynew_arr
    g_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] g = g_arr
    jx_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] jx = jx_arr
    jy_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] jy = jy_arr

    cdef double nx2 = 0.0
    if objective == 0:
        _duality_into(xv, p, jx)
        nx2 = _norm(xv, p)
        nx2 *= nx2

    cdef double fy, fnew, t, gd, move, step, ny, ymax
    cdef Py_ssize_t i, k, iters = 0
    cdef int ls, small = 0
    cdef bint accepted, stalled = False

    _restore(y, mv, r, zero_off, p)

    if objective == 0:
        ny = _norm(y, p)
        fy = nx2 - 2.0 * _dot(jx, y) + ny * ny
    else:
        fy = _metric_power(xv, y, p)
    step = step_init

    for k in range(max_iters):
        iters = k + 1
        if objective == 0:
            _duality_into(y, p, jy)
            for i in range(n):
                g[i] = 2.0 * (jy[i] - jx[i])
        else:
            _metric_grad_into(xv, y, p, g)
        t = step
        accepted = False
        for ls in range(60):
            for i in range(n):
                ynew[i] = y[i] - t * g[i]
            _restore(ynew, mv, r, zero_off, p)
            gd = 0.0
            for i in range(n):
                gd += g[i] * (ynew[i] - y[i])
            if objective == 0:
                ny = _norm(ynew, p)
                fnew = nx2 - 2.0 * _dot(jx, ynew) + ny * ny
            else:
                fnew = _metric_power(xv, ynew, p)
            if fnew <= fy + 1e-4 * (gd if gd < 0.0 else 0.0):
                accepted = True
                break
            t *= 0.5
        if not accepted:
            stalled = True
            break
        move = 0.0
        ymax = 0.0
        for i in range(n):
            if fabs(ynew[i] - y[i]) > move:
                move = fabs(ynew[i] - y[i])
            y[i] = ynew[i]
            if fabs(y[i]) > ymax:
                ymax = fabs(y[i])
        fy = fnew
        step = t * 2.0
        if step < 1e-14:
            step = 1e-14
        elif step > 1e8:
            step = 1e8
        if move <= tol_step * (1.0 + ymax):
            small += 1
            if small >= 2:
                break
        else:
            small = 0
    return y_arr, iters, stalled
