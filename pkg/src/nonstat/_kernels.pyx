# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Signatures mirror ``_kernels_py`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, M_PI

cnp.import_array()


from nonstat.errors import LevinsonBreakdown


def durbin_levinson_sample(double[::1] acf, double[::1] e):
    cdef Py_ssize_t n = e.shape[0]
    if acf.shape[0] < n:
        raise ValueError("acf shorter than innovation vector")
    out = np.empty(n, dtype=np.float64)
    phi_a = np.zeros(n, dtype=np.float64)
    phi_b = np.zeros(n, dtype=np.float64)
    cdef double[::1] x = out
    cdef double[::1] phi = phi_a
    cdef double[::1] prev = phi_b
    cdef double[::1] tmp
    cdef double v = acf[0]
    cdef double num, kappa, acc
    cdef Py_ssize_t t, k
    if n == 0:
        return out
    if v <= 0.0:
        raise LevinsonBreakdown("nonpositive variance at lag 0")
    x[0] = sqrt(v) * e[0]
    for t in range(1, n):
        num = acf[t]
        for k in range(1, t):
            num -= prev[k] * acf[t - k]
        kappa = num / v
        for k in range(1, t):
            phi[k] = prev[k] - kappa * prev[t - k]
        phi[t] = kappa
        v = v * (1.0 - kappa * kappa)
        if v <= 0.0:
            raise LevinsonBreakdown("nonpositive prediction variance at step %d" % t)
        acc = 0.0
        for k in range(1, t + 1):
            acc += phi[k] * x[t - k]
        x[t] = acc + sqrt(v) * e[t]
        tmp = prev
        prev = phi
        phi = tmp
    return out


def tvar_filter(double[::1] coef, double[::1] z, double x0=0.0):
    cdef Py_ssize_t n = z.shape[0], t
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] x = out
    cdef double last = x0
    for t in range(n):
        last = coef[t] * last + z[t]
        x[t] = last
    return out


def frac_diff_filter(double[::1] x, double d):
    cdef Py_ssize_t n = x.shape[0], t, k
    w_arr = np.empty(n, dtype=np.float64)
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] w = w_arr
    cdef double[::1] u = out
    cdef double acc
    if n == 0:
        return out
    w[0] = 1.0
    for k in range(1, n):
        w[k] = w[k - 1] * (k - 1 - d) / k
    for t in range(n):
        acc = 0.0
        for k in range(t + 1):
            acc += w[k] * x[t - k]
        u[t] = acc
    return out


def trig_sums(double[::1] x, Py_ssize_t s):
    """Kahan-compensated sum_k x_k cos(k lam_j), sum_k x_k sin(k lam_j), k=1..n."""
    cdef Py_ssize_t n = x.shape[0], j, k, r
    cs = np.zeros(s, dtype=np.float64)
    ss = np.zeros(s, dtype=np.float64)
    cdef double[::1] c_out = cs
    cdef double[::1] s_out = ss
    cdef double ac, cc, as_, cs_, y, t, ang, step = 2.0 * M_PI / n
    for j in range(1, s + 1):
        ac = 0.0
        cc = 0.0
        as_ = 0.0
        cs_ = 0.0
        for k in range(1, n + 1):
            r = (j * k) % n
            ang = step * r
            y = x[k - 1] * cos(ang) - cc
            t = ac + y
            cc = (t - ac) - y
            ac = t
            y = x[k - 1] * sin(ang) - cs_
            t = as_ + y
            cs_ = (t - as_) - y
            as_ = t
        c_out[j - 1] = ac
        s_out[j - 1] = as_
    return cs, ss


def ar1_panel_sum(double[::1] phi, double[::1] x0, double[:, ::1] eps):
    """Sum over panels of AR(1) paths y_t = phi y_{t-1} + eps_t; eps has shape (n, M)."""
    cdef Py_ssize_t n = eps.shape[0], m = eps.shape[1], t, j
    state_arr = np.array(x0, dtype=np.float64, copy=True)
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] y = state_arr
    cdef double[::1] total = out
    cdef double acc
    for t in range(n):
        acc = 0.0
        for j in range(m):
            y[j] = phi[j] * y[j] + eps[t, j]
            acc += y[j]
        total[t] = acc
    return out
