"""Pure NumPy/SciPy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np
from scipy.signal import lfilter


from nonstat.errors import LevinsonBreakdown


def durbin_levinson_sample(acf, e):
    acf = np.ascontiguousarray(acf, dtype=np.float64)
    e = np.ascontiguousarray(e, dtype=np.float64)
    n = e.shape[0]
    if acf.shape[0] < n:
        raise ValueError("acf shorter than innovation vector")
    x = np.empty(n)
    if n == 0:
        return x
    v = acf[0]
    if v <= 0.0:
        raise LevinsonBreakdown("nonpositive variance at lag 0")
    x[0] = np.sqrt(v) * e[0]
    # phi[k-1] holds phi_{t,k}
    phi = np.empty(0)
    for t in range(1, n):
        kappa = (acf[t] - phi @ acf[t - 1:0:-1]) / v
        phi = np.append(phi - kappa * phi[::-1], kappa)
        v *= 1.0 - kappa * kappa
        if v <= 0.0:
            raise LevinsonBreakdown(f"nonpositive prediction variance at step {t}")
        x[t] = phi @ x[t - 1::-1] + np.sqrt(v) * e[t]
    return x


def tvar_filter(coef, z, x0=0.0):
    coef = np.asarray(coef, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if coef.size and np.all(coef == coef[0]):
        out, _ = lfilter([1.0], [1.0, -coef[0]], z, zi=[coef[0] * x0])
        return out
    x = np.empty_like(z)
    last = float(x0)
    for t in range(z.shape[0]):
        last = coef[t] * last + z[t]
        x[t] = last
    return x


def frac_diff_filter(x, d):
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    if n == 0:
        return x.copy()
    k = np.arange(1, n)
    w = np.concatenate(([1.0], np.cumprod((k - 1 - d) / k)))
    return np.convolve(w, x)[:n]


def trig_sums(x, s):
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    k = np.arange(1, n + 1)
    j = np.arange(1, s + 1)
    ang = (2.0 * np.pi / n) * (np.outer(j, k) % n)
    return np.cos(ang) @ x, np.sin(ang) @ x


def ar1_panel_sum(phi, x0, eps):
    phi = np.asarray(phi, dtype=np.float64)
    y = np.array(x0, dtype=np.float64, copy=True)
    eps = np.asarray(eps, dtype=np.float64)
    out = np.empty(eps.shape[0])
    for t in range(eps.shape[0]):
        y = phi * y + eps[t]
        out[t] = y.sum()
    return out
