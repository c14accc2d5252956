"""Independent reference computations used to check the package.

Nothing here imports ``nonstat``. Each oracle takes a different
numerical route from the production code: tensor-product midpoint
grids with exact cell averages instead of lag-reduced Gauss-Legendre,
log-Gamma ratios instead of the Gamma recursion, dense Toeplitz
algebra instead of the Durbin-Levinson sampler.
"""

import math

import mpmath
import numpy as np
from scipy import linalg, special

# -- Gamma-function constants -------------------------------------------------


def delta_oracle(d):
    """delta(d) for FARIMA(0,d,0), unit innovations, by mpmath."""
    d = mpmath.mpf(d)
    if d == 0:
        return 1.0
    c = 1 / mpmath.gamma(d)
    if d == -0.5:
        return float(8 * c**2)
    big_c = c**2 * mpmath.gamma(d) * mpmath.gamma(1 - 2 * d) / mpmath.gamma(1 - d)
    return float(big_c / (d * (2 * d + 1)))


def acf_oracle(d, n):
    """FARIMA(0,d,0) autocovariances gamma(0..n-1) via log-Gamma ratios."""
    h = np.arange(n, dtype=float)
    g0 = special.gamma(1 - 2 * d) / special.gamma(1 - d) ** 2
    if d == 0:
        return np.where(h == 0, 1.0, 0.0)
    # gamma(h) = g0 Gamma(h+d) Gamma(1-d) / (Gamma(d) Gamma(h+1-d))
    logr = special.gammaln(h + d) - special.gammaln(h + 1 - d)
    sign = special.gammasgn(h + d) * special.gammasgn(h + 1 - d)
    return g0 * special.gamma(1 - d) / special.gamma(d) * sign * np.exp(logr)


# -- grid quadrature of the kernel matrices -----------------------------------


def _second_antiderivative(kernel, beta):
    if kernel == "log":
        def g(u):
            u = np.abs(u)
            with np.errstate(divide="ignore", invalid="ignore"):
                out = -0.5 * u * u * np.log(u) + 0.75 * u * u
            return np.where(u == 0.0, 0.0, out)
        return g
    return lambda u: np.abs(u) ** (beta + 2.0) / ((beta + 1.0) * (beta + 2.0))


def grid_kernel_block(kernel, beta, kind, s, n_grid=4096):
    """iint f_i(x) f_j(y) K(x-y) on an n_grid^2 midpoint grid.

    Each cell uses the exact average of K over the cell, so the
    singular diagonal contributes correctly.
    """
    h = 1.0 / n_grid
    g = _second_antiderivative(kernel, beta)
    k = np.arange(n_grid, dtype=float)
    # average of K over cell pair at offset k: second difference of g / h^2
    avg = (g((k + 1) * h) - 2.0 * g(k * h) + g((k - 1) * h)) / h**2
    x = (np.arange(n_grid) + 0.5) * h
    freq = 2.0 * np.pi * np.arange(1, s + 1)
    basis = (np.cos if kind == "cos" else np.sin)(np.outer(freq, x))
    kb = linalg.matmul_toeplitz((avg, avg), basis.T)
    return h * h * basis @ kb


def grid_sigma(regime, d=None, s=1, n_grid=4096):
    """Full (cos_block, sin_block) for a regime, by the grid route."""
    if regime == "normalized-log":
        return (grid_kernel_block("log", 0, "cos", s, n_grid),
                grid_kernel_block("log", 0, "sin", s, n_grid))
    if regime == "boundary-log":
        pref = delta_oracle(-0.5) / 2.0
        return (pref * grid_kernel_block("log", 0, "cos", s, n_grid),
                pref * grid_kernel_block("log", 0, "sin", s, n_grid))
    if regime == "integrated":
        pref = -delta_oracle(d - 1.0) / 2.0
        beta = 2 * d - 1
        return (pref * grid_kernel_block("power", beta, "cos", s, n_grid),
                pref * grid_kernel_block("power", beta, "sin", s, n_grid))
    beta = 2 * d + 1
    delta = delta_oracle(d)
    ij = np.outer(np.arange(1, s + 1), np.arange(1, s + 1))
    ss = grid_kernel_block("power", beta, "sin", s, n_grid)
    cc = grid_kernel_block("power", beta, "cos", s, n_grid)
    cos_block = -delta * (a_matrix_oracle(d, s) + 2 * np.pi**2 * ij * ss)
    sin_block = -delta * 2 * np.pi**2 * ij * cc
    return cos_block, sin_block


def a_matrix_oracle(d, s):
    """a_ij(d) with the moments int x^{2d} cos(2 pi k x) dx done by mpmath."""
    mom = np.array([
        float(mpmath.quad(lambda x: x ** (2 * d) * mpmath.cos(2 * mpmath.pi * k * x),
                          np.linspace(0, 1, 2 * k + 1).tolist()))
        for k in range(1, s + 1)
    ])
    return 1.0 - (2 * d + 1) * (mom[:, None] + mom[None, :])


# -- exact finite-sample DFT covariance ----------------------------------------


def exact_dft_covariance(d, n, s):
    """Cov of n^{-(1/2+d)} (sum cos(k lam_j) X_k, sum sin(k lam_j) X_k).

    X is FARIMA(0,d,0); for 1/2 <= d < 3/2 it is the cumulative sum of a
    FARIMA(0,d-1,0) sample started at zero.
    """
    k = np.arange(1, n + 1)
    lam = 2.0 * np.pi * np.arange(1, s + 1) / n
    basis = np.vstack([np.cos(np.outer(lam, k)), np.sin(np.outer(lam, k))]).T
    if d < 0.5:
        g = acf_oracle(d, n)
    else:
        g = acf_oracle(d - 1.0, n)
        # X = L Y with L lower-triangular ones, so B'X = (L'B)'Y
        basis = np.cumsum(basis[::-1], axis=0)[::-1]
    return basis.T @ linalg.matmul_toeplitz((g, g), basis) / float(n) ** (1.0 + 2.0 * d)


def partial_sum_variance_oracle(d, n):
    """Var(Y_1+...+Y_n) = sum_{|h|<n}(n-|h|) gamma(h), accumulated with math.fsum."""
    g = acf_oracle(d, n)
    h = np.arange(1, n, dtype=float)
    return math.fsum(np.concatenate(([n * g[0]], 2.0 * (n - h) * g[1:])))


def expected_boundary_variance_ratio(n):
    """E[(1/(n log n)) sum (X_k - mean)^2] for X the cumsum of FARIMA(0,-1/2,0).

    E sum (X_k - mean)^2 = sum_k Var(X_k) - n Var(mean).
    """
    g = acf_oracle(-0.5, n)
    # Var(X_k) = Var(X_{k-1}) + g0 + 2 sum_{h<k} g(h)
    inc = g[0] + 2.0 * np.concatenate(([0.0], np.cumsum(g[1:])))
    var_k = np.cumsum(inc)
    w = np.arange(n, 0, -1, dtype=float)
    var_mean = w @ linalg.matmul_toeplitz((g, g), w) / n**2
    return float((var_k.sum() - n * var_mean) / (n * math.log(n)))


# -- weighted chi-square -----------------------------------------------------------


def chi2_weighted_mc(weights, draws, seed):
    rng = np.random.default_rng(seed)
    w = np.asarray(weights, dtype=float)
    out = np.zeros(draws)
    for wi in w:
        out += wi * rng.chisquare(1, draws)
    return out


def dense_periodogram(x, j):
    n = len(x)
    k = np.arange(1, n + 1)
    return abs(np.sum(x * np.exp(1j * k * 2 * np.pi * j / n))) ** 2 / n
