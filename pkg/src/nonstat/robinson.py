"""Robinson's r-tilde test of d >= 1/2 against d < 1/2.

The series is fractionally differenced with (1 - B)^{1/2}, truncated at
the available past, optionally prewhitened by an AR(q) fit chosen by AIC,
and the score-type statistic

    r = sqrt(n) a / (sigma2 sqrt(A)),
    a = -(1/n) sum_j log(2 sin(pi j / n)) I_U(lam_j),
    sigma2 = (1/n) sum_t U_t^2,
    A = (2/n) sum_j log(2 sin(pi j / n))^2,

is referred to the standard normal lower tail. Sums over j run from 1 to
n - 1; the j = n weight is log(0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.stats import norm

from nonstat import _core
from nonstat.errors import DegenerateSeries, DomainError
from nonstat.stats import as_series


def frac_diff_weights(d: float, size: int) -> np.ndarray:
    """Coefficients pi_0..pi_{size-1} of (1 - z)^d."""
    k = np.arange(1, size, dtype=np.float64)
    return np.concatenate(([1.0], np.cumprod((k - 1.0 - d) / k)))


def frac_diff(x, d: float = 0.5) -> np.ndarray:
    """U_t = sum_{k=0}^{t-1} pi_k x_{t-k}: no presample values."""
    if d < 0:
        raise DomainError("frac_diff needs d >= 0")
    x = np.ascontiguousarray(x, dtype=np.float64)
    return _core.frac_diff_filter(x, float(d))


def yule_walker(u, order: int):
    """AR coefficients and innovation variance from sample autocovariances."""
    u = np.asarray(u, dtype=np.float64)
    n = u.size
    acov = np.array([u[: n - k] @ u[k:] for k in range(order + 1)]) / n
    if not acov[0] > 0:
        raise DegenerateSeries("series has zero variance")
    if order == 0:
        return np.empty(0), float(acov[0])
    try:
        coef = linalg.solve_toeplitz(acov[:order], acov[1:])
    except linalg.LinAlgError as exc:
        raise DegenerateSeries("singular Toeplitz system in Yule-Walker") from exc
    sigma2 = float(acov[0] - coef @ acov[1:])
    if not sigma2 > 0:
        raise DegenerateSeries("nonpositive Yule-Walker innovation variance")
    return coef, sigma2


def ar_prewhiten(u, qmax: int = 3):
    """Residuals of the AIC-selected AR(q), q <= qmax, fitted by Yule-Walker.

    AIC(q) = n log(sigma2_q) + 2q on the demeaned series. Returns
    ``(residuals, q)``; the first q residuals are dropped.
    """
    u = np.asarray(u, dtype=np.float64)
    n = u.size
    if qmax < 0:
        raise DomainError("qmax must be nonnegative")
    if n <= 10 * qmax:
        raise DomainError(f"need n > 10 * qmax, got n={n}, qmax={qmax}")
    z = u - u.mean()
    best_q, best_aic, best_coef = 0, math.inf, np.empty(0)
    for q in range(qmax + 1):
        coef, sigma2 = yule_walker(z, q)
        aic = n * math.log(sigma2) + 2 * q
        if aic < best_aic:
            best_q, best_aic, best_coef = q, aic, coef
    if best_q == 0:
        return z, 0
    resid = z[best_q:].copy()
    for k, c in enumerate(best_coef, start=1):
        resid -= c * z[best_q - k: n - k]
    return resid, best_q


def log_sine_weights(n: int) -> np.ndarray:
    """log(2 sin(pi j / n)) for j = 1..n-1."""
    j = np.arange(1, n, dtype=np.float64)
    return np.log(2.0 * np.sin(np.pi * j / n))


def a_constant(n: int) -> float:
    """A-tilde = (2/n) sum_{j<n} log(2 sin(pi j/n))^2; tends to pi^2/6."""
    w = log_sine_weights(n)
    return float(2.0 * np.sum(w * w) / n)


@dataclass(frozen=True)
class RobinsonStat:
    n: int
    a_tilde: float
    sigma2_tilde: float
    A_tilde: float
    r_tilde: float
    prewhitened: bool
    ar_order: int
    truncation: str = "full-sample"

    def to_dict(self):
        return {
            "n": self.n,
            "a_tilde": self.a_tilde,
            "sigma2_tilde": self.sigma2_tilde,
            "A_tilde": self.A_tilde,
            "r_tilde": self.r_tilde,
            "prewhitened": self.prewhitened,
            "ar_order": self.ar_order,
            "truncation": self.truncation,
        }


def robinson_statistic(x, prewhiten: bool = False, qmax: int = 3) -> RobinsonStat:
    x = as_series(x, min_length=64)
    u = frac_diff(x, 0.5)
    order = 0
    if prewhiten:
        u, order = ar_prewhiten(u, qmax)
    n = u.size
    sigma2 = float(u @ u / n)
    if not sigma2 > 0:
        raise DegenerateSeries("fractionally differenced series is identically zero")
    # |sum_k u_k e^{i k lam_j}| = |FFT_j|: the phase shift does not matter
    pgram = np.abs(np.fft.rfft(u, n=n)) ** 2 / n
    full = np.empty(n)
    half = pgram.size
    full[:half] = pgram
    full[half:] = pgram[1: n - half + 1][::-1]
    w = log_sine_weights(n)
    a = float(-np.sum(w * full[1:]) / n)
    big_a = float(2.0 * np.sum(w * w) / n)
    r = math.sqrt(n) * a / (sigma2 * math.sqrt(big_a))
    return RobinsonStat(n, a, sigma2, big_a, r, bool(prewhiten), order)


@dataclass(frozen=True)
class RobinsonOutcome:
    stat: RobinsonStat
    alpha: float
    critical: float
    decision: str

    @property
    def rejected(self) -> bool:
        return self.decision == "reject-nonstationarity"

    def to_dict(self):
        out = self.stat.to_dict()
        out.update(alpha=self.alpha, critical=self.critical, decision=self.decision)
        return out


def robinson_test(x, alpha: float = 0.05, prewhiten: bool = False, qmax: int = 3):
    """Reject nonstationarity when r-tilde < Phi^{-1}(alpha)."""
    if not (0.0 < alpha < 1.0):
        raise DomainError("alpha must lie in (0, 1)")
    st = robinson_statistic(x, prewhiten, qmax)
    crit = float(norm.ppf(alpha))
    decision = "reject-nonstationarity" if st.r_tilde < crit else "fail-to-reject"
    return RobinsonOutcome(st, alpha, crit, decision)
