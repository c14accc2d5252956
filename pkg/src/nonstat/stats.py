"""Low-frequency spectral statistics and the nonstationarity test.

Periodogram convention: ``I_n(lam_j) = |sum_{k=1}^n X_k exp(i k lam_j)|**2 / n``
with ``lam_j = 2 pi j / n``. Logarithms are natural throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from nonstat import _core
from nonstat.errors import DegenerateSeries, DomainError

MIN_LENGTH = 16
VARIANTS = ("Q", "Qtilde")


def as_series(x, min_length=MIN_LENGTH) -> np.ndarray:
    """Validate and convert to a 1-D float array of at least ``min_length``."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise DomainError("series must be one-dimensional")
    if arr.size < min_length:
        raise DomainError(f"series length {arr.size} < {min_length}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("series contains non-finite values")
    return arr


def fourier_sums(x, s):
    """(sum_k x_k cos(k lam_j), sum_k x_k sin(k lam_j)) for j = 1..s."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    return _core.trig_sums(x, int(s))


def periodogram(x, j: int) -> float:
    x = as_series(x, min_length=2)
    n = x.size
    if not (1 <= j <= n - 1):
        raise DomainError(f"frequency index {j} outside 1..{n - 1}")
    c, s = _core.trig_sums(np.ascontiguousarray(x), j)
    return float((c[-1] ** 2 + s[-1] ** 2) / n)


def periodogram_ordinates(x, s) -> np.ndarray:
    """I_n(lam_j) for j = 1..s."""
    c, sn = fourier_sums(x, s)
    return (c**2 + sn**2) / len(x)


@dataclass(frozen=True)
class DftVector:
    n: int
    s: int
    d_norm: float
    cos_parts: np.ndarray
    sin_parts: np.ndarray

    @property
    def frequencies(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(1, self.s + 1) / self.n

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.cos_parts, self.sin_parts])


def dft_vector(x, s: int, d: float) -> DftVector:
    """Normalised DFT components n^{-(1/2+d)} sum_k {cos, sin}(k lam_j) x_k."""
    x = as_series(x, min_length=2)
    n = x.size
    if not (1 <= s <= (n - 1) / 2):
        raise DomainError(f"need 1 <= s <= (n-1)/2, got s={s}, n={n}")
    c, sn = fourier_sums(x, s)
    scale = float(n) ** (0.5 + d)
    return DftVector(n, s, float(d), c / scale, sn / scale)


def endpoint_contrast(x) -> float:
    """D_n: mean of the first m values minus mean of the last m, m = floor(sqrt(n))."""
    x = as_series(x, min_length=1)
    m = math.isqrt(x.size)
    return float((x[:m].sum() - x[-m:].sum()) / m)


class QStatistic(NamedTuple):
    statistic: float
    dn_term: float
    periodogram_term: float


def q_statistic(x, s: int, variant: str = "Q") -> QStatistic:
    """Q_n(s) (default) or the log(n)-scaled variant Qtilde_n(s).

    Both start with D_n^2 / ((1/n) sum (X_k - mean)^2). The periodogram
    term is ``sum_j I_n(lam_j)`` divided by ``sum (X_k - mean)^2 / log(k+1)``
    for Q, or by ``sum (X_k - mean)^2 / log(n)`` for Qtilde.
    """
    if variant not in VARIANTS:
        raise DomainError(f"variant must be one of {VARIANTS}")
    x = as_series(x)
    n = x.size
    if not (1 <= s <= (n - 1) / 2):
        raise DomainError(f"need 1 <= s <= (n-1)/2, got s={s}, n={n}")
    dev2 = (x - x.mean()) ** 2
    ss = dev2.sum()
    if not ss > 0.0 or ss <= 1e-28 * np.sum(x * x):
        raise DegenerateSeries("series has zero sample variance")
    dn = endpoint_contrast(x)
    dn_term = dn * dn / (ss / n)
    pg = periodogram_ordinates(x, s).sum()
    if variant == "Q":
        weights = np.log(np.arange(2, n + 2, dtype=np.float64))
        pg_term = pg / np.sum(dev2 / weights)
    else:
        pg_term = math.log(n) * pg / ss
    return QStatistic(float(dn_term + pg_term), float(dn_term), float(pg_term))


@dataclass(frozen=True)
class TestOutcome:
    variant: str
    statistic: float
    n: int
    s: int
    alpha: float
    critical_low: float
    critical_high: float | None
    decision: str
    dn_term: float
    periodogram_term: float

    @property
    def rejected(self) -> bool:
        return self.decision != "fail-to-reject"

    def to_dict(self):
        return {
            "n": self.n,
            "s": self.s,
            "alpha": self.alpha,
            "variant": self.variant,
            "statistic": self.statistic,
            "critical_low": self.critical_low,
            "critical_high": self.critical_high,
            "decision": self.decision,
            "dn_term": self.dn_term,
            "periodogram_term": self.periodogram_term,
        }


def decide(statistic, low, high=None) -> str:
    """Strict inequalities: a statistic equal to a critical value is not rejected."""
    if high is None:
        return "reject-nonstationarity" if statistic < low else "fail-to-reject"
    return "reject-two-sided" if (statistic < low or statistic > high) else "fail-to-reject"


def run_test(x, s: int = 10, alpha: float = 0.05, variant: str = "Q",
             two_sided: bool = False, *, quantile=None) -> TestOutcome:
    """Test H0 (d >= 1/2 or deterministic trend) against stationarity.

    One-sided: reject when the statistic falls below q(alpha, s). With
    ``two_sided`` this becomes the 1/f test of d = 1/2, rejecting outside
    [q(alpha/2, s), q(1 - alpha/2, s)]. ``quantile(s, alpha)`` defaults to
    the cached CF-inversion quantile.
    """
    if not (0.0 < alpha < 1.0):
        raise DomainError("alpha must lie in (0, 1)")
    if quantile is None:
        from nonstat.cache import null_quantile as quantile
    x = as_series(x)
    stat = q_statistic(x, s, variant)
    if two_sided:
        low, high = quantile(s, alpha / 2.0), quantile(s, 1.0 - alpha / 2.0)
    else:
        low, high = quantile(s, alpha), None
    return TestOutcome(variant, stat.statistic, x.size, s, alpha, low, high,
                       decide(stat.statistic, low, high), stat.dn_term, stat.periodogram_term)
