"""Weighted chi-square law sum_i psi_i Q_i, Q_i iid chi2(1).

The CDF is evaluated by Imhof's inversion formula. Writing the phase as
``A(u) - x u / 2`` with ``A(u) = sum(arctan(psi_i u)) / 2`` splits the
oscillatory tail into Fourier integrals of slowly varying functions,
which QUADPACK's QAWF routine handles on the half line.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from nonstat.errors import BracketError, DomainError

MC_BATCH = 100_000


class InversionWarning(RuntimeWarning):
    """CF inversion did not converge; a Monte Carlo value was returned."""


@dataclass(frozen=True)
class NullDistribution:
    weights: np.ndarray
    method: str = "cf-inversion"
    mc_draws: int = 1_000_000
    seed: int = 1

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0 or np.any(w < 0) or not np.any(w > 0):
            raise DomainError("weights must be a nonempty nonnegative vector")
        object.__setattr__(self, "weights", w)
        if self.method not in ("cf-inversion", "monte-carlo"):
            raise DomainError(f"unknown method {self.method!r}")

    @property
    def mean(self) -> float:
        return float(self.weights.sum())

    @property
    def variance(self) -> float:
        return float(2.0 * np.sum(self.weights**2))

    def with_method(self, method):
        return NullDistribution(self.weights, method, self.mc_draws, self.seed)


# -- Monte Carlo ---------------------------------------------------------------

def batch_rng(seed, batch):
    """Counter-based stream for one draw batch; independent of batch scheduling."""
    ss = np.random.SeedSequence(seed, spawn_key=(batch,))
    return np.random.Generator(np.random.Philox(ss))


def mc_sample(weights, draws, seed=1):
    """``draws`` seeded realisations of sum_i psi_i Q_i."""
    w = np.asarray(weights, dtype=np.float64)
    w = w[w > 0]
    out = np.empty(draws)
    for b, start in enumerate(range(0, draws, MC_BATCH)):
        stop = min(start + MC_BATCH, draws)
        z = batch_rng(seed, b).standard_normal((stop - start, w.size))
        out[start:stop] = (z * z) @ w
    return out


_MC_CACHE: dict = {}


def _sorted_draws(dist):
    key = (dist.weights.tobytes(), dist.mc_draws, dist.seed)
    if key not in _MC_CACHE:
        if len(_MC_CACHE) > 8:
            _MC_CACHE.clear()
        _MC_CACHE[key] = np.sort(mc_sample(dist.weights, dist.mc_draws, dist.seed))
    return _MC_CACHE[key]


# -- characteristic-function inversion -------------------------------------------

def imhof_cdf(weights, x, epsabs=1e-10):
    """P(sum psi_i Q_i <= x) by Imhof inversion.

    Returns ``(probability, converged)``.
    """
    w = np.asarray(weights, dtype=np.float64)
    w = w[w > 0]
    if x <= 0:
        return 0.0, True
    omega = 0.5 * x

    def phase(u):
        return 0.5 * np.sum(np.arctan(w * u))

    def rho(u):
        return np.prod((1.0 + (w * u) ** 2) ** 0.25)

    def full(u):
        if u == 0.0:
            return 0.5 * (w.sum() - x)
        return math.sin(phase(u) - omega * u) / (u * rho(u))

    def sin_part(u):
        return math.sin(phase(u)) / (u * rho(u))

    def cos_part(u):
        return math.cos(phase(u)) / (u * rho(u))

    # head: up to a few oscillation periods past the scale of the largest weight
    head_end = max(1.0 / w.max(), 4.0 * math.pi / omega)
    converged = True
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            head, _ = integrate.quad(full, 0.0, head_end, limit=500, epsabs=epsabs, epsrel=1e-10)
            t1, _ = integrate.quad(sin_part, head_end, np.inf, weight="cos", wvar=omega,
                                   limlst=200, epsabs=epsabs)
            t2, _ = integrate.quad(cos_part, head_end, np.inf, weight="sin", wvar=omega,
                                   limlst=200, epsabs=epsabs)
        except integrate.IntegrationWarning:
            converged = False
            return math.nan, converged
    p = 0.5 - (head + t1 - t2) / math.pi
    return min(max(p, 0.0), 1.0), converged


def null_cdf(dist: NullDistribution, x: float) -> float:
    """P(sum psi_i Q_i <= x) under ``dist``.

    If CF inversion fails to converge, the Monte Carlo value is returned
    and an :class:`InversionWarning` is issued.
    """
    if x <= 0:
        return 0.0
    if dist.method == "cf-inversion":
        p, ok = imhof_cdf(dist.weights, x)
        if ok:
            return p
        warnings.warn(f"CF inversion failed at x={x}; using Monte Carlo", InversionWarning,
                      stacklevel=2)
    draws = _sorted_draws(dist)
    return float(np.searchsorted(draws, x, side="right") / draws.size)


def critical_value(dist: NullDistribution, alpha: float, xtol: float = 1e-8) -> float:
    """alpha-quantile q(alpha) of the weighted chi-square law."""
    if not (0.0 < alpha < 1.0):
        raise DomainError("alpha must lie in (0, 1)")
    if dist.method == "monte-carlo":
        draws = _sorted_draws(dist)
        return float(draws[max(math.ceil(alpha * draws.size) - 1, 0)])
    hi = dist.mean + 20.0 * math.sqrt(dist.variance)
    f_hi = null_cdf(dist, hi) - alpha
    if f_hi <= 0:
        raise BracketError(f"CDF at upper bracket {hi:.4g} is below alpha={alpha}")
    return float(optimize.brentq(lambda x: null_cdf(dist, x) - alpha, 0.0, hi, xtol=xtol))


def quantile_csv(rows) -> str:
    """CSV text with columns alpha, s, quantile, method."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["alpha", "s", "quantile", "method"])
    for r in rows:
        writer.writerow([r["alpha"], r["s"], f"{r['quantile']:.10g}", r["method"]])
    return buf.getvalue()
