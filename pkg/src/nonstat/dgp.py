"""Seeded data-generating processes for the simulation designs.

* ``farima``: FARIMA(p,d,0), p in {0,1}, Gaussian innovations. Stationary
  memory is sampled exactly by Durbin-Levinson; d >= 1/2 cumulates a
  stationary sample at memory d - 1 (X_0 = 0).
* ``aggregated``: normalised sum of M AR(1) panels whose coefficients
  are square roots of Beta(a, b) variates.
* ``renewal``: X_t = a_t X_{t-1} + zeta_t, a_t switching between 1 and c
  over power-law distributed regime durations.
* ``break``: stationary FARIMA plus a level shift at n/2, or a sampled
  trend n**beta g(t/n).
"""

from __future__ import annotations

import functools
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import gamma, gammaln, zeta

from nonstat import _core
from nonstat.errors import DomainError
from nonstat.seeding import make_rng

KINDS = ("farima", "aggregated", "renewal", "break")
ZETA_TABLE_SIZE = 1_000_000

_PARAMS = {
    "farima": ("d", "phi"),
    "aggregated": ("a", "b", "M"),
    "renewal": ("c", "p", "alpha"),
    "break": ("d", "phi", "delta_break", "beta"),
}


@dataclass(frozen=True)
class DgpSpec:
    kind: str
    n: int
    d: float = 0.0
    phi: float = 0.0
    a: float = 1.0
    b: float = 1.5
    M: int = 1000
    c: float = 0.5
    p: float = 0.5
    alpha: float = 3.5
    delta_break: float = 0.0
    beta: float = 0.0
    trend: tuple | None = field(default=None, repr=False)
    seed: int = 0
    burn_in: int = 1000

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown DGP kind {self.kind!r}")
        if self.n < 16:
            raise DomainError("n must be at least 16")
        if self.burn_in < 0:
            raise DomainError("burn_in must be nonnegative")
        if self.kind == "farima" and not (-0.5 < self.d < 1.5):
            raise DomainError("farima needs d in (-1/2, 3/2)")
        if self.kind == "break" and not (-0.5 < self.d < 0.5):
            raise DomainError("break design needs stationary d in (-1/2, 1/2)")
        if self.kind in ("farima", "break") and not (-1.0 < self.phi < 1.0):
            raise DomainError("AR coefficient must lie in (-1, 1)")
        if self.kind == "aggregated":
            if self.a <= 0:
                raise DomainError("aggregated design needs a > 0")
            if self.b <= 1:
                raise DomainError("aggregated design needs b > 1 for the limit process to exist")
            if self.M < 1:
                raise DomainError("M must be at least 1")
        if self.kind == "renewal":
            if not (0 < self.c < 1 and 0 < self.p < 1 and 3 < self.alpha < 4):
                raise DomainError("renewal design needs c, p in (0,1) and alpha in (3,4)")
        if self.kind == "break":
            if self.delta_break < 0 or self.beta < 0:
                raise DomainError("delta_break and beta must be nonnegative")
        if self.trend is not None:
            object.__setattr__(self, "trend", tuple(float(v) for v in self.trend))

    @property
    def implied_d(self) -> float:
        """Memory parameter of the design (d = 1 - b/2 for aggregation)."""
        if self.kind == "aggregated":
            return 1.0 - self.b / 2.0
        if self.kind == "renewal":
            return (4.0 - self.alpha) / 2.0
        return self.d

    def params(self) -> dict:
        return {k: getattr(self, k) for k in _PARAMS[self.kind]}

    def to_dict(self) -> dict:
        out = asdict(self)
        if out["trend"] is not None:
            out["trend"] = list(out["trend"])
        return out

    def replace(self, **kw) -> "DgpSpec":
        data = asdict(self)
        data.update(kw)
        return DgpSpec(**data)


# -- FARIMA -------------------------------------------------------------------

def farima_acf(d: float, h) -> np.ndarray | float:
    """Autocovariance of FARIMA(0,d,0) with unit innovation variance.

    gamma(0) = Gamma(1-2d)/Gamma(1-d)^2 and
    gamma(h) = gamma(h-1) (h-1+d)/(h-d). Valid for -1/2 <= d < 1/2.
    """
    if not (-0.5 <= d < 0.5):
        raise DomainError(f"farima_acf needs d in [-1/2, 1/2), got {d}")
    h_arr = np.asarray(h)
    if np.any(h_arr < 0):
        raise DomainError("lag must be nonnegative")
    hmax = int(h_arr.max()) if h_arr.size else 0
    g = farima_acf_vector(d, hmax + 1)
    out = g[h_arr.astype(int)]
    return float(out) if np.ndim(out) == 0 else out


def farima_acf_vector(d: float, n: int) -> np.ndarray:
    """gamma(0), ..., gamma(n-1)."""
    if not (-0.5 <= d < 0.5):
        raise DomainError(f"farima_acf needs d in [-1/2, 1/2), got {d}")
    g = np.empty(n)
    g[0] = gamma(1.0 - 2.0 * d) / gamma(1.0 - d) ** 2
    if n > 1:
        h = np.arange(1, n, dtype=np.float64)
        g[1:] = g[0] * np.cumprod((h - 1.0 + d) / (h - d))
    return g


def farima_acf_constant(d: float) -> float:
    """C(d) in gamma(h) ~ C(d) h^{2d-1} for FARIMA(0,d,0), d != 0."""
    return gamma(1.0 - 2.0 * d) / (gamma(d) * gamma(1.0 - d))


def partial_sum_variance(acf: np.ndarray, n: int) -> float:
    """Var(Y_1 + ... + Y_n) = sum_{|h|<n} (n - |h|) gamma(h)."""
    h = np.arange(1, n, dtype=np.float64)
    return float(n * acf[0] + 2.0 * np.sum((n - h) * acf[1:n]))


def stationary_farima(d, n, rng, phi=0.0, burn_in=1000):
    """Exact Gaussian FARIMA(0,d,0), then optionally an AR(1) filter."""
    total = n + (burn_in if phi != 0.0 else 0)
    e = rng.standard_normal(total)
    y = _core.durbin_levinson_sample(farima_acf_vector(d, total), e)
    if phi != 0.0:
        y = _core.tvar_filter(np.full(total, float(phi)), y, 0.0)[total - n:]
    return y


def simulate_farima(spec: DgpSpec, rng=None) -> np.ndarray:
    if spec.kind not in ("farima", "break"):
        raise DomainError("simulate_farima needs a farima spec")
    rng = make_rng(spec.seed) if rng is None else rng
    if spec.d < 0.5:
        return stationary_farima(spec.d, spec.n, rng, spec.phi, spec.burn_in)
    return np.cumsum(stationary_farima(spec.d - 1.0, spec.n, rng, spec.phi, spec.burn_in))


# -- aggregated random-coefficient AR(1) ------------------------------------------

def aggregated_acf(a: float, b: float, h) -> np.ndarray:
    """Limit autocovariance Gamma(a+b)Gamma(a+h/2) / ((b-1)Gamma(a)Gamma(a+b-1+h/2))."""
    h = np.asarray(h, dtype=np.float64)
    logv = gammaln(a + b) + gammaln(a + h / 2.0) - gammaln(a) - gammaln(a + b - 1.0 + h / 2.0)
    return np.exp(logv) / (b - 1.0)


def simulate_aggregated(spec: DgpSpec, rng=None) -> np.ndarray:
    if spec.kind != "aggregated":
        raise DomainError("simulate_aggregated needs an aggregated spec")
    rng = make_rng(spec.seed) if rng is None else rng
    phi = np.sqrt(rng.beta(spec.a, spec.b, size=spec.M))
    x0 = rng.standard_normal(spec.M) / np.sqrt(1.0 - phi**2)
    eps = rng.standard_normal((spec.n, spec.M))
    total = _core.ar1_panel_sum(phi, x0, eps)
    return total / np.sqrt(spec.M)


# -- renewal regime-switching AR(1) ---------------------------------------------

@functools.lru_cache(maxsize=16)
def _zeta_cdf(alpha: float) -> np.ndarray:
    k = np.arange(1, ZETA_TABLE_SIZE + 1, dtype=np.float64)
    return np.cumsum(k**-alpha) / zeta(alpha)


def draw_durations(alpha: float, size: int, rng) -> np.ndarray:
    """Draws from P(D = k) = k^-alpha / zeta(alpha), k >= 1.

    Inverse CDF on a table of the first ``ZETA_TABLE_SIZE`` masses; the
    remaining tail uses a continuous Pareto approximation.
    """
    cdf = _zeta_cdf(float(alpha))
    u = rng.random(size)
    out = np.searchsorted(cdf, u, side="left").astype(np.int64) + 1
    tail = u > cdf[-1]
    if np.any(tail):
        resid = np.maximum(1.0 - u[tail], np.finfo(float).tiny)
        k = (resid * (alpha - 1.0) * zeta(alpha)) ** (-1.0 / (alpha - 1.0)) + 0.5
        # cap keeps the int64 cast finite; such durations exceed any series length
        k = np.clip(np.ceil(k), ZETA_TABLE_SIZE + 1, 2.0**62)
        out[tail] = k.astype(np.int64)
    return out


def mean_duration(alpha: float) -> float:
    return float(zeta(alpha - 1.0) / zeta(alpha))


def renewal_coefficients(spec: DgpSpec, total: int, rng) -> np.ndarray:
    chunk = max(16, int(total / mean_duration(spec.alpha)) + 16)
    coefs, filled = [], 0
    while filled < total:
        dur = draw_durations(spec.alpha, chunk, rng)
        level = np.where(rng.random(chunk) < spec.p, 1.0, spec.c)
        coefs.append(np.repeat(level, dur))
        filled += int(dur.sum())
    return np.concatenate(coefs)[:total]


def simulate_renewal(spec: DgpSpec, rng=None) -> np.ndarray:
    if spec.kind != "renewal":
        raise DomainError("simulate_renewal needs a renewal spec")
    rng = make_rng(spec.seed) if rng is None else rng
    total = spec.n + spec.burn_in
    z = rng.standard_normal(total)
    coef = renewal_coefficients(spec, total, rng)
    return _core.tvar_filter(coef, z, 0.0)[spec.burn_in:]


# -- structural break / deterministic trend ----------------------------------------

def simulate_break(spec: DgpSpec, rng=None) -> np.ndarray:
    if spec.kind != "break":
        raise DomainError("simulate_break needs a break spec")
    y = simulate_farima(spec, rng)
    n = spec.n
    if spec.trend is not None:
        grid = np.linspace(0.0, 1.0, len(spec.trend))
        t = np.arange(1, n + 1) / n
        return y + float(n) ** spec.beta * np.interp(t, grid, spec.trend)
    shift = np.zeros(n)
    shift[n // 2:] = spec.delta_break
    return y + shift


_SIMULATORS = {
    "farima": simulate_farima,
    "aggregated": simulate_aggregated,
    "renewal": simulate_renewal,
    "break": simulate_break,
}


def simulate(spec: DgpSpec, rng=None) -> np.ndarray:
    """Dispatch on ``spec.kind``; ``rng`` defaults to a stream keyed by ``spec.seed``."""
    return _SIMULATORS[spec.kind](spec, rng)
