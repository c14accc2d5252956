"""Limiting covariance matrices of the low-frequency DFT vector.

Every block entry is a double integral over the unit square of a
trigonometric product against a translation-invariant kernel
``K(x - y)``: ``-log|u|`` at the 1/f boundary, ``|u|**beta`` elsewhere.
Changing variables to the lag ``u = x - y`` leaves a one-dimensional
integral of ``K(u)`` against a closed-form trigonometric correlation,
which a Gauss-Legendre rule graded toward the singular endpoint handles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import beta as beta_fn
from scipy.special import gamma

from nonstat.errors import DomainError, EigenConvergenceError, QuadratureError

REGIMES = ("stationary", "boundary-log", "integrated", "normalized-log")
DEFAULT_RESOLUTION = 2048
CONVERGENCE_TOL = 1e-4
ZERO_CHOP = 1e-11


@dataclass(frozen=True)
class MemoryParam:
    d: float

    def __post_init__(self):
        if not (-0.5 < self.d < 1.5):
            raise DomainError(f"memory parameter d={self.d} outside (-1/2, 3/2)")

    @property
    def regime(self) -> str:
        if self.d < 0.5:
            return "stationary"
        if self.d == 0.5:
            return "boundary"
        return "integrated"

    @property
    def kernel_regime(self) -> str:
        return {"stationary": "stationary", "boundary": "boundary-log",
                "integrated": "integrated"}[self.regime]


def farima_c(d: float) -> float:
    """c(d) = 1/Gamma(d) for FARIMA(0,d,0) MA weights (d != 0)."""
    return 1.0 / gamma(d)


def extended_beta(p: float, q: float) -> float:
    """Beta(p, q) continued to p in (-1, 0) through the Gamma function."""
    if p > 0 and q > 0:
        return float(beta_fn(p, q))
    return float(gamma(p) * gamma(q) / gamma(p + q))


@dataclass(frozen=True)
class DeltaConstant:
    d: float
    sigma_eps2: float
    c_d: float | None
    sum_a: float | None
    value: float
    C: float | None = None


def delta_constant(d, sigma_eps2=1.0, c_d=None, sum_a=None) -> DeltaConstant:
    """Long-run partial-sum variance constant delta(d) for d in [-1/2, 1/2).

    ``Var(X_1 + ... + X_n)`` grows like ``delta(d) * n**(2d+1)``, or like
    ``delta(-1/2) * log(n)`` at ``d = -1/2``. When neither ``c_d`` nor
    ``sum_a`` is given, FARIMA(0,d,0) values are used: ``c(d) = 1/Gamma(d)``
    and ``sum a_i = 1`` at ``d = 0``.
    """
    d = float(d)
    if not (-0.5 <= d < 0.5):
        raise DomainError(f"delta(d) defined for d in [-1/2, 1/2), got {d}")
    if sigma_eps2 <= 0:
        raise DomainError("innovation variance must be positive")
    if d == 0.0:
        if sum_a is None:
            sum_a = 1.0
        if sum_a == 0:
            raise DomainError("sum of MA coefficients must be nonzero at d=0")
        return DeltaConstant(d, sigma_eps2, None, sum_a, sigma_eps2 * sum_a**2)
    if c_d is None:
        c_d = farima_c(d)
    if c_d == 0:
        raise DomainError("c(d) must be nonzero")
    if d == -0.5:
        return DeltaConstant(d, sigma_eps2, c_d, None, 8.0 * sigma_eps2 * c_d**2)
    big_c = sigma_eps2 * c_d**2 * extended_beta(d, 1.0 - 2.0 * d)
    return DeltaConstant(d, sigma_eps2, c_d, None, big_c / (d * (2.0 * d + 1.0)), big_c)


# -- singular quadrature ---------------------------------------------------

def graded_rule(resolution, order=16, ratio=0.2, levels=120):
    """Composite Gauss-Legendre nodes/weights on [0, 1], graded toward 0.

    ``resolution // order`` uniform panels; the first panel is split
    geometrically so integrands like ``u**p`` (p > -1) and ``log u`` are
    integrated to near machine precision.
    """
    panels = max(4, resolution // order)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    inner = (1.0 / panels) * ratio ** np.arange(levels + 1)
    edges = np.concatenate(([0.0], inner[::-1], np.arange(2, panels + 1) / panels))
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    x = (lo[:, None] + half[:, None] * (nodes[None, :] + 1.0)).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return x, w


def _int_cos(c, phase, u):
    """int_u^1 cos(c x + phase) dx, elementwise; c is 0 or |c| >= 2 pi."""
    c = np.broadcast_to(c, np.broadcast(c, phase, u).shape)
    safe = np.where(c == 0.0, 1.0, c)
    osc = (np.sin(c + phase) - np.sin(c * u + phase)) / safe
    return np.where(c == 0.0, (1.0 - u) * np.cos(phase), osc)


def lag_correlation(kind, s, u):
    """S_ij(u) = int_u^1 [f_i(x) f_j(x-u) + f_j(x) f_i(x-u)] dx for lags u >= 0.

    ``f_k`` is cos(2 pi k x) or sin(2 pi k x). Then for an even kernel
    ``K``, ``iint f_i(x) f_j(y) K(x-y) = int_0^1 K(u) S_ij(u) du``.
    Returned with shape (len(u), s, s).
    """
    u = np.asarray(u, dtype=np.float64)[:, None, None]
    k = 2.0 * np.pi * np.arange(1, s + 1)
    a = k[None, :, None]
    b = k[None, None, :]
    sign = 1.0 if kind == "cos" else -1.0
    # cos(ax)cos(b(x-u)) = [cos((a+b)x - bu) + cos((a-b)x + bu)] / 2
    # sin(ax)sin(b(x-u)) = [cos((a-b)x + bu) - cos((a+b)x - bu)] / 2
    fg = 0.5 * (sign * _int_cos(a + b, -b * u, u) + _int_cos(a - b, b * u, u))
    gf = 0.5 * (sign * _int_cos(a + b, -a * u, u) + _int_cos(b - a, a * u, u))
    return fg + gf


def _kernel_values(kernel, beta, u):
    if kernel == "log":
        return -np.log(u)
    return u**beta


def kernel_integrals(kernel, beta, kind, s, resolution):
    """Matrix of iint f_i(x) f_j(y) K(x - y) dx dy over the unit square."""
    u, w = graded_rule(resolution, levels=40)
    corr = lag_correlation(kind, s, u)
    return np.einsum("u,uij->ij", w * _kernel_values(kernel, beta, u), corr)


def power_moments(p, s, resolution):
    """int_0^1 x**p cos(2 pi k x) dx for k = 1..s, p > -1."""
    x, w = graded_rule(resolution)
    k = np.arange(1, s + 1)
    return np.cos(2.0 * np.pi * np.outer(k, x)) @ (w * x**p)


def a_matrix(d, s, resolution=DEFAULT_RESOLUTION):
    """a_ij(d) = 1 - (2d+1) int_0^1 x^{2d} (cos 2 pi i x + cos 2 pi j x) dx."""
    mom = power_moments(2.0 * d, s, resolution)
    return 1.0 - (2.0 * d + 1.0) * (mom[:, None] + mom[None, :])


# -- matrices ----------------------------------------------------------------

@dataclass(frozen=True)
class KernelMatrix:
    regime: str
    d: float | None
    s: int
    resolution: int
    cos_block: np.ndarray = field(repr=False)
    sin_block: np.ndarray = field(repr=False)

    @property
    def full(self) -> np.ndarray:
        out = np.zeros((2 * self.s, 2 * self.s))
        out[: self.s, : self.s] = self.cos_block
        out[self.s :, self.s :] = self.sin_block
        return out

    def min_eigenvalue(self) -> float:
        return min(jacobi_eigh(self.cos_block)[0].min(), jacobi_eigh(self.sin_block)[0].min())

    def to_dict(self, eigenvalues=None):
        out = {
            "regime": self.regime,
            "d": self.d,
            "s": self.s,
            "resolution": self.resolution,
            "cos_block": self.cos_block.tolist(),
            "sin_block": self.sin_block.tolist(),
        }
        if eigenvalues is not None:
            out["eigenvalues"] = list(map(float, eigenvalues))
        return out

    @classmethod
    def from_dict(cls, data):
        return cls(
            data["regime"], data["d"], int(data["s"]), int(data["resolution"]),
            np.asarray(data["cos_block"], dtype=float),
            np.asarray(data["sin_block"], dtype=float),
        )


def _check_regime(regime, d):
    if regime not in REGIMES:
        raise DomainError(f"unknown regime {regime!r}; expected one of {REGIMES}")
    if regime == "normalized-log":
        return None
    if regime == "boundary-log":
        if d not in (None, 0.5):
            raise DomainError("boundary-log regime requires d = 1/2")
        return 0.5
    mp = MemoryParam(float(d))
    if mp.kernel_regime != regime:
        raise DomainError(f"d={d} belongs to the {mp.kernel_regime} regime, not {regime}")
    return mp.d


def _raw_blocks(regime, d, s, resolution, delta):
    if regime in ("normalized-log", "boundary-log"):
        pref = 1.0 if regime == "normalized-log" else delta / 2.0
        return (pref * kernel_integrals("log", 0.0, "cos", s, resolution),
                pref * kernel_integrals("log", 0.0, "sin", s, resolution))
    if regime == "integrated":
        beta = 2.0 * d - 1.0
        pref = -delta / 2.0
        return (pref * kernel_integrals("power", beta, "cos", s, resolution),
                pref * kernel_integrals("power", beta, "sin", s, resolution))
    beta = 2.0 * d + 1.0
    ij = np.outer(np.arange(1, s + 1), np.arange(1, s + 1)).astype(float)
    ss = kernel_integrals("power", beta, "sin", s, resolution)
    cc = kernel_integrals("power", beta, "cos", s, resolution)
    cos_block = -delta * (a_matrix(d, s, resolution) + 2.0 * np.pi**2 * ij * ss)
    sin_block = -delta * 2.0 * np.pi**2 * ij * cc
    return cos_block, sin_block


def _regime_delta(regime, d, sigma_eps2, c_d, sum_a):
    if regime == "normalized-log":
        return 1.0
    increment_d = {"boundary-log": -0.5, "integrated": None, "stationary": d}[regime]
    if increment_d is None:
        increment_d = d - 1.0
    return delta_constant(increment_d, sigma_eps2, c_d, sum_a).value


def build_sigma(regime, d=None, s=1, resolution=DEFAULT_RESOLUTION, *,
                sigma_eps2=1.0, c_d=None, sum_a=None, check=False,
                tol=CONVERGENCE_TOL) -> KernelMatrix:
    """Assemble the block-diagonal limiting covariance for ``s`` frequencies.

    ``c_d``/``sum_a`` describe the stationary input (the increments in the
    integrated and boundary regimes); FARIMA values are used by default.
    With ``check=True`` the matrix is recomputed at twice the resolution and
    :class:`QuadratureError` is raised if any entry moves by more than ``tol``
    relative.
    """
    if s < 1:
        raise DomainError("s must be a positive integer")
    if resolution < 64:
        raise DomainError("resolution must be at least 64")
    d = _check_regime(regime, d)
    delta = _regime_delta(regime, d, sigma_eps2, c_d, sum_a)
    cos_block, sin_block = _raw_blocks(regime, d, s, resolution, delta)
    cos_block = _symmetrize(cos_block)
    sin_block = _symmetrize(sin_block)
    if check:
        fine_c, fine_s = map(_symmetrize, _raw_blocks(regime, d, s, 2 * resolution, delta))
        err = max(_rel_diff(cos_block, fine_c), _rel_diff(sin_block, fine_s))
        if err > tol:
            raise QuadratureError(
                f"{regime} d={d} s={s}: resolutions {resolution} and {2 * resolution} "
                f"differ by {err:.2e} relative (tol {tol:.0e})")
    return KernelMatrix(regime, d, s, resolution, cos_block, sin_block)


def _symmetrize(block):
    out = 0.5 * (block + block.T)
    # cancellation residue where the exact entry is zero (e.g. white noise)
    out[np.abs(out) < ZERO_CHOP * np.abs(out).max()] = 0.0
    return out


def _rel_diff(coarse, fine):
    return float(np.max(np.abs(coarse - fine) / (np.abs(fine) + 1e-12)))


def quadrature_drift(regime, d=None, s=1, resolution=DEFAULT_RESOLUTION, **kw):
    """Largest relative entry change between ``resolution`` and twice it."""
    a = build_sigma(regime, d, s, resolution, **kw)
    b = build_sigma(regime, d, s, 2 * resolution, **kw)
    return max(_rel_diff(a.cos_block, b.cos_block), _rel_diff(a.sin_block, b.sin_block))


def kernel_entry(regime, block, i, j, d=None, resolution=DEFAULT_RESOLUTION, *,
                 check=True, tol=CONVERGENCE_TOL, **kw) -> float:
    """Single (i, j) entry of the cos or sin block.

    ``block="cross"`` returns 0: the cos-sin blocks vanish identically and
    are never integrated.
    """
    if block == "cross":
        return 0.0
    if block not in ("cos", "sin"):
        raise DomainError("block must be 'cos', 'sin' or 'cross'")
    if i < 1 or j < 1:
        raise DomainError("frequency indices start at 1")
    s = max(i, j)
    m = build_sigma(regime, d, s, resolution, check=check, tol=tol, **kw)
    mat = m.cos_block if block == "cos" else m.sin_block
    return float(mat[i - 1, j - 1])


# -- eigen-decomposition -----------------------------------------------------

def jacobi_eigh(a, tol=1e-12, max_sweeps=100):
    """Cyclic Jacobi eigen-decomposition of a symmetric matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues in descending
    order. Stops once the off-diagonal Frobenius norm falls below ``tol``
    times the norm of the input.
    """
    a = np.array(a, dtype=np.float64, copy=True)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("square matrix required")
    v = np.eye(n)
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0.0:
        return np.diag(a).copy(), v

    mask = ~np.eye(n, dtype=bool)

    def off(m):
        return math.sqrt(np.sum(m[mask] ** 2))

    for _ in range(max_sweeps):
        if off(a) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300 or abs(apq) < 1e-18 * (abs(a[p, p]) + abs(a[q, q])):
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.hypot(1.0, t)
                sn = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - sn * aq
                a[:, q] = sn * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - sn * aq
                a[q, :] = sn * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                v[:, p] = c * vp - sn * v[:, q]
                v[:, q] = sn * vp + c * v[:, q]
    else:
        if off(a) > tol * scale:
            raise EigenConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = np.diag(a).copy()
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


@dataclass(frozen=True)
class EigenSpectrum:
    weights: np.ndarray

    @property
    def s(self) -> int:
        return (len(self.weights) - 1) // 2


def eigen_spectrum(m: KernelMatrix) -> EigenSpectrum:
    """(1, psi_1, ..., psi_2s): unit weight first, block eigenvalues descending."""
    ev = np.concatenate([jacobi_eigh(m.cos_block)[0], jacobi_eigh(m.sin_block)[0]])
    return EigenSpectrum(np.concatenate(([1.0], np.sort(ev)[::-1])))
