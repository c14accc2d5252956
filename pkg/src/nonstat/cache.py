"""On-disk cache for kernel matrices, spectra and null quantiles.

Location: ``$NONSTAT_CACHE_DIR`` if set, else ``~/.cache/nonstat``.
"""

from __future__ import annotations

import functools
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from nonstat import kernel, nulldist


def cache_dir() -> Path:
    root = os.environ.get("NONSTAT_CACHE_DIR")
    path = Path(root) if root else Path.home() / ".cache" / "nonstat"
    path.mkdir(parents=True, exist_ok=True)
    return path


def _atomic_write(path: Path, payload) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        json.dump(payload, fh)
    os.replace(tmp, path)


def _read(path: Path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, ValueError):
        return None


def _kernel_path(regime, d, s, resolution):
    tag = "none" if d is None else repr(float(d))
    return cache_dir() / f"kernel_{regime}_{tag}_{s}_{resolution}.json"


@functools.lru_cache(maxsize=256)
def cached_kernel(regime, d=None, s=1, resolution=kernel.DEFAULT_RESOLUTION):
    """(KernelMatrix, EigenSpectrum) for FARIMA-default constants, memoised on disk."""
    path = _kernel_path(regime, d, s, resolution)
    data = _read(path)
    if data is not None and "eigenvalues" in data:
        m = kernel.KernelMatrix.from_dict(data)
        return m, kernel.EigenSpectrum(np.asarray(data["eigenvalues"], dtype=float))
    m = kernel.build_sigma(regime, d, s, resolution)
    spec = kernel.eigen_spectrum(m)
    _atomic_write(path, m.to_dict(eigenvalues=spec.weights))
    return m, spec


def null_spectrum(s, resolution=kernel.DEFAULT_RESOLUTION):
    """Weights (1, psi_1, ..., psi_2s) of the limiting null law."""
    return cached_kernel("normalized-log", None, int(s), int(resolution))[1].weights


@functools.lru_cache(maxsize=1024)
def null_quantile(s, alpha, resolution=kernel.DEFAULT_RESOLUTION, method="cf-inversion"):
    """q(alpha, s), memoised on disk keyed by (s, alpha, resolution, method)."""
    path = cache_dir() / "quantiles.json"
    key = f"{int(s)}|{float(alpha)!r}|{int(resolution)}|{method}"
    table = _read(path) or {}
    if key in table:
        return float(table[key])
    dist = nulldist.NullDistribution(null_spectrum(s, resolution), method=method)
    q = nulldist.critical_value(dist, alpha)
    table = _read(path) or {}
    table[key] = q
    _atomic_write(path, table)
    return q
