import importlib
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonstat import _core, _kernels_py, dgp
from nonstat.errors import LevinsonBreakdown

try:
    from nonstat import _kernels as _ext
except ImportError:  # extension not built
    _ext = None

needs_ext = pytest.mark.skipif(_ext is None, reason="compiled extension not available")
BACKENDS = [_kernels_py] + ([_ext] if _ext is not None else [])


def test_backend_selected():
    assert _core.BACKEND == ("cython" if _ext is not None else "python")


def test_env_forces_fallback():
    code = "from nonstat import _core; print(_core.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env=os.environ | {"NONSTAT_PURE_PYTHON": "1"}).stdout.strip()
    assert out == "python"


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
class TestEachBackend:
    def test_trig_sums(self, impl):
        x = np.random.default_rng(0).standard_normal(500)
        c, s = impl.trig_sums(x, 4)
        k = np.arange(1, 501)
        lam = 2 * np.pi * np.arange(1, 5) / 500
        np.testing.assert_allclose(c, np.cos(np.outer(lam, k)) @ x, atol=1e-11)
        np.testing.assert_allclose(s, np.sin(np.outer(lam, k)) @ x, atol=1e-11)

    def test_frac_diff(self, impl):
        x = np.random.default_rng(1).standard_normal(60)
        w = np.concatenate(([1.0], np.cumprod((np.arange(1, 60) - 1.5) / np.arange(1, 60))))
        ref = np.array([w[: t + 1] @ x[t::-1] for t in range(60)])
        np.testing.assert_allclose(impl.frac_diff_filter(x, 0.5), ref, atol=1e-12)

    def test_tvar_filter(self, impl):
        rng = np.random.default_rng(2)
        coef, z = rng.uniform(-0.9, 1.0, 50), rng.standard_normal(50)
        ref, prev = np.empty(50), 0.3
        for t in range(50):
            prev = coef[t] * prev + z[t]
            ref[t] = prev
        np.testing.assert_allclose(impl.tvar_filter(coef, z, 0.3), ref, rtol=1e-12)

    def test_ar1_panel_sum(self, impl):
        rng = np.random.default_rng(3)
        phi, x0, eps = rng.uniform(0, 0.99, 7), rng.standard_normal(7), rng.standard_normal((30, 7))
        state, ref = x0.copy(), np.empty(30)
        for t in range(30):
            state = phi * state + eps[t]
            ref[t] = state.sum()
        np.testing.assert_allclose(impl.ar1_panel_sum(phi, x0, eps), ref, rtol=1e-12)

    def test_levinson_breakdown(self, impl):
        with pytest.raises(LevinsonBreakdown):
            impl.durbin_levinson_sample(np.array([1.0, 1.0, 1.0]), np.ones(3))


@needs_ext
@given(st.integers(16, 400), st.floats(-0.49, 0.49), st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_backends_agree(n, d, seed):
    rng = np.random.default_rng(seed)
    e = rng.standard_normal(n)
    acf = dgp.farima_acf_vector(d, n)
    np.testing.assert_allclose(_ext.durbin_levinson_sample(acf, e),
                               _kernels_py.durbin_levinson_sample(acf, e), rtol=1e-10, atol=1e-12)
    x = np.cumsum(e)
    for a, b in zip(_ext.trig_sums(x, 5), _kernels_py.trig_sums(x, 5)):
        np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-9)
    np.testing.assert_allclose(_ext.frac_diff_filter(x, 0.5), _kernels_py.frac_diff_filter(x, 0.5),
                               rtol=1e-10, atol=1e-10)
