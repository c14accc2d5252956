import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma

import oracles
from nonstat import kernel
from nonstat.errors import DomainError, QuadratureError

D_GRID = [-0.4, -0.2, 0.0, 0.2, 0.4, 0.5, 0.7, 1.0, 1.3]


def _regime(d):
    return kernel.MemoryParam(d).kernel_regime


class TestMemoryParam:
    @pytest.mark.parametrize("d,regime", [(-0.3, "stationary"), (0.0, "stationary"),
                                          (0.5, "boundary"), (0.51, "integrated"),
                                          (1.49, "integrated")])
    def test_regime_classification(self, d, regime):
        assert kernel.MemoryParam(d).regime == regime

    @pytest.mark.parametrize("d", [-0.5, 1.5, 2.0, -1.0])
    def test_rejects_out_of_range(self, d):
        with pytest.raises(DomainError):
            kernel.MemoryParam(d)


class TestDeltaConstant:
    def test_white_noise(self):
        assert kernel.delta_constant(0.0, 1.0, sum_a=1.0).value == 1.0

    def test_boundary_value(self):
        dc = kernel.delta_constant(-0.5, 1.0, c_d=1.0 / gamma(-0.5))
        assert dc.value == pytest.approx(2.0 / math.pi, rel=1e-13)

    def test_d03_against_gamma_formula(self):
        expected = gamma(0.4) / (gamma(0.3) * gamma(0.7) * 0.3 * 1.6)
        dc = kernel.delta_constant(0.3, 1.0, c_d=1.0 / gamma(0.3))
        assert dc.value == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("d", [-0.45, -0.3, -0.1, 0.1, 0.25, 0.45])
    def test_matches_mpmath_oracle_and_positive(self, d):
        v = kernel.delta_constant(d).value
        assert v > 0
        assert v == pytest.approx(oracles.delta_oracle(d), rel=1e-10)

    def test_sigma_scales_linearly(self):
        assert kernel.delta_constant(0.2, 2.5).value == pytest.approx(
            2.5 * kernel.delta_constant(0.2).value)

    @pytest.mark.parametrize("kw", [dict(d=0.5), dict(d=-0.6), dict(d=0.1, c_d=0.0),
                                    dict(d=0.0, sum_a=0.0), dict(d=0.1, sigma_eps2=0.0)])
    def test_domain_errors(self, kw):
        with pytest.raises(DomainError):
            kernel.delta_constant(**kw)


class TestQuadratureRule:
    @pytest.mark.parametrize("p", [-0.8, -0.4, 0.0, 0.6, 1.6])
    def test_power_integrals(self, p):
        x, w = kernel.graded_rule(256)
        assert np.sum(w * x**p) == pytest.approx(1.0 / (p + 1.0), rel=1e-12)

    def test_log_integral(self):
        x, w = kernel.graded_rule(256, levels=40)
        assert np.sum(w * np.log(x)) == pytest.approx(-1.0, rel=1e-12)


class TestKernelEntry:
    def test_a_matrix_is_one_at_d0(self):
        np.testing.assert_allclose(kernel.a_matrix(0.0, 6), np.ones((6, 6)), atol=1e-13)

    def test_stationary_cos_entry_d0(self):
        # a_12(0) = 1; the remaining integral vanishes off the diagonal
        assert kernel.kernel_entry("stationary", "cos", 1, 2, d=0.0) == pytest.approx(0.0, abs=1e-12)

    def test_cross_block_is_zero(self):
        assert kernel.kernel_entry("boundary-log", "cross", 3, 2, d=0.5) == 0.0

    def test_normalized_log_v11_against_grid(self):
        ref = oracles.grid_kernel_block("log", 0, "cos", 1, 4096)[0, 0]
        got = kernel.kernel_entry("normalized-log", "cos", 1, 1)
        assert abs(got - ref) < 1e-4 * abs(ref)

    @pytest.mark.parametrize("block", ["row", "diag"])
    def test_bad_block(self, block):
        with pytest.raises(DomainError):
            kernel.kernel_entry("normalized-log", block, 1, 1)

    def test_bad_index(self):
        with pytest.raises(DomainError):
            kernel.kernel_entry("normalized-log", "cos", 0, 1)


class TestBuildSigma:
    @pytest.mark.parametrize("regime,d", [("normalized-log", None), ("boundary-log", 0.5),
                                          ("integrated", 0.7), ("integrated", 1.0),
                                          ("integrated", 1.3), ("stationary", -0.3),
                                          ("stationary", 0.2), ("stationary", 0.4)])
    def test_matches_grid_oracle(self, regime, d):
        m = kernel.build_sigma(regime, d, s=3)
        cos_ref, sin_ref = oracles.grid_sigma(regime, d, s=3, n_grid=4096)
        scale = max(np.abs(cos_ref).max(), np.abs(sin_ref).max())
        np.testing.assert_allclose(m.cos_block, cos_ref, atol=2e-4 * scale)
        np.testing.assert_allclose(m.sin_block, sin_ref, atol=2e-4 * scale)

    def test_normalized_log_s1_is_diagonal(self):
        m = kernel.build_sigma("normalized-log", s=1)
        full = m.full
        assert full.shape == (2, 2)
        assert full[0, 1] == full[1, 0] == 0.0
        assert full[0, 0] == pytest.approx(0.2257058, abs=1e-6)
        assert full[1, 1] == pytest.approx(0.3491988, abs=1e-6)

    def test_integrated_d1_closed_form(self):
        m = kernel.build_sigma("integrated", 1.0, s=2)
        # -(1/2) iint cos cos |x-y| = delta_ij / (8 pi^2 i^2); sin gives (1 + delta_ij/2)/(4 pi^2 ij)
        cos_ref = np.diag([1.0 / (8 * np.pi**2), 1.0 / (32 * np.pi**2)])
        sin_ref = np.array([[1.5, 1.0 / 2], [1.0 / 2, 1.5 / 4]]) / (4 * np.pi**2)
        np.testing.assert_allclose(m.cos_block, cos_ref, atol=1e-12)
        np.testing.assert_allclose(m.sin_block, sin_ref, atol=1e-12)

    def test_white_noise_is_half_identity(self):
        m = kernel.build_sigma("stationary", 0.0, s=4)
        np.testing.assert_allclose(m.full, 0.5 * np.eye(8), atol=1e-12)

    @pytest.mark.parametrize("d", [0.2, 0.7, 1.0])
    def test_matches_exact_finite_n_covariance(self, d):
        exact = oracles.exact_dft_covariance(d, 8192, 2)
        m = kernel.build_sigma(_regime(d), d, s=2).full
        np.testing.assert_allclose(np.diag(exact), np.diag(m), rtol=0.02)
        corr = lambda c: c / np.sqrt(np.outer(np.diag(c), np.diag(c)))
        np.testing.assert_allclose(corr(exact), corr(m), atol=0.01)

    @pytest.mark.parametrize("regime,d", [("normalized-log", None), ("integrated", 1.2),
                                          ("stationary", 0.3)])
    def test_blocks_exactly_symmetric(self, regime, d):
        m = kernel.build_sigma(regime, d, s=6)
        assert np.array_equal(m.cos_block, m.cos_block.T)
        assert np.array_equal(m.sin_block, m.sin_block.T)

    def test_integrated_not_continuous_to_boundary(self):
        near = kernel.build_sigma("integrated", 0.7, s=3)
        boundary = kernel.build_sigma("boundary-log", 0.5, s=3)
        assert not np.allclose(near.cos_block, boundary.cos_block, rtol=1e-2)

    def test_regime_mismatch(self):
        with pytest.raises(DomainError):
            kernel.build_sigma("stationary", 0.7, s=1)
        with pytest.raises(DomainError):
            kernel.build_sigma("boundary-log", 0.4, s=1)
        with pytest.raises(DomainError):
            kernel.build_sigma("nope", 0.4, s=1)

    def test_convergence_check_raises_at_low_resolution(self):
        with pytest.raises(QuadratureError):
            kernel.build_sigma("stationary", 0.45, s=10, resolution=64, check=True, tol=1e-14)

    def test_json_round_trip(self):
        m = kernel.build_sigma("normalized-log", s=3)
        spec = kernel.eigen_spectrum(m)
        data = json.loads(json.dumps(m.to_dict(spec.weights)))
        back = kernel.KernelMatrix.from_dict(data)
        assert np.array_equal(back.cos_block, m.cos_block)
        assert data["eigenvalues"][0] == 1.0
        assert set(data) == {"regime", "d", "s", "resolution", "cos_block", "sin_block",
                             "eigenvalues"}


class TestLemmaOne:
    @pytest.mark.parametrize("d", D_GRID)
    @pytest.mark.parametrize("s", [1, 5])
    def test_positive_definite(self, d, s):
        m = kernel.build_sigma(_regime(d), d, s=s)
        assert m.min_eigenvalue() > 0

    @pytest.mark.parametrize("d", [-0.4, 0.5, 1.3])
    def test_quadrature_drift(self, d):
        assert kernel.quadrature_drift(_regime(d), d, s=5, resolution=1024) < 1e-4


class TestJacobi:
    @given(st.integers(1, 9), st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_matches_lapack(self, n, seed):
        a = np.random.default_rng(seed).standard_normal((n, n))
        a = a + a.T
        w, v = kernel.jacobi_eigh(a)
        np.testing.assert_allclose(w, np.linalg.eigvalsh(a)[::-1], atol=1e-10 * max(1, np.abs(a).max()))
        np.testing.assert_allclose(v @ np.diag(w) @ v.T, a, atol=1e-9 * max(1, np.abs(a).max()))
        assert np.all(np.diff(w) <= 0)

    def test_diagonal_input(self):
        w, v = kernel.jacobi_eigh(np.diag([1.0, 3.0, 2.0]))
        np.testing.assert_array_equal(w, [3.0, 2.0, 1.0])

    def test_nonsquare(self):
        with pytest.raises(ValueError):
            kernel.jacobi_eigh(np.ones((2, 3)))


class TestEigenSpectrum:
    def test_s1_spectrum_is_diagonal(self):
        m = kernel.build_sigma("normalized-log", s=1)
        w = kernel.eigen_spectrum(m).weights
        assert w[0] == 1.0
        assert sorted(w[1:]) == sorted([m.cos_block[0, 0], m.sin_block[0, 0]])

    @pytest.mark.parametrize("regime,d,s", [("normalized-log", None, 7), ("stationary", 0.3, 4),
                                            ("integrated", 0.9, 5)])
    def test_trace_identity(self, regime, d, s):
        m = kernel.build_sigma(regime, d, s=s)
        w = kernel.eigen_spectrum(m).weights
        assert w[1:].sum() == pytest.approx(np.trace(m.cos_block) + np.trace(m.sin_block), abs=1e-10)

    def test_s10_all_positive(self):
        w = kernel.eigen_spectrum(kernel.build_sigma("normalized-log", s=10)).weights
        assert w.size == 21 and w[0] == 1.0 and np.all(w[1:] > 0)
        assert np.all(np.diff(w[1:]) <= 0)

    def test_union_of_block_eigenvalues(self):
        m = kernel.build_sigma("normalized-log", s=4)
        w = kernel.eigen_spectrum(m).weights[1:]
        ref = np.sort(np.concatenate([np.linalg.eigvalsh(m.cos_block),
                                      np.linalg.eigvalsh(m.sin_block)]))[::-1]
        np.testing.assert_allclose(w, ref, atol=1e-12)
