"""Symmetric-matrix kernel against independent oracles.

sigma_k is cross-checked against the principal-minor sum, the Jacobi solver
against numpy's LAPACK path, the Vandermonde solver against a dense solve.
Newton's identities are exercised as round-trip properties.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isopar.errors import ConditioningError, IllPosedMomentsError
from isopar.symmat import (
    Spectrum,
    SymmetricMatrix,
    eigensolve,
    eigh_jacobi,
    newton_rho_from_sigma,
    newton_sigma_from_rho,
    rho_k,
    sigma_k,
    sigma_k_minor_sum,
    spectrum_from_moments,
    vandermonde_solve,
)


def random_symmetric(n, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) * scale
    return SymmetricMatrix((a + a.T) / 2.0)


values_lists = st.lists(
    st.floats(min_value=-10.0, max_value=10.0, allow_nan=False),
    min_size=1,
    max_size=8,
)


class TestSymmetricMatrix:
    def test_symmetrizes_roundoff(self):
        a = np.array([[1.0, 2.0], [2.0 + 1e-12, 3.0]])
        m = SymmetricMatrix(a)
        assert m.entries[0, 1] == m.entries[1, 0]

    def test_rejects_genuine_asymmetry(self):
        with pytest.raises(ValueError, match="not symmetric"):
            SymmetricMatrix(np.array([[1.0, 2.0], [2.5, 3.0]]))

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            SymmetricMatrix(np.zeros((2, 3)))

    def test_entries_frozen(self):
        m = random_symmetric(3, 0)
        with pytest.raises(ValueError):
            m.entries[0, 0] = 5.0


class TestJacobi:
    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 16])
    def test_matches_lapack(self, n):
        m = random_symmetric(n, seed=n)
        w, v = eigh_jacobi(m.entries)
        w_ref = np.linalg.eigh(m.entries)[0][::-1]
        assert np.max(np.abs(w - w_ref)) < 1e-10
        # v diagonalizes: columns are eigenvectors for the sorted values.
        assert np.max(np.abs(m.entries @ v - v * w)) < 1e-10
        assert np.max(np.abs(v.T @ v - np.eye(n))) < 1e-12

    def test_handles_tiny_offdiagonal_mass(self):
        # The convergence readout must not stall on cancellation noise when
        # the diagonal dominates the Frobenius norm.
        d = np.diag([8.8, -8.8, 8.4, -6.4, -2.1])
        d[0, 3] = d[3, 0] = 3.0
        w, _ = eigh_jacobi(d)
        w_ref = np.linalg.eigh(d)[0][::-1]
        assert np.max(np.abs(w - w_ref)) < 1e-12

    def test_zero_matrix(self):
        w, _ = eigh_jacobi(np.zeros((4, 4)))
        assert np.all(w == 0.0)

    def test_known_eigenvalues(self):
        m = SymmetricMatrix(np.array([[2.0, 1.0], [1.0, 2.0]]))
        w, _ = eigh_jacobi(m.entries)
        assert np.allclose(w, [3.0, 1.0], atol=1e-14)


class TestSpectrum:
    def test_clustering(self):
        s = Spectrum.from_values([1.0, 1.0 + 1e-9, 3.0, -2.0])
        assert s.multiplicities() == (1, 2, 1)
        assert s.distinct()[0] == 3.0

    def test_descending_order(self):
        s = Spectrum.from_values([0.5, -1.0, 2.0])
        assert list(s.values) == [2.0, 0.5, -1.0]


class TestSigmaRho:
    @pytest.mark.parametrize("n,k", [(3, 1), (3, 2), (3, 3), (6, 2), (6, 4), (8, 5)])
    def test_sigma_vs_minor_sum(self, n, k):
        m = random_symmetric(n, seed=10 * n + k)
        lhs = sigma_k(m, k)
        rhs = sigma_k_minor_sum(m, k)
        assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))

    def test_sigma_edges(self):
        m = random_symmetric(4, seed=3)
        assert sigma_k(m, 0) == 1.0
        assert abs(sigma_k(m, 1) - m.trace()) < 1e-12
        assert abs(sigma_k(m, 4) - np.linalg.det(m.entries)) < 1e-10
        with pytest.raises(ValueError):
            sigma_k(m, 5)

    def test_rho_edges(self):
        m = random_symmetric(4, seed=4)
        assert rho_k(m, 0) == 4.0
        assert abs(rho_k(m, 1) - m.trace()) < 1e-12
        assert abs(rho_k(m, 2) - np.sum(m.entries * m.entries)) < 1e-10
        with pytest.raises(ValueError):
            rho_k(m, -1)


class TestNewton:
    @given(values_lists)
    @settings(max_examples=60, deadline=None)
    def test_round_trip_from_rho(self, values):
        n = len(values)
        rho = [float(sum(v**k for v in values)) for k in range(1, n + 1)]
        sigma = newton_sigma_from_rho(rho, n)
        back = newton_rho_from_sigma(sigma, n)
        scale = max(1.0, max(abs(r) for r in rho))
        assert max(abs(a - b) for a, b in zip(rho, back)) <= 1e-10 * scale

    @given(values_lists)
    @settings(max_examples=60, deadline=None)
    def test_sigma_matches_polynomial_expansion(self, values):
        # prod (x + v_i) has coefficients equal to the elementary symmetric
        # functions; numpy's convolution-based expansion is the oracle.
        n = len(values)
        rho = [float(sum(v**k for v in values)) for k in range(1, n + 1)]
        sigma = newton_sigma_from_rho(rho, n)
        coeffs = np.array([1.0])
        for v in values:
            coeffs = np.convolve(coeffs, np.array([1.0, v]))
        scale = max(1.0, float(np.max(np.abs(coeffs))))
        assert max(abs(s - c) for s, c in zip(sigma, coeffs[1:])) <= 1e-8 * scale

    def test_length_validation(self):
        with pytest.raises(ValueError):
            newton_sigma_from_rho([1.0, 2.0], 1)
        with pytest.raises(ValueError):
            newton_rho_from_sigma([], 3)


class TestSpectrumFromMoments:
    def test_simple_round_trip(self):
        values = np.array([3.0, 2.0, 1.0])
        rho = [float(np.sum(values**k)) for k in range(1, 4)]
        rec = spectrum_from_moments(rho, 3)
        assert np.max(np.abs(rec.values - values)) < 1e-10

    @pytest.mark.parametrize("n", [2, 4, 7, 8])
    def test_random_round_trip(self, n):
        rng = np.random.default_rng(n)
        values = np.sort(rng.uniform(-3.0, 3.0, n))[::-1]
        rho = [float(np.sum(values**k)) for k in range(1, n + 1)]
        rec = spectrum_from_moments(rho, n)
        assert np.max(np.abs(rec.values - values)) < 1e-6

    def test_rejects_unrealizable_moments(self):
        # rho_1 = 0, rho_2 = -2 forces lambda^2 sum < 0: no real spectrum.
        with pytest.raises(IllPosedMomentsError):
            spectrum_from_moments([0.0, -2.0], 2)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            spectrum_from_moments([1.0, 2.0], 3)


class TestVandermonde:
    @pytest.mark.parametrize("n", [1, 2, 4, 6])
    def test_matches_dense_solve(self, n):
        rng = np.random.default_rng(20 + n)
        nodes = np.sort(rng.uniform(-2.0, 2.0, n))
        while np.any(np.diff(nodes) < 1e-3):
            nodes = np.sort(rng.uniform(-2.0, 2.0, n))
        weights = rng.uniform(-1.0, 1.0, n)
        moments = np.array(
            [float(np.sum(nodes**i * weights)) for i in range(n)]
        )
        got = vandermonde_solve(nodes, moments)
        ref = np.linalg.solve(np.vander(nodes, increasing=True).T, moments)
        assert np.max(np.abs(got - ref)) < 1e-9
        assert np.max(np.abs(got - weights)) < 1e-8

    def test_rejects_close_nodes(self):
        with pytest.raises(ConditioningError):
            vandermonde_solve([1.0, 1.0 + 1e-12], [1.0, 2.0])

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            vandermonde_solve([1.0, 2.0], [1.0])


def test_eigensolve_returns_clustered_spectrum():
    m = SymmetricMatrix(np.diag([2.0, 2.0, -1.0]))
    s = eigensolve(m)
    assert s.multiplicities() == (2, 1)
    assert abs(s.distinct()[0] - 2.0) < 1e-12
