import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pgarch.errors import (
    ConvergenceWarning,
    ShapeMismatch,
    SingularSystem,
    SizeOverflow,
    SpectralRadiusAtLeastOne,
)
from pgarch.matalg import kron, kron_power, opnorm, product_seq, solve_neumann, spectral_radius


def eig_radius(a):
    return float(np.max(np.abs(np.linalg.eigvals(a))))


class TestSpectralRadius:
    @pytest.mark.parametrize(
        "a, expected",
        [
            ([[0.2, 0.7], [0.2, 0.7]], 0.9),
            ([[2.0, 0.0], [0.0, -3.0]], 3.0),
            ([[0.0, 1.0], [-1.0, 0.0]], 1.0),  # rotation, complex pair
            ([[0.5, 1.0], [0.0, 0.5]], 0.5),  # Jordan block
            ([[0.0, 1.0], [0.0, 0.0]], 0.0),  # nilpotent
            ([[0.0]], 0.0),
        ],
    )
    def test_known_values(self, a, expected):
        assert spectral_radius(a) == pytest.approx(expected, rel=1e-8, abs=1e-12)

    def test_matches_eigenvalues_on_random_matrices(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            n = int(rng.integers(1, 9))
            a = rng.normal(size=(n, n)) * rng.uniform(0.01, 10)
            np.testing.assert_allclose(spectral_radius(a), eig_radius(a), rtol=5e-8)

    def test_nonnegative_gives_perron_root(self):
        rng = np.random.default_rng(2)
        a = rng.uniform(size=(6, 6))
        perron = max(np.linalg.eigvals(a), key=abs)
        assert abs(perron.imag) < 1e-12 and perron.real > 0
        assert spectral_radius(a) == pytest.approx(perron.real, rel=1e-9)

    def test_huge_and_tiny_scales(self):
        a = np.array([[0.3, 0.4], [0.1, 0.2]])
        r = eig_radius(a)
        assert spectral_radius(a * 1e200) == pytest.approx(r * 1e200, rel=1e-9)
        assert spectral_radius(a * 1e-200) == pytest.approx(r * 1e-200, rel=1e-9)

    def test_warns_when_not_converged(self):
        a = np.array([[0.3, 0.4], [0.1, 0.2]])
        with pytest.warns(ConvergenceWarning):
            spectral_radius(a, max_squarings=1)

    def test_rejects_non_square(self):
        with pytest.raises(ShapeMismatch):
            spectral_radius(np.ones((2, 3)))


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, (4, 4), elements=st.floats(0.0, 1.0)))
def test_spectral_radius_bounded_by_norm(a):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        rho = spectral_radius(a)
    assert 0.0 <= rho <= opnorm(a) * (1 + 1e-12)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, (3, 3), elements=st.floats(0.0, 1.0)), st.floats(1.0, 3.0))
def test_spectral_radius_monotone_for_nonnegative(a, c):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        assert spectral_radius(c * a) >= spectral_radius(a) * (1 - 1e-8)


class TestSolveNeumann:
    def test_matches_truncated_series(self):
        rng = np.random.default_rng(3)
        m = rng.uniform(size=(5, 5))
        m *= 0.8 / eig_radius(m)
        b = rng.normal(size=5)
        series = np.zeros(5)
        term = b.copy()
        for _ in range(400):
            series += term
            term = m @ term
        np.testing.assert_allclose(solve_neumann(m, b), series, rtol=1e-12, atol=1e-14)

    def test_rejects_radius_at_least_one(self):
        with pytest.raises(SpectralRadiusAtLeastOne):
            solve_neumann(np.array([[1.2, 0.0], [0.0, 0.1]]), np.ones(2))
        with pytest.raises(SpectralRadiusAtLeastOne):
            solve_neumann(np.eye(2), np.ones(2))

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            solve_neumann(np.zeros((2, 2)), np.ones(3))

    def test_singular_system_is_a_distinct_error(self):
        assert not issubclass(SingularSystem, SpectralRadiusAtLeastOne)


class TestKron:
    def test_kron_power_matches_repeated_kron(self):
        a = np.arange(4.0).reshape(2, 2)
        np.testing.assert_array_equal(kron_power(a, 3), np.kron(np.kron(a, a), a))
        np.testing.assert_array_equal(kron_power(a, 1), a)

    def test_row_major_component_order(self):
        x = np.array([1.0, 2.0, 3.0])
        y = np.array([5.0, 7.0, 11.0])
        k = kron(x[:, None], y[:, None]).ravel()
        assert k[1 * 3 + 2] == x[1] * y[2]

    def test_cap(self):
        with pytest.raises(SizeOverflow):
            kron_power(np.eye(8), 5)
        with pytest.raises(SizeOverflow):
            kron(np.eye(10), np.eye(10), cap=50)

    def test_radius_of_kron_power(self):
        a = np.array([[0.3, 0.5], [0.2, 0.1]])
        assert spectral_radius(kron_power(a, 3)) == pytest.approx(eig_radius(a) ** 3, rel=1e-8)


class TestProductSeq:
    def test_left_to_right(self):
        a = np.array([[1.0, 2.0], [0.0, 1.0]])
        b = np.array([[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_array_equal(product_seq([a, b]), a @ b)

    def test_empty_is_identity(self):
        np.testing.assert_array_equal(product_seq([], size=3), np.eye(3))
        with pytest.raises(ValueError):
            product_seq([])

    def test_chain_mismatch(self):
        with pytest.raises(ShapeMismatch, match="factor 1"):
            product_seq([np.ones((2, 3)), np.ones((2, 2))])
