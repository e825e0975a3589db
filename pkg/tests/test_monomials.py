"""Sparse monomial forms: evaluation, differentiation, algebra."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isopar.monomials import MonomialForm, norm_square_form, quadratic_form

FD_H = 1e-5


def sample_form():
    # 2 x0^3 - x0 x1 x2 + 4 x2^2
    f = MonomialForm(3)
    f.add((3, 0, 0), 2.0)
    f.add((1, 1, 1), -1.0)
    f.add((0, 0, 2), 4.0)
    return f


def test_evaluation():
    f = sample_form()
    x = np.array([1.0, 2.0, -1.0])
    assert f(x) == pytest.approx(2.0 + 2.0 + 4.0)


def test_zero_terms_pruned():
    f = MonomialForm(2)
    f.add((1, 0), 1.0)
    f.add((1, 0), -1.0)
    assert len(f) == 0
    assert f(np.array([3.0, 4.0])) == 0.0


def test_partial_matches_finite_differences():
    f = sample_form()
    rng = np.random.default_rng(5)
    for _ in range(10):
        x = rng.uniform(-2.0, 2.0, 3)
        for i in range(3):
            e = np.zeros(3)
            e[i] = FD_H
            fd = (f(x + e) - f(x - e)) / (2.0 * FD_H)
            assert f.partial(i)(x) == pytest.approx(fd, abs=1e-7, rel=1e-7)


def test_degree_and_len():
    f = sample_form()
    assert f.degree() == 3
    assert len(f) == 3


def test_algebra_against_pointwise():
    f = sample_form()
    g = norm_square_form(3)
    rng = np.random.default_rng(6)
    for _ in range(5):
        x = rng.uniform(-1.5, 1.5, 3)
        assert (f + g)(x) == pytest.approx(f(x) + g(x), rel=1e-12, abs=1e-12)
        assert (f - g)(x) == pytest.approx(f(x) - g(x), rel=1e-12, abs=1e-12)
        assert (f * 3.5)(x) == pytest.approx(3.5 * f(x), rel=1e-12)
        assert (f * g)(x) == pytest.approx(f(x) * g(x), rel=1e-11, abs=1e-11)


def test_quadratic_form_matches_bilinear():
    rng = np.random.default_rng(7)
    a = rng.standard_normal((4, 4))
    a = (a + a.T) / 2.0
    q = quadratic_form(a)
    for _ in range(8):
        x = rng.uniform(-2.0, 2.0, 4)
        assert q(x) == pytest.approx(float(x @ a @ x), rel=1e-12, abs=1e-12)


@given(
    st.lists(st.floats(min_value=-3, max_value=3), min_size=3, max_size=3),
    st.floats(min_value=0.1, max_value=2.0),
)
@settings(max_examples=40, deadline=None)
def test_homogeneity(coords, lam):
    f = sample_form()
    x = np.array(coords)
    # every term of sample_form has total degree 3 except the x2^2 term,
    # so test with the homogeneous cubic part alone
    g = MonomialForm(3)
    g.add((3, 0, 0), 2.0)
    g.add((1, 1, 1), -1.0)
    assert g(lam * x) == pytest.approx(lam**3 * g(x), rel=1e-9, abs=1e-9)


def test_norm_square_form():
    q = norm_square_form(5)
    x = np.arange(5, dtype=float)
    assert q(x) == pytest.approx(float(x @ x))
