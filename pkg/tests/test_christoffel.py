import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regchristoffel.christoffel import (
    JitterPolicy,
    NotPositiveDefinite,
    build,
    cd_kernel,
    christoffel_function,
    fit,
    lambda_inv,
    orthonormal_basis,
)
from regchristoffel.index import enumerate_indices
from regchristoffel.measures import (
    Chebyshev1D,
    EmpiricalMeasure,
    LebesgueBox,
    ProductMeasure,
    SampleCloud,
    moment_matrix,
)
from regchristoffel.oracle import QPInstance, solve_min_quadratic


def test_chebyshev_degree_one():
    model = fit(Chebyshev1D(), 1)
    assert lambda_inv(model, [0.5]) == pytest.approx(2 / math.pi * 0.75, rel=1e-14)
    assert christoffel_function(model, [0.0]) == pytest.approx(math.pi, rel=1e-14)


def test_vectorised_matches_pointwise():
    model = fit(LebesgueBox([(0, 1), (0, 2)]), 4)
    pts = np.array([[0.1, 0.2], [0.5, 1.5], [0.9, 0.0]])
    many = lambda_inv(model, pts)
    assert many.shape == (3,)
    for x, v in zip(pts, many):
        assert lambda_inv(model, x) == pytest.approx(v, rel=1e-14)


def test_kernel_symmetric_and_diagonal(rng):
    model = fit(ProductMeasure([Chebyshev1D(), LebesgueBox([(-1, 1)])]), 3)
    for _ in range(20):
        x, y = rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2)
        assert cd_kernel(model, x, y) == cd_kernel(model, y, x)
        assert cd_kernel(model, x, x) == pytest.approx(lambda_inv(model, x), rel=1e-13)


def test_orthonormal_basis_reproduces_identity():
    mu = LebesgueBox([(-1, 1)], mass=2)
    model = fit(mu, 5)
    basis = orthonormal_basis(model)
    D = basis.coeffs
    np.testing.assert_allclose(D @ model.matrix.values @ D.T, np.eye(6), atol=1e-12)
    # Legendre: P_1 = sqrt(3/2) x up to sign
    assert abs(basis([0.5])[1]) == pytest.approx(math.sqrt(1.5) * 0.5, rel=1e-12)
    # sum of squares of the orthonormal basis is the reciprocal Christoffel function
    assert np.sum(basis([0.3]) ** 2) == pytest.approx(lambda_inv(model, [0.3]), rel=1e-12)


def test_rescaled_frame_is_invisible():
    mu = LebesgueBox([(0, 1), (2, 5)])
    a, b = fit(mu, 4), fit(mu, 4, rescale=False)
    assert a.scale != 1.0
    x = np.array([0.3, 4.2])
    assert lambda_inv(a, x) == pytest.approx(lambda_inv(b, x), rel=1e-9)


def test_rank_deficient_raises_and_jitter_recovers():
    cloud = SampleCloud.from_points([[0.0], [0.5], [1.0]])
    mu = EmpiricalMeasure(cloud)
    M = moment_matrix(mu, enumerate_indices(1, 4))
    with pytest.raises(NotPositiveDefinite):
        build(M)
    model = build(M, JitterPolicy.rel(1e-8))
    assert model.jitter_applied > 0
    # fewer atoms than monomials is caught before factorising
    with pytest.raises(NotPositiveDefinite, match="distinct"):
        fit(mu, 4)
    dup = EmpiricalMeasure(SampleCloud.from_points([[0.0], [0.0], [0.5], [1.0], [1.0]]))
    with pytest.raises(NotPositiveDefinite):
        fit(dup, 3)
    assert fit(dup, 2).jitter_applied >= 0
    assert fit(LebesgueBox([(0, 1)]), 4).jitter_applied == 0.0


def test_build_rejects_asymmetric():
    M = moment_matrix(LebesgueBox([(0, 1)]), enumerate_indices(1, 1))
    bad = type(M)(M.index_set, np.array([[1.0, 0.5], [0.4, 1.0]]))
    with pytest.raises(ValueError, match="symmetric"):
        build(bad)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(0, 4),
    st.floats(-1.5, 1.5),
    st.floats(-1.5, 1.5),
    st.floats(0.2, 3.0),
)
def test_variational_minimum_matches_qp(n, x1, x2, width):
    mu = ProductMeasure([Chebyshev1D(), LebesgueBox([(0.0, width)])])
    model = fit(mu, n, rescale=False)
    from regchristoffel.index import monomial_vector

    c = monomial_vector(model.index_set, [x1, x2])
    val, _ = solve_min_quadratic(QPInstance(model.matrix.values, c))
    assert 1.0 / lambda_inv(model, [x1, x2]) == pytest.approx(val, rel=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.floats(-0.99, 0.99))
def test_monotone_in_degree(n, x):
    mu = Chebyshev1D()
    assert lambda_inv(fit(mu, n), [x]) >= lambda_inv(fit(mu, n - 1), [x]) * (1 - 1e-12)
