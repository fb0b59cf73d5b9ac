import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regchristoffel.christoffel import fit, lambda_inv
from regchristoffel.index import enumerate_indices
from regchristoffel.measures import Chebyshev1D, LebesgueBox
from regchristoffel.oracle import QPInstance, l2_norm_box_functional, solve_min_quadratic, symbolic_box_average
from regchristoffel.regularized import (
    BoxQuery,
    EmptyIntersection,
    ZeroWidth,
    box_avg_monomial,
    box_avg_vector,
    box_intersection_volume,
    classify_support,
    density_estimate,
    density_estimate_boundary_corrected,
    evaluate,
    fixed,
    lambda_tilde,
    lambda_tilde_inv,
    lambda_tilde_inv_clipped,
    one_over_n,
    optimal_polynomial,
    sweep,
)


def test_box_average_of_square():
    assert box_avg_monomial((2,), BoxQuery([0.0], 1.0)) == pytest.approx(1 / 12, rel=1e-15)
    assert box_avg_monomial((1, 1), BoxQuery([0.5, 2.0], 0.3)) == pytest.approx(1.0)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.integers(0, 8), min_size=1, max_size=3),
    st.floats(-2, 2),
    st.floats(1e-4, 3),
)
def test_box_average_exact(beta, c, eps):
    xi = [c] * len(beta)
    exact = float(symbolic_box_average(beta, xi, eps))
    assert box_avg_monomial(beta, BoxQuery(xi, eps)) == pytest.approx(exact, rel=1e-12, abs=1e-12)


def test_box_vector_small_width_close_to_point():
    iset = enumerate_indices(2, 5)
    from regchristoffel.index import monomial_vector

    v = monomial_vector(iset, [0.3, -0.7])
    vt = box_avg_vector(iset, BoxQuery([0.3, -0.7], 1e-6))
    np.testing.assert_allclose(vt, v, atol=1e-11)


def test_box_query_validation():
    for bad in (-0.1, math.inf, math.nan):
        with pytest.raises(ValueError):
            BoxQuery([0.0], bad)


def test_zero_width_routes_to_point():
    model = fit(Chebyshev1D(), 3)
    assert lambda_tilde_inv(model, BoxQuery([0.2], 0.0)) == lambda_inv(model, [0.2])
    with pytest.raises(ZeroWidth):
        density_estimate(model, BoxQuery([0.2], 0.0))


def test_optimal_polynomial_meets_constraint_and_value():
    mu = LebesgueBox([(-1, 1), (-1, 1)])
    model = fit(mu, 3)
    q = BoxQuery([0.2, -0.1], 0.4)
    p = optimal_polynomial(model, q)
    c = box_avg_vector(model.index_set, q)
    G = model.matrix.values
    assert c @ p == pytest.approx(1.0, rel=1e-12)
    assert p @ G @ p == pytest.approx(lambda_tilde(model, q), rel=1e-10)
    val, p_ref = solve_min_quadratic(QPInstance(G, c))
    np.testing.assert_allclose(p, p_ref, rtol=1e-8, atol=1e-10)


def test_evaluate_bundle():
    model = fit(LebesgueBox([(0, 1)], mass=1), 6)
    ev = evaluate(model, BoxQuery([0.5], 0.2))
    assert ev.lambda_tilde * ev.lambda_tilde_inv == pytest.approx(1.0)
    assert ev.density_estimate == pytest.approx(ev.lambda_tilde / 0.2)
    assert ev.n == 6


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.floats(-0.9, 0.9), st.floats(0.01, 0.15))
def test_bounded_by_l2_limit(n, xi, eps):
    """The minimum over degree-n polynomials never beats the L2 representer."""
    mu = LebesgueBox([(-1, 1)], mass=2)
    inv = lambda_tilde_inv(fit(mu, n), BoxQuery([xi], eps))
    limit = l2_norm_box_functional(lambda x: 1.0, [xi], eps)
    assert inv <= limit * (1 + 1e-9)


def test_boundary_helpers():
    q = BoxQuery([0.0, 0.5], 0.2)
    assert box_intersection_volume(q, [(0, 1), (0, 1)]) == pytest.approx(0.1 * 0.2)
    model = fit(LebesgueBox([(0, 1), (0, 1)], mass=1), 4)
    with pytest.raises(EmptyIntersection):
        density_estimate_boundary_corrected(model, BoxQuery([3.0, 3.0], 0.2), [(0, 1), (0, 1)])
    inside = BoxQuery([0.5, 0.5], 0.2)
    assert density_estimate_boundary_corrected(model, inside, [(0, 1), (0, 1)]) == density_estimate(model, inside)
    assert lambda_tilde_inv_clipped(model, inside, [(0, 1), (0, 1)]) == lambda_tilde_inv(model, inside)


def test_clipped_functional_converges_to_integral():
    mu = LebesgueBox([(0, 1)], mass=1)
    q = BoxQuery([0.0], 0.2)
    target = l2_norm_box_functional(lambda x: 1.0, [0.0], 0.2, domain=[(0, 1)])
    vals = [lambda_tilde_inv_clipped(fit(mu, n), q, [(0, 1)]) for n in (10, 20)]
    assert vals[0] < vals[1] <= target * (1 + 1e-9)
    assert vals[1] / target > 0.75


def test_rules_and_sweep():
    assert fixed(0.3)(10) == 0.3
    assert one_over_n(0.5)(16) == 0.25
    assert one_over_n().label == "1/n^1.0"
    with pytest.raises(ValueError):
        one_over_n(0)
    rows = sweep(LebesgueBox([(-1, 1)], mass=1), [0.0], [2, 4], one_over_n(1.0))
    assert [r.n for r in rows] == [2, 4]
    r = rows[-1]
    assert r.scaled_inv == pytest.approx(r.eps * r.lambda_tilde_inv)
    assert r.n_scaled == pytest.approx(4 / r.lambda_tilde_inv)


def test_classify_support_verdicts_and_errors():
    mu = Chebyshev1D()
    degs = list(range(4, 13))
    assert classify_support(mu, [2.0], fixed(0.1), degs).verdict == "outside"
    assert classify_support(mu, [0.3], fixed(0.1), degs).verdict == "inside"
    assert classify_support(mu, [0.0], one_over_n(1.0), degs).verdict == "inside"
    with pytest.raises(ValueError, match="4 degrees"):
        classify_support(mu, [0.0], fixed(0.1), [4, 5, 6])
    with pytest.raises(ValueError, match="increasing"):
        classify_support(mu, [0.0], fixed(0.1), [4, 6, 5, 7])
