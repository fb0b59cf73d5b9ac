from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regchristoffel.index import enumerate_indices, monomial_matrix, monomial_vector


def test_order_d2_n2():
    iset = enumerate_indices(2, 2)
    assert list(iset) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


def test_last_entry_d3_n2():
    iset = enumerate_indices(3, 2)
    assert len(iset) == 10
    assert iset[-1] == (0, 0, 2)
    assert iset[1:4] == ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def test_last_entry_d2_n3():
    assert enumerate_indices(2, 3)[-1] == (0, 3)


@pytest.mark.parametrize("dim,degree", [(0, 1), (2, -1)])
def test_rejects_bad_arguments(dim, degree):
    with pytest.raises(ValueError):
        enumerate_indices(dim, degree)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(0, 7))
def test_size_and_grading(dim, degree):
    iset = enumerate_indices(dim, degree)
    assert len(iset) == comb(dim + degree, dim)
    totals = [sum(a) for a in iset]
    assert totals == sorted(totals)
    assert len(set(iset)) == len(iset)
    for k in range(degree + 1):
        assert iset.degree_slice(k) == sum(t <= k for t in totals)
    # lower degree is a prefix
    if degree > 0:
        low = enumerate_indices(dim, degree - 1)
        assert iset.entries[: len(low)] == low.entries
    for a in iset:
        assert iset[iset.position(a)] == a
        assert a in iset


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 3).flatmap(
        lambda d: st.tuples(st.just(d), st.lists(st.floats(-2, 2), min_size=d, max_size=d))
    ),
    st.integers(0, 6),
)
def test_monomials_match_power_products(dx, degree):
    dim, x = dx
    iset = enumerate_indices(dim, degree)
    v = monomial_vector(iset, x)
    ref = np.array([np.prod([xi**a for xi, a in zip(x, alpha)]) for alpha in iset])
    np.testing.assert_allclose(v, ref, rtol=1e-13, atol=1e-300)


def test_monomial_matrix_rows():
    iset = enumerate_indices(2, 3)
    pts = np.array([[0.5, -1.0], [2.0, 0.25]])
    M = monomial_matrix(iset, pts)
    for row, x in zip(M, pts):
        np.testing.assert_array_equal(row, monomial_vector(iset, x))


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        monomial_vector(enumerate_indices(2, 2), [1.0, 2.0, 3.0])
