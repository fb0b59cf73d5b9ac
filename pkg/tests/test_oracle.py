import math
from fractions import Fraction

import numpy as np
import pytest

from regchristoffel.oracle import (
    NoConvergence,
    QPInstance,
    SingularGram,
    chebyshev_weight,
    l2_norm_box_functional,
    quadrature_moment,
    solve_min_quadratic,
    symbolic_box_average,
)
from regchristoffel.regularized import ZeroWidth


def test_qp_identity_gram():
    val, p = solve_min_quadratic(QPInstance(np.eye(3), np.array([1.0, 2.0, 2.0])))
    assert val == pytest.approx(1 / 9)
    np.testing.assert_allclose(p, [1 / 9, 2 / 9, 2 / 9])


def test_qp_errors():
    with pytest.raises(SingularGram, match="zero"):
        solve_min_quadratic(QPInstance(np.eye(2), np.zeros(2)))
    with pytest.raises(SingularGram, match="positive definite"):
        solve_min_quadratic(QPInstance(np.array([[1.0, 1.0], [1.0, 1.0]]), np.array([1.0, 0.0])))


def test_quadrature_chebyshev_mass():
    assert quadrature_moment(chebyshev_weight, [(-1, 1)], (0,)) == pytest.approx(math.pi, abs=1e-10)


def test_quadrature_2d():
    val = quadrature_moment(lambda x, y: 1.0, [(0, 1), (0, 2)], (1, 2))
    assert val == pytest.approx(0.5 * 8 / 3, rel=1e-12)


def test_quadrature_no_convergence():
    with pytest.raises(NoConvergence):
        quadrature_moment(lambda x: math.sin(1 / x) / x, [(1e-8, 1)], (0,), tol=1e-14, limit=5)


def test_symbolic_box_average():
    assert symbolic_box_average((2,), [0], 1) == Fraction(1, 12)
    assert symbolic_box_average((1, 3), [Fraction(1, 2), 0], Fraction(1, 2)) == Fraction(0)
    with pytest.raises(ZeroWidth):
        symbolic_box_average((1,), [0], 0)


def test_l2_functional():
    assert l2_norm_box_functional(lambda x: 1.0, [0.0], 0.2) == pytest.approx(5.0)
    assert l2_norm_box_functional(lambda x: 1.0, [0.0], 0.2, domain=[(0, 1)]) == pytest.approx(2.5)
    assert l2_norm_box_functional(lambda x, y: 0.5, [0.0, 0.0], 0.5) == pytest.approx(2 / 0.25)
    assert l2_norm_box_functional(lambda x: 1.0, [5.0], 0.2, domain=[(0, 1)]) == 0.0


def test_chebyshev_tilde2_symbolic():
    """Exact Lambda~_2^{-1} for the Chebyshev weight, derived with sympy."""
    sp = pytest.importorskip("sympy")
    x, xi, eps, y = sp.symbols("x xi epsilon y", real=True)
    w = 1 / sp.sqrt(1 - x**2)
    M = sp.Matrix(3, 3, lambda i, j: sp.integrate(x ** (i + j) * w, (x, -1, 1)))
    c = sp.Matrix([sp.integrate(y**k, (y, xi - eps / 2, xi + eps / 2)) / eps for k in range(3)])
    got = sp.expand(sp.simplify((c.T * M.inv() * c)[0]))
    want = 2 / sp.pi * (sp.Rational(3, 2) - 3 * xi**2 + 4 * xi**4
                        + eps**2 * (2 * xi**2 - 1) / 3 + eps**4 / 36)
    assert sp.simplify(got - sp.expand(want)) == 0
    stated = 2 / sp.pi * (sp.Rational(3, 2) - 3 * xi**2 + 4 * xi**4 + eps**2 / 2 - 2 * xi**2 * eps**2 / 3)
    assert sp.simplify(got - sp.expand(stated)) != 0
