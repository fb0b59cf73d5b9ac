"""Independent reference computations used to cross-check the fast paths.

Nothing here touches the Cholesky factor of the christoffel module: the QP
oracle works from an eigendecomposition, moments come from adaptive
quadrature, and box averages from exact rational arithmetic.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

# documented seed for all randomised cross-checks
ORACLE_SEED = 20240917


class SingularGram(np.linalg.LinAlgError):
    """Gram matrix not positive definite, or constraint vector is zero."""


class NoConvergence(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


@dataclass(frozen=True)
class QPInstance:
    """``min p^T gram p`` subject to ``constraint . p = 1``."""

    gram: np.ndarray
    constraint: np.ndarray


def solve_min_quadratic(instance: QPInstance, rtol: float = 1e-13) -> tuple[float, np.ndarray]:
    """Closed-form KKT solution via a symmetric eigendecomposition.

    Returns ``(value, p)`` with ``p = G^{-1} c / (c^T G^{-1} c)`` and
    ``value = 1 / (c^T G^{-1} c)``.
    """
    G = np.asarray(instance.gram, dtype=float)
    c = np.asarray(instance.constraint, dtype=float).reshape(-1)
    if not np.any(c):
        raise SingularGram("constraint vector is zero: problem infeasible")
    G = (G + G.T) / 2.0
    w, Q = np.linalg.eigh(G)
    if w[0] <= rtol * max(abs(w[-1]), 1e-300):
        raise SingularGram(f"gram matrix not positive definite (min eigenvalue {w[0]:.3g})")
    y = (Q.T @ c) / w
    sol = Q @ y
    q = float(c @ sol)
    return 1.0 / q, sol / q


def quadrature_moment(
    weight: Callable[..., float],
    box: Sequence[Sequence[float]],
    alpha: Sequence[int],
    tol: float = 1e-10,
    limit: int = 200,
) -> float:
    """``int_box x**alpha weight(x) dx`` by adaptive Gauss-Kronrod panels.

    ``weight`` takes the coordinates as separate arguments. Iterated 1-D
    integration is used for ``d > 1``.

    Raises
    ------
    NoConvergence
        If the error estimate exceeds ``tol`` after ``limit`` subdivisions.
    """
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != len(box):
        raise ValueError("exponent and box dimensions differ")

    def integrand(*x):
        return math.prod(xi**a for xi, a in zip(x, alpha)) * weight(*x)

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            if len(box) == 1:
                (a, b), = box
                val, err = integrate.quad(integrand, a, b, epsabs=tol, epsrel=0.0, limit=limit)
            else:
                val, err = integrate.nquad(
                    integrand,
                    [tuple(r) for r in box],
                    opts={"epsabs": tol / len(box), "epsrel": 0.0, "limit": limit},
                )
        except integrate.IntegrationWarning as exc:
            raise NoConvergence(str(exc)) from None
    if err > tol:
        raise NoConvergence(f"estimated error {err:.3g} exceeds tolerance {tol:.3g}")
    return float(val)


def chebyshev_weight(x: float) -> float:
    return 1.0 / math.sqrt(1.0 - x * x)


def symbolic_box_average(beta: Sequence[int], xi: Sequence, eps) -> Fraction:
    """Exact average of ``y**beta`` over ``{|y - xi|_inf <= eps/2}``.

    Inputs are converted with :class:`fractions.Fraction` (floats exactly).
    """
    eps = Fraction(eps)
    if eps == 0:
        from .regularized import ZeroWidth

        raise ZeroWidth("exact box average needs eps > 0")
    if eps < 0:
        raise ValueError("eps must be positive")
    out = Fraction(1)
    for b, c in zip(beta, xi):
        c = Fraction(c)
        hi, lo = c + eps / 2, c - eps / 2
        out *= (hi ** (b + 1) - lo ** (b + 1)) / ((b + 1) * eps)
    return out


def l2_norm_box_functional(
    density: Callable[..., float],
    xi: Sequence[float],
    eps: float,
    domain: Sequence[Sequence[float]] | None = None,
    tol: float = 1e-10,
) -> float:
    """``int_{B & domain} 1 / (eps^{2d} f) dx``: the limit of ``Lambda~_n^{-1}``.

    This is the squared norm of the box-average functional represented in
    ``L^2(f dx)``.
    """
    d = len(xi)
    box = []
    for i, c in enumerate(xi):
        lo, hi = c - eps / 2.0, c + eps / 2.0
        if domain is not None:
            lo, hi = max(lo, domain[i][0]), min(hi, domain[i][1])
        if hi <= lo:
            return 0.0
        box.append((lo, hi))
    integral = quadrature_moment(lambda *x: 1.0 / density(*x), box, (0,) * d, tol=tol)
    return integral / eps ** (2 * d)
