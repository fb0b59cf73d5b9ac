"""Box-regularized Christoffel function and what is built on it.

For a cube ``B(xi, eps) = {x : |x - xi|_inf <= eps/2}`` the regularized
function replaces the point constraint ``p(xi) = 1`` by ``avg_B p = 1``; its
reciprocal is ``vt^T M^{-1} vt`` with ``vt`` the box-averaged monomial
vector. ``eps = 0`` is point evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .christoffel import ChristoffelModel, fit, lambda_inv
from .index import IndexSet, monomial_vector
from .measures import MomentProvider


class ZeroWidth(ValueError):
    """A positive box width is required."""


class EmptyIntersection(ValueError):
    """The query box does not meet the domain."""


@dataclass(frozen=True)
class BoxQuery:
    center: np.ndarray
    width: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).reshape(-1)
        object.__setattr__(self, "center", c)
        if not (self.width >= 0 and math.isfinite(self.width)):
            raise ValueError(f"box width must be finite and >= 0, got {self.width}")

    @property
    def volume(self) -> float:
        return self.width ** len(self.center)


def _axis_averages(center: float, width: float, degree: int) -> np.ndarray:
    """Averages of ``y**k`` over ``[center - width/2, center + width/2]``, k <= degree.

    Uses ``(a^{k+1} - b^{k+1}) / ((k+1)(a - b)) = sum_j a^{k-j} b^j / (k+1)``
    so there is no division by the width.
    """
    a = center + width / 2.0
    b = center - width / 2.0
    out = np.empty(degree + 1)
    out[0] = 1.0
    if degree >= 1:
        out[1] = center
    apow = [1.0]
    bpow = [1.0]
    for _ in range(degree):
        apow.append(apow[-1] * a)
        bpow.append(bpow[-1] * b)
    for k in range(2, degree + 1):
        out[k] = math.fsum(apow[k - j] * bpow[j] for j in range(k + 1)) / (k + 1)
    return out


def box_avg_monomial(beta: Sequence[int], q: BoxQuery) -> float:
    """Average of ``y**beta`` over the cube of ``q``."""
    beta = tuple(int(b) for b in beta)
    if len(beta) != len(q.center):
        raise ValueError("exponent and box center have different dimensions")
    if q.width == 0:
        return math.prod(float(c) ** b for c, b in zip(q.center, beta))
    return math.prod(_axis_averages(c, q.width, b)[b] for c, b in zip(q.center, beta))


def box_avg_vector(iset: IndexSet, q: BoxQuery) -> np.ndarray:
    """``vt_n(xi, eps)`` over ``iset``; equals ``v_n(xi)`` when ``eps = 0``."""
    if len(q.center) != iset.dim:
        raise ValueError(f"box dimension {len(q.center)} != index set dimension {iset.dim}")
    if q.width == 0:
        return monomial_vector(iset, q.center)
    tables = [_axis_averages(c, q.width, iset.degree) for c in q.center]
    exps = iset.exponents
    out = np.ones(len(iset))
    for i, tab in enumerate(tables):
        out *= tab[exps[:, i]]
    return out


def _working_query(model: ChristoffelModel, q: BoxQuery) -> BoxQuery:
    if len(q.center) != model.dim:
        raise ValueError(f"box dimension {len(q.center)} != model dimension {model.dim}")
    return BoxQuery(model.to_frame(q.center), q.width / model.scale)


def _whitened_box_vector(model: ChristoffelModel, q: BoxQuery) -> np.ndarray:
    vt = box_avg_vector(model.index_set, _working_query(model, q))
    return model.whiten(vt)


def lambda_tilde_inv(model: ChristoffelModel, q: BoxQuery) -> float:
    """``Lambda~_n(xi, eps)^{-1} = |L^{-1} vt_n(xi, eps)|^2``."""
    if q.width == 0:
        return lambda_inv(model, q.center)
    z = _whitened_box_vector(model, q)
    return float(z @ z)


def lambda_tilde(model: ChristoffelModel, q: BoxQuery) -> float:
    return 1.0 / lambda_tilde_inv(model, q)


@dataclass(frozen=True)
class RegularizedEvaluation:
    lambda_tilde: float
    lambda_tilde_inv: float
    density_estimate: float | None
    n: int


def evaluate(model: ChristoffelModel, q: BoxQuery) -> RegularizedEvaluation:
    inv = lambda_tilde_inv(model, q)
    lt = 1.0 / inv
    dens = lt / q.volume if q.width > 0 else None
    return RegularizedEvaluation(lt, inv, dens, model.degree)


def optimal_polynomial(model: ChristoffelModel, q: BoxQuery) -> np.ndarray:
    """Minimiser ``p* = Lambda~ M^{-1} vt`` in the model's working monomial basis.

    Satisfies ``<p*, vt> = 1`` and ``p*^T M p* = Lambda~``.
    """
    z = _whitened_box_vector(model, q)
    lt = 1.0 / float(z @ z)
    return lt * solve_triangular(model.factor, z, lower=True, trans="T", check_finite=False)


def density_estimate(model: ChristoffelModel, q: BoxQuery) -> float:
    """``eps^{-d} Lambda~_n(xi, eps)``, an estimate of the density near ``xi``."""
    if q.width == 0:
        raise ZeroWidth("density estimation needs a box of positive width")
    return lambda_tilde(model, q) / q.volume


def _clip(q: BoxQuery, domain: Sequence[Sequence[float]]) -> list[tuple[float, float]]:
    if len(domain) != len(q.center):
        raise ValueError("domain and box have different dimensions")
    return [
        (max(c - q.width / 2.0, a), min(c + q.width / 2.0, b))
        for c, (a, b) in zip(q.center, domain)
    ]


def _inside(q: BoxQuery, domain: Sequence[Sequence[float]]) -> bool:
    # compare endpoints, not volumes: products of differences are not exact
    return all(a <= c - q.width / 2.0 and c + q.width / 2.0 <= b for c, (a, b) in zip(q.center, domain))


def box_intersection_volume(q: BoxQuery, domain: Sequence[Sequence[float]]) -> float:
    """Lebesgue volume of the query cube intersected with an axis-aligned box."""
    return math.prod(max(hi - lo, 0.0) for lo, hi in _clip(q, domain))


def lambda_tilde_inv_clipped(
    model: ChristoffelModel, q: BoxQuery, domain: Sequence[Sequence[float]]
) -> float:
    """Reciprocal regularized function for the functional ``h -> int_{B & domain} h / eps^d``.

    Polynomials are only controlled by ``L^2(mu)`` on the domain; averaging
    over the part of the cube outside it lets ``Lambda~^{-1}`` grow
    exponentially in ``n`` (as outside the support). Restricting the average
    to ``B & domain`` gives the functional whose limit is
    ``int_{B & domain} 1/(eps^{2d} f)``. Equals :func:`lambda_tilde_inv` when
    the cube lies in the domain.
    """
    if q.width == 0:
        raise ZeroWidth("clipped box average needs a box of positive width")
    clipped = _clip(q, domain)
    vol = math.prod(max(hi - lo, 0.0) for lo, hi in clipped)
    if vol <= 0:
        raise EmptyIntersection(f"box around {q.center.tolist()} does not meet the domain")
    if _inside(q, domain):
        return lambda_tilde_inv(model, q)
    iset = model.index_set
    exps = iset.exponents
    avg = np.ones(len(iset))
    for i, (lo, hi) in enumerate(clipped):
        c = ((lo + hi) / 2.0 - model.center[i]) / model.scale
        tab = _axis_averages(c, (hi - lo) / model.scale, iset.degree)
        avg *= tab[exps[:, i]]
    z = model.whiten(avg * (vol / q.volume))
    return float(z @ z)


def density_estimate_clipped(
    model: ChristoffelModel, q: BoxQuery, domain: Sequence[Sequence[float]]
) -> float:
    """``eps^{-d} / lambda_tilde_inv_clipped``; tends to ``f * eps^d / vol(B & domain)``."""
    return 1.0 / (lambda_tilde_inv_clipped(model, q, domain) * q.volume)


def density_estimate_boundary_corrected(
    model: ChristoffelModel, q: BoxQuery, domain: Sequence[Sequence[float]]
) -> float:
    """Density estimate near the boundary of a box-shaped domain.

    The clipped estimate is multiplied by ``vol(B & domain) / eps^d`` to
    remove the volume bias. Inside the domain this coincides with
    :func:`density_estimate`.
    """
    if q.width == 0:
        raise ZeroWidth("density estimation needs a box of positive width")
    inter = box_intersection_volume(q, domain)
    if inter <= 0:
        raise EmptyIntersection(f"box around {q.center.tolist()} does not meet the domain")
    if _inside(q, domain):
        return density_estimate(model, q)
    return density_estimate_clipped(model, q, domain) * inter / q.volume


# --- width rules and degree sweeps ------------------------------------------


@dataclass(frozen=True)
class EpsilonRule:
    """``fixed`` width, or ``eps(n) = n**(-power)`` when ``fixed`` is None."""

    fixed: float | None = None
    power: float = 1.0

    def __call__(self, n: int) -> float:
        if self.fixed is not None:
            return self.fixed
        return float(n) ** (-self.power)

    @property
    def label(self) -> str:
        return f"fixed:{self.fixed!r}" if self.fixed is not None else f"1/n^{self.power!r}"


def fixed(eps: float) -> EpsilonRule:
    if eps < 0:
        raise ValueError("width must be >= 0")
    return EpsilonRule(fixed=float(eps))


def one_over_n(power: float = 1.0) -> EpsilonRule:
    if not power > 0:
        raise ValueError("power must be positive")
    return EpsilonRule(fixed=None, power=float(power))


@dataclass(frozen=True)
class SweepRow:
    n: int
    eps: float
    scaled_inv: float  # eps^d * Lambda~^{-1}
    density: float  # eps^{-d} * Lambda~
    n_scaled: float  # n^d * Lambda~
    lambda_tilde_inv: float


def sweep(
    provider: MomentProvider,
    xi,
    degrees: Sequence[int],
    rule: EpsilonRule,
    model_factory: Callable[[MomentProvider, int], ChristoffelModel] = fit,
) -> list[SweepRow]:
    """Quantities tracking convergence in ``n`` for one point and width rule."""
    xi = np.asarray(xi, dtype=float).reshape(-1)
    d = len(xi)
    rows = []
    for n in degrees:
        model = model_factory(provider, n)
        eps = rule(n)
        inv = lambda_tilde_inv(model, BoxQuery(xi, eps))
        rows.append(SweepRow(n, eps, eps**d * inv, 1.0 / (eps**d * inv) if eps > 0 else math.inf, n**d / inv, inv))
    return rows


# --- support inference -------------------------------------------------------


@dataclass(frozen=True)
class SupportVerdict:
    """Verdict from the growth rate of ``log Lambda~_n^{-1}`` in ``n``.

    ``decay_slope`` is the least-squares slope of ``log Lambda~^{-1}`` against
    ``n``; ``detrended_slope`` is the same after removing ``d log n``, the
    polynomial growth allowed inside the support. The verdict is taken from
    the detrended slope.
    """

    verdict: str
    decay_slope: float
    detrended_slope: float
    degrees_used: list[int]
    log_inv: list[float] = field(default_factory=list)


SLOPE_HI = 0.25
SLOPE_LO = 0.05


def _ls_slope(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    return float(xc @ (y - y.mean()) / (xc @ xc))


def classify_support(
    provider: MomentProvider,
    xi,
    eps_rule: EpsilonRule,
    degrees: Sequence[int],
    slope_hi: float = SLOPE_HI,
    slope_lo: float = SLOPE_LO,
    model_factory: Callable[[MomentProvider, int], ChristoffelModel] = fit,
) -> SupportVerdict:
    """Decide whether ``xi`` lies inside or outside the support.

    Outside, ``Lambda~^{-1}`` grows at least exponentially in ``n``; inside it
    grows at most polynomially. Points near the boundary may come out
    ``uncertain``.
    """
    degrees = [int(n) for n in degrees]
    if len(degrees) < 4:
        raise ValueError("support classification needs at least 4 degrees")
    if any(b <= a for a, b in zip(degrees, degrees[1:])):
        raise ValueError("degrees must be strictly increasing")
    if degrees[0] < 1:
        raise ValueError("degrees must be >= 1")
    if slope_lo > slope_hi:
        raise ValueError("slope_lo must not exceed slope_hi")
    xi = np.asarray(xi, dtype=float).reshape(-1)
    d = len(xi)
    ys = []
    for n in degrees:
        model = model_factory(provider, n)
        ys.append(math.log(lambda_tilde_inv(model, BoxQuery(xi, eps_rule(n)))))
    ns = np.array(degrees, dtype=float)
    y = np.array(ys)
    raw = _ls_slope(ns, y)
    detrended = _ls_slope(ns, y - d * np.log(ns))
    if detrended > slope_hi:
        verdict = "outside"
    elif detrended < slope_lo:
        verdict = "inside"
    else:
        verdict = "uncertain"
    return SupportVerdict(verdict, raw, detrended, degrees, ys)
