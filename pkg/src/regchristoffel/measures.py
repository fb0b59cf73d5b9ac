"""Moment providers for analytic and empirical measures, and moment matrices.

Analytic providers compute moments in exact rational arithmetic and scale by a
single floating-point constant (``pi`` for the Chebyshev weight, the mass for
boxes). This keeps pushforwards exact: the binomial expansion of shifted and
scaled moments cancels catastrophically in floating point but not in
:class:`fractions.Fraction`.
"""

from __future__ import annotations

import csv
import io
import json
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from math import comb
from pathlib import Path
from typing import Sequence

import numpy as np

from .index import IndexSet, MultiIndex, enumerate_indices, monomial_matrix


class MeasureConfigError(ValueError):
    """Invalid measure description (JSON config or sample CSV)."""


class MomentProvider:
    """Base class: serves ``mu_alpha = int x**alpha dmu``.

    Subclasses set ``kind``, ``dim`` and ``mass`` and implement
    :meth:`_compute`. Moments are memoised per exponent.
    """

    kind: str = "abstract"
    dim: int
    mass: float

    def __init__(self):
        self._cache: dict[MultiIndex, float] = {}
        self._lock = threading.Lock()

    def moment(self, alpha: Sequence[int]) -> float:
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.dim:
            raise ValueError(f"exponent {alpha} has wrong length for dim={self.dim}")
        with self._lock:
            hit = self._cache.get(alpha)
        if hit is not None:
            return hit
        val = float(self._compute(alpha))
        with self._lock:
            self._cache[alpha] = val
        return val

    def moments(self, iset: IndexSet) -> np.ndarray:
        return np.array([self.moment(a) for a in iset])

    def support_box(self) -> tuple[np.ndarray, np.ndarray]:
        """Axis-aligned box containing the support."""
        raise NotImplementedError

    def _compute(self, alpha: MultiIndex) -> float:
        raise NotImplementedError


class AnalyticProvider(MomentProvider):
    """Provider whose moments are ``constant * exact_moment(alpha)``."""

    constant: float = 1.0

    def exact_moment(self, alpha: MultiIndex) -> Fraction:
        raise NotImplementedError

    def _compute(self, alpha):
        return float(self.exact_moment(alpha)) * self.constant

    def density(self, x) -> float:
        """Density w.r.t. Lebesgue measure (0 outside the support)."""
        raise NotImplementedError


class Chebyshev1D(AnalyticProvider):
    """The weight ``mass/pi * dx / sqrt(1 - x^2)`` on ``[-1, 1]``.

    With the default ``mass = pi`` this is exactly ``dx / sqrt(1 - x^2)``.
    """

    kind = "chebyshev-1d"

    def __init__(self, mass: float = math.pi):
        super().__init__()
        if not mass > 0:
            raise MeasureConfigError(f"mass must be positive, got {mass}")
        self.dim = 1
        self.mass = float(mass)
        self.constant = self.mass

    def exact_moment(self, alpha):
        (k,) = alpha
        if k % 2:
            return Fraction(0)
        return Fraction(comb(k, k // 2), 2**k)

    def support_box(self):
        return np.array([-1.0]), np.array([1.0])

    def density(self, x):
        x = float(np.asarray(x).reshape(-1)[0])
        if abs(x) >= 1:
            return 0.0
        return self.mass / (math.pi * math.sqrt(1.0 - x * x))

    def __repr__(self):
        return f"Chebyshev1D(mass={self.mass!r})"


class LebesgueBox(AnalyticProvider):
    """Uniform measure on an axis-aligned box.

    ``mass`` defaults to the box volume (plain Lebesgue measure); pass
    ``mass=1`` for the uniform probability measure.
    """

    kind = "lebesgue-box"

    def __init__(self, bounds: Sequence[Sequence[float]], mass: float | None = None):
        super().__init__()
        bounds = [(float(a), float(b)) for a, b in bounds]
        if not bounds:
            raise MeasureConfigError("lebesgue-box needs at least one axis")
        for a, b in bounds:
            if not (math.isfinite(a) and math.isfinite(b) and a < b):
                raise MeasureConfigError(f"invalid box bounds ({a}, {b})")
        self.bounds = bounds
        self.dim = len(bounds)
        self.volume = math.prod(b - a for a, b in bounds)
        self.mass = self.volume if mass is None else float(mass)
        if not self.mass > 0:
            raise MeasureConfigError(f"mass must be positive, got {mass}")
        self._vol_exact = math.prod((Fraction(b) - Fraction(a) for a, b in bounds), start=Fraction(1))
        self._mass_exact = self._vol_exact if mass is None else Fraction(self.mass)

    def exact_moment(self, alpha):
        val = self._mass_exact / self._vol_exact
        for (a, b), k in zip(self.bounds, alpha):
            fa, fb = Fraction(a), Fraction(b)
            val *= (fb ** (k + 1) - fa ** (k + 1)) / (k + 1)
        return val

    def support_box(self):
        lo, hi = zip(*self.bounds)
        return np.array(lo), np.array(hi)

    def density(self, x):
        x = np.asarray(x, dtype=float).reshape(-1)
        inside = all(a <= xi <= b for (a, b), xi in zip(self.bounds, x))
        return self.mass / self.volume if inside else 0.0

    def __repr__(self):
        return f"LebesgueBox(bounds={self.bounds!r}, mass={self.mass!r})"


class ProductMeasure(AnalyticProvider):
    """Tensor product of one-dimensional analytic providers."""

    kind = "product"

    def __init__(self, factors: Sequence[AnalyticProvider]):
        super().__init__()
        if not factors:
            raise MeasureConfigError("product needs at least one factor")
        for f in factors:
            if not isinstance(f, AnalyticProvider) or f.dim != 1:
                raise MeasureConfigError("product factors must be 1-D analytic providers")
        self.factors = list(factors)
        self.dim = len(factors)
        self.mass = math.prod(f.mass for f in factors)
        self.constant = math.prod(f.constant for f in factors)

    def exact_moment(self, alpha):
        return math.prod((f.exact_moment((k,)) for f, k in zip(self.factors, alpha)), start=Fraction(1))

    def support_box(self):
        boxes = [f.support_box() for f in self.factors]
        return np.concatenate([b[0] for b in boxes]), np.concatenate([b[1] for b in boxes])

    def density(self, x):
        x = np.asarray(x, dtype=float).reshape(-1)
        return math.prod(f.density(xi) for f, xi in zip(self.factors, x))

    def __repr__(self):
        return f"ProductMeasure({self.factors!r})"


class Pushforward(AnalyticProvider):
    """Image of an analytic measure under ``T(x) = (x - shift) / scale``.

    Moments are the exact multinomial expansion of the base moments.
    """

    kind = "pushforward"

    def __init__(self, base: AnalyticProvider, shift: Sequence[float], scale: float):
        super().__init__()
        self.base = base
        self.dim = base.dim
        self.mass = base.mass
        self.constant = base.constant
        self.shift = np.asarray(shift, dtype=float).reshape(self.dim)
        self.scale = float(scale)
        self._shift_exact = [Fraction(float(s)) for s in self.shift]
        self._scale_exact = Fraction(self.scale)

    def exact_moment(self, alpha):
        total = Fraction(0)
        for beta in iproduct(*(range(a + 1) for a in alpha)):
            mu = self.base.exact_moment(beta)
            if mu == 0:
                continue
            coef = Fraction(1)
            for a, b, s in zip(alpha, beta, self._shift_exact):
                coef *= comb(a, b) * (-s) ** (a - b)
            total += coef * mu
        return total / self._scale_exact ** sum(alpha)

    def support_box(self):
        lo, hi = self.base.support_box()
        return (lo - self.shift) / self.scale, (hi - self.shift) / self.scale

    def density(self, x):
        x = np.asarray(x, dtype=float).reshape(-1)
        return self.base.density(self.shift + self.scale * x) * self.scale**self.dim

    def __repr__(self):
        return f"Pushforward({self.base!r}, shift={self.shift.tolist()!r}, scale={self.scale!r})"


@dataclass(frozen=True)
class SampleCloud:
    """Weighted point cloud; ``weights`` default to uniform ``1/m``."""

    points: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_points(cls, points, weights=None) -> "SampleCloud":
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        m = pts.shape[0]
        if m < 1:
            raise MeasureConfigError("sample cloud needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise MeasureConfigError("sample cloud contains NaN or Inf")
        if weights is None:
            w = np.full(m, 1.0 / m)
        else:
            w = np.asarray(weights, dtype=float).reshape(-1)
            if w.shape[0] != m:
                raise MeasureConfigError("weights length differs from number of points")
            if not np.all(np.isfinite(w)) or np.any(w < 0):
                raise MeasureConfigError("weights must be finite and non-negative")
            if abs(w.sum() - 1.0) > 1e-12:
                raise MeasureConfigError(f"weights sum to {w.sum()!r}, expected 1")
        pts.setflags(write=False)
        w.setflags(write=False)
        return cls(pts, w)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]


class EmpiricalMeasure(MomentProvider):
    """Moments ``sum_j w_j x_j**alpha`` of a :class:`SampleCloud`."""

    kind = "empirical"

    def __init__(self, cloud: SampleCloud):
        super().__init__()
        self.cloud = cloud
        self.dim = cloud.dim
        self.mass = 1.0

    def _compute(self, alpha):
        return float(self.cloud.weights @ np.prod(self.cloud.points ** np.array(alpha), axis=1))

    def moments(self, iset):
        return self.cloud.weights @ monomial_matrix(iset, self.cloud.points)

    def support_box(self):
        return self.cloud.points.min(axis=0), self.cloud.points.max(axis=0)

    def __repr__(self):
        return f"EmpiricalMeasure(m={len(self.cloud)}, d={self.dim})"


def moment(provider: MomentProvider, alpha: Sequence[int]) -> float:
    return provider.moment(alpha)


@dataclass(frozen=True)
class MomentMatrix:
    """``values[a, b] = mu_{alpha_a + alpha_b}`` over ``index_set``."""

    index_set: IndexSet
    values: np.ndarray

    @property
    def size(self) -> int:
        return len(self.index_set)


def hankel_positions(iset: IndexSet) -> tuple[IndexSet, np.ndarray]:
    """Doubled index set and the table ``pos[a, b] = position(alpha_a + alpha_b)``."""
    double = enumerate_indices(iset.dim, 2 * iset.degree)
    exps = iset.exponents
    s = len(iset)
    pos = np.empty((s, s), dtype=np.int64)
    for a in range(s):
        for b in range(a, s):
            pos[a, b] = pos[b, a] = double.position(exps[a] + exps[b])
    return double, pos


def moment_matrix(provider: MomentProvider, iset: IndexSet) -> MomentMatrix:
    """Assemble ``M_n(mu)``; each distinct ``alpha + beta`` is computed once."""
    if iset.dim != provider.dim:
        raise ValueError(f"index set dim {iset.dim} != provider dim {provider.dim}")
    double, pos = hankel_positions(iset)
    mom = provider.moments(double)
    values = mom[pos]
    values.setflags(write=False)
    return MomentMatrix(iset, values)


def pushforward(provider: MomentProvider, shift, scale: float) -> MomentProvider:
    """Provider for the image measure under ``T(x) = (x - shift) / scale``."""
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")
    shift = np.asarray(shift, dtype=float).reshape(provider.dim)
    if isinstance(provider, EmpiricalMeasure):
        pts = (provider.cloud.points - shift) / scale
        return EmpiricalMeasure(SampleCloud.from_points(pts, provider.cloud.weights))
    if isinstance(provider, LebesgueBox):
        bounds = [((a - s) / scale, (b - s) / scale) for (a, b), s in zip(provider.bounds, shift)]
        return LebesgueBox(bounds, mass=provider.mass)
    if isinstance(provider, AnalyticProvider):
        return Pushforward(provider, shift, scale)
    raise TypeError(f"cannot push forward {type(provider).__name__}")


# --- configuration and sample files -----------------------------------------


def provider_from_config(cfg: dict, base_dir: Path | None = None) -> MomentProvider:
    """Build a provider from ``{"kind": ..., "params": {...}}``.

    Kinds and params:

    * ``chebyshev-1d``: ``mass`` (optional, default pi)
    * ``lebesgue-box``: ``bounds`` list of ``[a, b]``, ``mass`` (optional)
    * ``product``: ``factors`` list of 1-D configs
    * ``empirical``: ``csv`` path (relative to ``base_dir``)
    """
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise MeasureConfigError("measure config must be an object with a 'kind' field")
    kind = cfg["kind"]
    params = cfg.get("params", {}) or {}
    if not isinstance(params, dict):
        raise MeasureConfigError("field 'params' must be an object")
    try:
        if kind == "chebyshev-1d":
            return Chebyshev1D(**({"mass": float(params["mass"])} if "mass" in params else {}))
        if kind == "lebesgue-box":
            if "bounds" not in params:
                raise MeasureConfigError("lebesgue-box: missing field 'params.bounds'")
            return LebesgueBox(params["bounds"], params.get("mass"))
        if kind == "product":
            factors = params.get("factors")
            if not factors:
                raise MeasureConfigError("product: missing field 'params.factors'")
            return ProductMeasure([provider_from_config(f, base_dir) for f in factors])
        if kind == "empirical":
            if "csv" not in params:
                raise MeasureConfigError("empirical: missing field 'params.csv'")
            path = Path(params["csv"])
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            return EmpiricalMeasure(read_samples_csv(path))
    except (TypeError, KeyError) as exc:
        raise MeasureConfigError(f"{kind}: bad params ({exc})") from exc
    raise MeasureConfigError(f"unknown measure kind {kind!r}")


def load_measure(source: str) -> MomentProvider:
    """Load a measure from a ``.json``/``.csv`` path or an inline JSON object."""
    text = source.strip()
    if text.startswith("{"):
        try:
            cfg = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MeasureConfigError(
                f"inline measure JSON: line {exc.lineno} col {exc.colno}: {exc.msg}"
            ) from exc
        return provider_from_config(cfg)
    path = Path(source)
    if not path.exists():
        raise MeasureConfigError(f"measure file not found: {source}")
    if path.suffix.lower() == ".csv":
        return EmpiricalMeasure(read_samples_csv(path))
    try:
        cfg = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise MeasureConfigError(f"{path}: line {exc.lineno} col {exc.colno}: {exc.msg}") from exc
    return provider_from_config(cfg, path.parent)


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def parse_samples_csv(text: str, source: str = "<csv>") -> SampleCloud:
    """Parse sample rows; a header is detected by non-numeric cells.

    A final column named ``weight`` (header required) holds non-negative
    weights, normalised here to sum to one.
    """
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise MeasureConfigError(f"{source}: no rows")
    header = None
    if not all(_is_number(c) for c in rows[0]):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        start_line = 2
    else:
        start_line = 1
    has_weight = header is not None and header[-1].lower() == "weight"
    ncol = len(header) if header else len(rows[0]) if rows else 0
    data = []
    for lineno, row in enumerate(rows, start=start_line):
        if len(row) != ncol:
            raise MeasureConfigError(f"{source}: line {lineno}: expected {ncol} fields, got {len(row)}")
        vals = []
        for col, cell in enumerate(row, start=1):
            try:
                v = float(cell)
            except ValueError:
                raise MeasureConfigError(
                    f"{source}: line {lineno} field {col}: not a number: {cell!r}"
                ) from None
            if not math.isfinite(v):
                raise MeasureConfigError(f"{source}: line {lineno} field {col}: non-finite value")
            vals.append(v)
        data.append(vals)
    if not data:
        raise MeasureConfigError(f"{source}: no data rows")
    arr = np.array(data)
    if has_weight:
        if ncol < 2:
            raise MeasureConfigError(f"{source}: weight column without coordinates")
        w = arr[:, -1]
        if np.any(w < 0) or w.sum() <= 0:
            raise MeasureConfigError(f"{source}: weights must be non-negative with positive sum")
        return SampleCloud.from_points(arr[:, :-1], w / w.sum())
    return SampleCloud.from_points(arr)


def read_samples_csv(path) -> SampleCloud:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise MeasureConfigError(f"cannot read {path}: {exc}") from exc
    return parse_samples_csv(text, str(path))


def write_samples_csv(path, points: np.ndarray) -> None:
    points = np.asarray(points, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"x{i + 1}" for i in range(points.shape[1])])
        for row in points:
            writer.writerow([repr(float(v)) for v in row])


def sample(provider: MomentProvider, m: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``m`` points from a normalised analytic provider."""
    if isinstance(provider, Chebyshev1D):
        return np.cos(np.pi * rng.random(m)).reshape(-1, 1)
    if isinstance(provider, LebesgueBox):
        lo, hi = provider.support_box()
        return lo + (hi - lo) * rng.random((m, provider.dim))
    if isinstance(provider, ProductMeasure):
        return np.hstack([sample(f, m, rng) for f in provider.factors])
    if isinstance(provider, Pushforward):
        return (sample(provider.base, m, rng) - provider.shift) / provider.scale
    raise TypeError(f"cannot sample from {type(provider).__name__}")
