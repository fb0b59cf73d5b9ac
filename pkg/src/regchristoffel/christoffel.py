"""Cholesky-backed Christoffel function, Christoffel-Darboux kernel and
orthonormal basis.

The inverse moment matrix is never formed: every quadratic form
``v^T M^{-1} w`` is evaluated as ``<L^{-1} v, L^{-1} w>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import LinAlgError, cholesky, solve_triangular

from .index import IndexSet, enumerate_indices, monomial_matrix
from .measures import EmpiricalMeasure, MomentMatrix, MomentProvider, moment_matrix, pushforward


class NotPositiveDefinite(np.linalg.LinAlgError):
    """Moment matrix could not be factorised (rank-deficient moments)."""


@dataclass(frozen=True)
class JitterPolicy:
    """``relative`` is ``None`` for no regularisation, else ``lambda_rel``."""

    relative: float | None = None

    @classmethod
    def none(cls) -> "JitterPolicy":
        return cls(None)

    @classmethod
    def rel(cls, value: float = 1e-12) -> "JitterPolicy":
        return cls(float(value))


@dataclass(frozen=True)
class ChristoffelModel:
    """Factorised moment matrix plus the affine frame it was built in.

    Queries in original coordinates are mapped by ``u = (x - center) / scale``
    before evaluation; widths are divided by ``scale``. With the default frame
    (``center = 0``, ``scale = 1``) this is the identity. Affine invariance of
    both Christoffel functions makes the frame invisible to callers.
    """

    index_set: IndexSet
    matrix: MomentMatrix
    factor: np.ndarray
    jitter_applied: float
    condition_estimate: float
    center: np.ndarray
    scale: float = 1.0

    @property
    def dim(self) -> int:
        return self.index_set.dim

    @property
    def degree(self) -> int:
        return self.index_set.degree

    def to_frame(self, x) -> np.ndarray:
        """Map original-coordinate points into the working frame."""
        pts = np.asarray(x, dtype=float)
        return (pts - self.center) / self.scale

    def whiten(self, vecs: np.ndarray) -> np.ndarray:
        """Columns ``L^{-1} v`` for columns ``v`` of ``vecs``."""
        return solve_triangular(self.factor, vecs, lower=True, check_finite=False)


def _cholesky_or_none(M: np.ndarray, floor: float) -> np.ndarray | None:
    # pivots below ``floor`` mean rank deficiency at working precision
    try:
        L = cholesky(M, lower=True, check_finite=True)
    except (LinAlgError, ValueError):
        return None
    if not np.all(np.isfinite(L)) or np.diag(L).min() ** 2 <= floor:
        return None
    return L


def build(
    matrix: MomentMatrix,
    jitter: JitterPolicy | None = None,
    center: Sequence[float] | None = None,
    scale: float = 1.0,
) -> ChristoffelModel:
    """Factorise ``matrix = L L^T``.

    If the plain factorisation fails and ``jitter.relative`` is set,
    ``relative * trace(M) / s(n)`` is added to the diagonal once and the
    factorisation retried.

    Raises
    ------
    NotPositiveDefinite
        If no factorisation is obtained.
    """
    jitter = jitter or JitterPolicy.none()
    M = np.asarray(matrix.values, dtype=float)
    if not np.allclose(M, M.T, rtol=0, atol=0):
        raise ValueError("moment matrix is not symmetric")
    s = M.shape[0]
    floor = s * np.finfo(float).eps * M.diagonal().max()
    applied = 0.0
    L = _cholesky_or_none(M, floor)
    if L is None and jitter.relative is not None:
        applied = jitter.relative * np.trace(M) / s
        L = _cholesky_or_none(M + applied * np.eye(s), floor)
    if L is None:
        extra = f" even with jitter {applied:.3g}" if applied else ""
        raise NotPositiveDefinite(f"moment matrix of size {s} is not positive definite{extra}")
    diag = np.diag(L)
    cond = float((diag.max() / diag.min()) ** 2)
    L.setflags(write=False)
    ctr = np.zeros(matrix.index_set.dim) if center is None else np.asarray(center, dtype=float)
    return ChristoffelModel(matrix.index_set, matrix, L, float(applied), cond, ctr, float(scale))


def default_jitter(provider: MomentProvider) -> JitterPolicy:
    return JitterPolicy.rel(1e-12) if isinstance(provider, EmpiricalMeasure) else JitterPolicy.none()


def normalizing_frame(provider: MomentProvider) -> tuple[np.ndarray, float]:
    """Center and isotropic scale sending the support box into ``[-1, 1]^d``."""
    lo, hi = provider.support_box()
    center = (lo + hi) / 2.0
    half = float(np.max((hi - lo) / 2.0))
    return center, (half if half > 0 else 1.0)


def fit(
    provider: MomentProvider,
    degree: int,
    rescale: bool = True,
    jitter: JitterPolicy | None = None,
) -> ChristoffelModel:
    """Build a model for ``provider`` at ``degree``.

    Empirical clouds with fewer distinct atoms than ``s(n)`` raise
    :class:`NotPositiveDefinite` up front.

    With ``rescale`` the measure is first pushed forward into ``[-1, 1]^d``,
    which keeps monomials bounded and the Cholesky factor accurate to much
    higher degree than on e.g. ``[0, 1]``.
    """
    iset = enumerate_indices(provider.dim, degree)
    if isinstance(provider, EmpiricalMeasure):
        # rank(M) <= number of distinct atoms; jitter would hide this
        cloud = provider.cloud
        atoms = len(np.unique(cloud.points[cloud.weights > 0], axis=0))
        if atoms < len(iset):
            raise NotPositiveDefinite(
                f"{atoms} distinct sample points cannot support s(n)={len(iset)} monomials"
            )
    if jitter is None:
        jitter = default_jitter(provider)
    if rescale:
        center, r = normalizing_frame(provider)
        if np.any(center != 0) or r != 1.0:
            work = pushforward(provider, center, r)
            return build(moment_matrix(work, iset), jitter, center, r)
    return build(moment_matrix(provider, iset), jitter)


def _features(model: ChristoffelModel, x) -> tuple[np.ndarray, bool]:
    """Whitened monomial vectors (columns) for one point or an ``(m, d)`` array."""
    pts = np.asarray(x, dtype=float)
    single = pts.ndim <= 1
    pts = pts.reshape(1, -1) if single else pts
    if pts.shape[1] != model.dim:
        raise ValueError(f"point dimension {pts.shape[1]} != model dimension {model.dim}")
    V = monomial_matrix(model.index_set, model.to_frame(pts)).T
    return model.whiten(V), single


def lambda_inv(model: ChristoffelModel, x):
    """``Lambda_n(x)^{-1} = v_n(x)^T M^{-1} v_n(x)``; vectorised over rows of ``x``."""
    Z, single = _features(model, x)
    out = np.einsum("ij,ij->j", Z, Z)
    return float(out[0]) if single else out


def christoffel_function(model: ChristoffelModel, x):
    return 1.0 / lambda_inv(model, x)


def cd_kernel(model: ChristoffelModel, x, y) -> float:
    """Christoffel-Darboux kernel ``K_n(x, y) = v(x)^T M^{-1} v(y)``."""
    zx, _ = _features(model, np.asarray(x, dtype=float).reshape(-1))
    zy, _ = _features(model, np.asarray(y, dtype=float).reshape(-1))
    # sum in a fixed order so that K(x, y) == K(y, x) bit for bit
    return float(np.sum(zx[:, 0] * zy[:, 0]))


@dataclass(frozen=True)
class OrthonormalBasis:
    """Row ``a`` of ``coeffs`` holds ``P_alpha_a`` in the model's monomial basis."""

    index_set: IndexSet
    coeffs: np.ndarray
    center: np.ndarray
    scale: float

    def __call__(self, x) -> np.ndarray:
        """Values ``(P_alpha(x))_alpha`` at one point (or rows for many)."""
        pts = np.asarray(x, dtype=float)
        single = pts.ndim <= 1
        pts = pts.reshape(1, -1) if single else pts
        V = monomial_matrix(self.index_set, (pts - self.center) / self.scale)
        out = V @ self.coeffs.T
        return out[0] if single else out


def orthonormal_basis(model: ChristoffelModel) -> OrthonormalBasis:
    """``D = L^{-1}``; then ``D M D^T = I`` and ``D^T D = M^{-1}``.

    Coefficients refer to the model's working frame.
    """
    D = model.whiten(np.eye(len(model.index_set)))
    D.setflags(write=False)
    return OrthonormalBasis(model.index_set, D, model.center, model.scale)
