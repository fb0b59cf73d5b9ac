"""Graded-lexicographic multi-index sets and monomial evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

MultiIndex = tuple[int, ...]


def _graded_block(dim: int, degree: int) -> list[MultiIndex]:
    """All exponents of exactly ``degree`` in lexicographically decreasing order."""
    if dim == 1:
        return [(degree,)]
    out = []
    for first in range(degree, -1, -1):
        for rest in _graded_block(dim - 1, degree - first):
            out.append((first,) + rest)
    return out


@dataclass(frozen=True)
class IndexSet:
    """Exponents ``alpha`` with ``|alpha| <= degree`` in graded-lex order.

    Within one total degree, exponents are sorted so that ``x1`` dominates,
    e.g. for ``d=2``: ``1, x1, x2, x1^2, x1 x2, x2^2, ...``. Truncating to a
    lower degree is therefore a prefix of ``entries``.
    """

    dim: int
    degree: int
    entries: tuple[MultiIndex, ...]
    _position: dict = field(repr=False, compare=False)
    # entry k (k > 0) equals entries[parent[k]] with exponent of var[k] bumped by one
    parent: np.ndarray = field(repr=False, compare=False)
    var: np.ndarray = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, k: int) -> MultiIndex:
        return self.entries[k]

    def position(self, alpha: Sequence[int]) -> int:
        return self._position[tuple(alpha)]

    def __contains__(self, alpha) -> bool:
        return tuple(alpha) in self._position

    def degree_slice(self, degree: int) -> int:
        """Number of leading entries with total degree ``<= degree``."""
        return comb(self.dim + degree, self.dim)

    @property
    def exponents(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64).reshape(len(self), self.dim)


def enumerate_indices(dim: int, degree: int) -> IndexSet:
    """Enumerate the graded-lex ordered exponents of degree ``<= degree``.

    Parameters
    ----------
    dim : int
        Number of variables ``d >= 1``.
    degree : int
        Maximal total degree ``n >= 0``.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    entries = []
    for k in range(degree + 1):
        entries.extend(_graded_block(dim, k))
    position = {a: i for i, a in enumerate(entries)}
    parent = np.zeros(len(entries), dtype=np.int64)
    var = np.zeros(len(entries), dtype=np.int64)
    for i, a in enumerate(entries[1:], start=1):
        j = next(t for t, e in enumerate(a) if e > 0)
        p = list(a)
        p[j] -= 1
        parent[i] = position[tuple(p)]
        var[i] = j
    return IndexSet(dim, degree, tuple(entries), position, parent, var)


def _as_points(iset: IndexSet, x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    single = arr.ndim <= 1
    arr = np.atleast_2d(arr.reshape(1, -1) if single else arr)
    if arr.shape[1] != iset.dim:
        raise ValueError(
            f"point dimension {arr.shape[1]} does not match index set dimension {iset.dim}"
        )
    return arr, single


def monomial_matrix(iset: IndexSet, points) -> np.ndarray:
    """Rows ``v_n(x_j)`` for an ``(m, d)`` array of points."""
    pts, _ = _as_points(iset, points)
    out = np.empty((pts.shape[0], len(iset)))
    out[:, 0] = 1.0
    for k in range(1, len(iset)):
        out[:, k] = out[:, iset.parent[k]] * pts[:, iset.var[k]]
    return out


def monomial_vector(iset: IndexSet, x) -> np.ndarray:
    """Vector of monomials ``x**alpha`` over ``iset``, length ``s(n)``.

    Each monomial is one multiplication away from its graded-lex parent.
    """
    pts, single = _as_points(iset, x)
    if not single:
        raise ValueError("monomial_vector expects a single point; use monomial_matrix")
    return monomial_matrix(iset, pts)[0]
