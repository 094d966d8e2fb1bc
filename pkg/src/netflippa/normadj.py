"""Degree-normalized, centered adjacency matrices.

For a graph with adjacency ``A``, degrees ``d = A 1`` and ``2m = d' 1``::

    L_alpha = (2m)^alpha / sqrt(n) * D^-alpha (A - d d' / 2m) D^-alpha

``alpha = 0`` gives the (scaled) modularity matrix, ``alpha = 1/2`` a centered
symmetric normalized Laplacian. Powers of zero follow ``0^p = 0`` for every
real ``p``, so isolated nodes get zero rows and an edgeless graph maps to the
zero matrix.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidInputError


@dataclass(frozen=True)
class DegreeData:
    d: np.ndarray
    two_m: int
    D_neg_alpha: np.ndarray


@dataclass(frozen=True)
class NormalizedAdjacency:
    alpha: float
    matrix: np.ndarray
    degrees: DegreeData

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def as_graph(a) -> np.ndarray:
    """Validate ``a`` as a symmetric 0/1 adjacency matrix."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise InvalidInputError(f"adjacency must be a non-empty square matrix, got shape {a.shape}")
    if not np.all((a == 0) | (a == 1)):
        raise InvalidInputError("adjacency entries must be 0 or 1")
    if not np.array_equal(a, a.T):
        raise InvalidInputError("adjacency must be symmetric")
    return a


def zero_power(x, p, strict=True) -> np.ndarray:
    """Elementwise ``x ** p`` with ``0 ** p = 0``.

    With ``strict=False`` the convention is only applied for ``p != 0`` so that
    ``0 ** 0 = 1`` as usual.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] ** p
    if not strict and p == 0:
        out[~pos] = 1.0
    return out


def degree_data(a, alpha: float, strict_zero_power: bool = True) -> DegreeData:
    a = as_graph(a)
    d = a.sum(axis=1, dtype=np.int64)
    return DegreeData(d=d, two_m=int(d.sum()), D_neg_alpha=zero_power(d, -alpha, strict_zero_power))


def build_normalized_adjacency(a, alpha: float, strict_zero_power: bool = True) -> NormalizedAdjacency:
    """Evaluate ``L_alpha`` densely.

    The rank-one centering is formed first, then rows and columns are scaled by
    ``d_i^-alpha`` and finally by ``(2m)^alpha / sqrt(n)``. The upper triangle is
    mirrored so the result is exactly symmetric.
    """
    a = as_graph(a)
    deg = degree_data(a, alpha, strict_zero_power)
    n = a.shape[0]
    if deg.two_m == 0:
        return NormalizedAdjacency(float(alpha), np.zeros((n, n)), deg)
    d = deg.d.astype(float)
    centered = a.astype(float) - np.outer(d, d) / deg.two_m
    s = deg.D_neg_alpha
    L = (s[:, None] * centered * s[None, :]) * (float(deg.two_m) ** alpha / np.sqrt(n))
    L = np.triu(L) + np.triu(L, 1).T
    return NormalizedAdjacency(float(alpha), L, deg)
