"""Degree-corrected stochastic blockmodel in the weakly distinguishable regime.

Edges are drawn independently as ``A_ij = A_ji ~ Bernoulli(q_i q_j C_{g_i g_j})``
for ``i <= j`` (self-loops included), with community weights
``C = 1 + M / sqrt(n)``. Community labels ``g`` are 1-based.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import InvalidInputError, ModelValidityError
from .rng import RngStream, as_generator

FIG_Q_LEVELS = (0.4, 0.9)
FIG_M_WITHIN = 10.0
FIG_M_BETWEEN = -4.0
# P(q_i = 0.4 | g_i = k) for the community-dependent preset
FIG2_LOW_PROB = (1.0, 2.0 / 3.0, 0.0)


@dataclass(frozen=True)
class DcsbmParams:
    """Blockmodel parameters.

    Parameters
    ----------
    q : (n,) array
        Node degree parameters, each in (0, 1).
    g : (n,) int array
        Community labels in ``1..K``.
    M : (K, K) array
        Symmetric community weight offsets.
    q_bounds, M_max : optional
        Extra bounds checked at construction when given.
    """

    q: np.ndarray
    g: np.ndarray
    M: np.ndarray
    q_bounds: Optional[tuple] = field(default=None, compare=False)
    M_max: Optional[float] = field(default=None, compare=False)

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float).ravel()
        g = np.asarray(self.g).ravel()
        M = np.atleast_2d(np.asarray(self.M, dtype=float))
        if q.size == 0:
            raise InvalidInputError("q must be non-empty")
        if g.shape != q.shape:
            raise InvalidInputError(f"g has {g.size} labels but q has {q.size} entries")
        if not np.all(np.isfinite(q)) or np.any(q <= 0) or np.any(q >= 1):
            raise InvalidInputError("every q_i must lie in the open interval (0, 1)")
        if self.q_bounds is not None:
            lo, hi = self.q_bounds
            if np.any(q < lo) or np.any(q > hi):
                raise InvalidInputError(f"q outside supplied bounds [{lo}, {hi}]")
        if not np.all(np.equal(np.mod(g, 1), 0)):
            raise InvalidInputError("labels must be integers")
        g = g.astype(np.int64)
        K = M.shape[0]
        if M.shape != (K, K):
            raise InvalidInputError(f"M must be square, got shape {M.shape}")
        if not np.all(np.isfinite(M)) or not np.array_equal(M, M.T):
            raise InvalidInputError("M must be finite and symmetric")
        if np.any(g < 1) or np.any(g > K):
            raise InvalidInputError(f"labels must lie in 1..{K}")
        if self.M_max is not None and np.any(np.abs(M) > self.M_max):
            raise InvalidInputError(f"|M_ab| exceeds M_max = {self.M_max}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "M", M)
        _check_probabilities(self)

    @property
    def n(self) -> int:
        return self.q.size

    @property
    def K(self) -> int:
        return self.M.shape[0]

    def membership(self) -> np.ndarray:
        """One-hot membership matrix J of shape (n, K)."""
        J = np.zeros((self.n, self.K))
        J[np.arange(self.n), self.g - 1] = 1.0
        return J

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "K": self.K,
            "q": self.q.tolist(),
            "g": self.g.tolist(),
            "M": self.M.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "DcsbmParams":
        try:
            params = cls(q=doc["q"], g=doc["g"], M=doc["M"])
        except KeyError as exc:
            raise InvalidInputError(f"parameter document lacks field {exc}") from None
        for key, value in (("n", params.n), ("K", params.K)):
            if key in doc and int(doc[key]) != value:
                raise InvalidInputError(f"field {key}={doc[key]} disagrees with data ({value})")
        return params


def community_matrix(params: DcsbmParams) -> np.ndarray:
    """``C = 1 + M / sqrt(n)``."""
    return 1.0 + params.M / np.sqrt(params.n)


def _check_probabilities(params: DcsbmParams):
    C = community_matrix(params)
    # bound p_ij = q_i q_j C_ab blockwise without forming the n x n matrix
    present = np.unique(params.g) - 1
    for a in present:
        qa = params.q[params.g == a + 1]
        for b in present:
            if b < a:
                continue
            qb = params.q[params.g == b + 1]
            c = C[a, b]
            if c < 0 or qa.max() * qb.max() * c > 1:
                i, j = _offending_pair(params, a, b)
                p = params.q[i] * params.q[j] * c
                raise ModelValidityError(
                    f"edge probability q_i q_j C_gg = {p:.6g} outside [0, 1] at (i, j) = ({i}, {j})",
                    index=(i, j),
                )


def _offending_pair(params, a, b):
    C = community_matrix(params)[a, b]
    ia = np.flatnonzero(params.g == a + 1)
    ib = np.flatnonzero(params.g == b + 1)
    i = ia[np.argmax(params.q[ia])]
    j = ib[np.argmax(params.q[ib])]
    if C < 0:
        i, j = ia[0], ib[0]
    return int(min(i, j)), int(max(i, j))


def expected_adjacency(params: DcsbmParams) -> np.ndarray:
    """``E[A] = D_q J C J' D_q``, entries ``q_i q_j C_{g_i g_j}``."""
    C = community_matrix(params)
    idx = params.g - 1
    return np.outer(params.q, params.q) * C[np.ix_(idx, idx)]


def sample_adjacency(params: DcsbmParams, rng=None, probabilities=None) -> np.ndarray:
    """Draw a symmetric 0/1 adjacency matrix.

    One uniform variate is consumed per pair ``i <= j`` in row-major order and the
    upper triangle is mirrored. ``probabilities`` overrides ``E[A]`` (used to pin
    degenerate cases); it must be symmetric with entries in [0, 1].
    """
    P = expected_adjacency(params) if probabilities is None else np.asarray(probabilities, float)
    n = P.shape[0]
    if P.shape != (n, n) or np.any(P < 0) or np.any(P > 1) or not np.all(np.isfinite(P)):
        raise ModelValidityError("edge probabilities must form a square matrix in [0, 1]")
    gen = as_generator(rng)
    iu, ju = np.triu_indices(n)
    u = gen.random(iu.size)
    A = np.zeros((n, n), dtype=np.int8)
    A[iu, ju] = u < P[iu, ju]
    A[ju, iu] = A[iu, ju]
    return A


def community_sizes(n: int, K: int = 3) -> list:
    """Preset block sizes ``floor(0.3 n), floor(0.3 n), remainder``."""
    if n < K:
        raise InvalidInputError(f"need n >= K = {K}, got n = {n}")
    first = int(np.floor(0.3 * n))
    return [first, first, n - 2 * first]


def _preset_layout(n):
    sizes = community_sizes(n)
    g = np.repeat(np.arange(1, 4), sizes)
    M = np.full((3, 3), FIG_M_BETWEEN)
    np.fill_diagonal(M, FIG_M_WITHIN)
    return g, M


def max_q_scale(n_min: int) -> float:
    """Largest factor on the preset q levels keeping every probability <= 1 for n >= n_min.

    The unscaled presets are only valid for n >= 1818, so scaling studies over
    smaller graphs shrink both q levels by this common factor.
    """
    c_max = 1.0 + max(FIG_M_WITHIN, 0.0) / np.sqrt(n_min)
    # shave a relative 1e-12 so the tight bound survives rounding
    return float(min(1.0, (1.0 - 1e-12) / (FIG_Q_LEVELS[1] * np.sqrt(c_max))))


def _preset(n, rng, p_low, q_scale):
    g, M = _preset_layout(n)
    if not 0 < q_scale <= 1.0 / FIG_Q_LEVELS[1]:
        raise InvalidInputError(f"q_scale must lie in (0, {1 / FIG_Q_LEVELS[1]:.4g}]")
    gen = as_generator(RngStream(0, 0) if rng is None else rng)
    p_low = np.full(n, p_low) if np.ndim(p_low) == 0 else p_low[g - 1]
    low = gen.random(n) < p_low
    q = q_scale * np.where(low, FIG_Q_LEVELS[0], FIG_Q_LEVELS[1])
    return DcsbmParams(q=q, g=g, M=M)


def preset_fig1(n: int = 2000, rng=None, q_scale: float = 1.0) -> DcsbmParams:
    """Three blocks (30/30/40 %), q_i i.i.d. 0.4 or 0.9 with equal odds.

    ``M`` has 10 on the diagonal and -4 elsewhere. ``rng`` drives the q draws.
    """
    return _preset(n, rng, 0.5, q_scale)


def preset_fig2(n: int = 2000, rng=None, q_scale: float = 1.0) -> DcsbmParams:
    """Same blocks as :func:`preset_fig1`; the odds of q_i = 0.4 depend on the block."""
    return _preset(n, rng, np.asarray(FIG2_LOW_PROB), q_scale)


PRESETS = {"fig1": preset_fig1, "fig2": preset_fig2}
