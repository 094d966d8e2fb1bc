"""Signal-plus-noise decomposition under a known blockmodel, and Monte Carlo
checks of how fast the approximation and signflip statistics decay with n.

With ``X = A - E[A]`` the normalized adjacency is approximated by::

    L_tilde = U Lam U'  +  n^-1/2 D_q^-alpha X D_q^-alpha
              (signal S)   (noise N)

where ``U = [D_q^(1-alpha) J / sqrt(n), D_q^-alpha X 1 / (q'1)]``,
``v_c = J'q / 1'q`` and::

    Lam = [[(I - 1 v_c') M (I - v_c 1'),  -1],
           [-1',                           0]]

Each ``thm*`` statistic samples one graph (and one sign matrix) from the
supplied random stream; the graph is always drawn first.
"""
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .dcsbm import PRESETS, DcsbmParams, expected_adjacency, max_q_scale, sample_adjacency
from .exceptions import InvalidInputError
from .flippa import THREADS_ENV, symmetric_signs
from .normadj import as_graph, build_normalized_adjacency
from .rng import RngStream, as_generator
from .spectra import op_norm, two_inf_norm

MIN_GRID = 3
MIN_REPS = 20
SLOPE_BAND = (-0.65, -0.30)


@dataclass
class SignalNoiseParts:
    U: np.ndarray
    Lambda: np.ndarray
    v_c: np.ndarray
    X: np.ndarray
    S: np.ndarray
    N: np.ndarray
    L_tilde: np.ndarray


def _mirror(m):
    return np.triu(m) + np.triu(m, 1).T


def build_parts(params: DcsbmParams, a, alpha: float) -> SignalNoiseParts:
    """Signal and noise parts of ``L_alpha`` relative to ``params``' expected adjacency."""
    a = as_graph(a)
    n = params.n
    if a.shape != (n, n):
        raise InvalidInputError(f"graph has {a.shape[0]} nodes but params describe {n}")
    q = params.q
    J = params.membership()
    K = params.K
    X = a.astype(float) - expected_adjacency(params)

    q_neg = q ** (-alpha)
    U = np.empty((n, K + 1))
    U[:, :K] = (q ** (1.0 - alpha))[:, None] * J / np.sqrt(n)
    U[:, K] = q_neg * X.sum(axis=1) / q.sum()

    v_c = J.T @ q / q.sum()
    left = np.eye(K) - np.outer(np.ones(K), v_c)
    Lam = np.zeros((K + 1, K + 1))
    Lam[:K, :K] = left @ params.M @ left.T
    Lam[:K, K] = -1.0
    Lam[K, :K] = -1.0
    Lam = _mirror(Lam)

    S = _mirror(U @ Lam @ U.T)
    N = _mirror((q_neg[:, None] * X * q_neg[None, :]) / np.sqrt(n))
    return SignalNoiseParts(U=U, Lambda=Lam, v_c=v_c, X=X, S=S, N=N, L_tilde=S + N)


def moment_norm(samples, p: int = 1) -> float:
    """Monte Carlo moment norm ``mean(|x|^p)^(1/p)``."""
    x = np.abs(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise InvalidInputError("moment norm of an empty sample")
    if p < 1:
        raise InvalidInputError(f"moment order must be a positive integer, got {p}")
    return float(np.mean(x ** p) ** (1.0 / p))


# --- statistics on fixed matrices ------------------------------------------

def _flip(m, signs):
    return np.where(signs < 0, -m, m)


def approx_gap(L, L_tilde, signs=None) -> float:
    """``||R*L - R*L_tilde||_op`` (``R = 1`` when ``signs`` is None)."""
    diff = np.asarray(L) - np.asarray(L_tilde)
    return op_norm(diff if signs is None else _flip(diff, signs))


def signal_norms(S, signs):
    """``(||S||_op, ||R*S||_op)``."""
    return op_norm(S), op_norm(_flip(S, signs))


def noise_norms(N, signs):
    """``(||R*N||_op, ||N||_op)``."""
    return op_norm(_flip(N, signs)), op_norm(N)


def floor_gap(L, N, signs) -> float:
    """``| ||R*L||_op - ||N||_op |``."""
    return abs(op_norm(_flip(L, signs)) - op_norm(N))


# --- sampled statistics ------------------------------------------------------

def _draw(params, alpha, rng, signs=None, flip=True):
    gen = as_generator(rng)
    a = sample_adjacency(params, gen)
    L = build_normalized_adjacency(a, alpha).matrix
    parts = build_parts(params, a, alpha)
    if signs is None and flip:
        signs = symmetric_signs(params.n, gen)
    return L, parts, signs


def thm1_gap(params, alpha, rng=None) -> float:
    """Operator-norm distance between ``L_alpha`` and its approximation, one graph."""
    L, parts, _ = _draw(params, alpha, rng, flip=False)
    return approx_gap(L, parts.L_tilde)


def thm1_flip_gap(params, alpha, rng=None, signs=None) -> float:
    """Same as :func:`thm1_gap` after a common signflip of both matrices."""
    L, parts, R = _draw(params, alpha, rng, signs)
    return approx_gap(L, parts.L_tilde, R)


def thm2_stats(params, alpha, rng=None, signs=None):
    """``(||S||_{2,inf}, ||R*S||_op)`` for one graph and one flip."""
    _, parts, R = _draw(params, alpha, rng, signs)
    return two_inf_norm(parts.S), op_norm(_flip(parts.S, R))


def thm3_gap(params, alpha, rng=None, signs=None) -> float:
    """``| ||R*N||_op - ||N||_op |`` for one graph and one flip."""
    _, parts, R = _draw(params, alpha, rng, signs)
    flipped, plain = noise_norms(parts.N, R)
    return abs(flipped - plain)


def thm4_gap(params, alpha, rng=None, signs=None) -> float:
    """``| ||R*L_alpha||_op - ||N||_op |``: how far the flipped matrix is from the noise floor."""
    L, parts, R = _draw(params, alpha, rng, signs)
    return floor_gap(L, parts.N, R)


STATS = {
    "thm1": thm1_gap,
    "thm1flip": thm1_flip_gap,
    "thm2a": lambda p, a, r: thm2_stats(p, a, r)[0],
    "thm2b": lambda p, a, r: thm2_stats(p, a, r)[1],
    "thm3": thm3_gap,
    "thm4": thm4_gap,
}


# --- decay fits ----------------------------------------------------------------

@dataclass
class DecayFit:
    grid: np.ndarray
    estimates: np.ndarray
    slope: float
    intercept: float
    stat: str = ""
    alpha: float = float("nan")
    reps: int = 0
    moment: int = 1
    samples: Optional[np.ndarray] = field(default=None, repr=False)

    def within(self, band=SLOPE_BAND) -> bool:
        return band[0] <= self.slope <= band[1]


def fit_loglog(grid, estimates):
    """Least-squares line through ``(log n, log estimate)``; returns ``(slope, intercept)``."""
    x = np.log(np.asarray(grid, dtype=float))
    y = np.log(np.asarray(estimates, dtype=float))
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(slope), float(intercept)


def _check_grid(grid):
    grid = np.asarray(grid, dtype=np.int64)
    if grid.ndim != 1 or grid.size < MIN_GRID:
        raise InvalidInputError(f"grid needs at least {MIN_GRID} values of n")
    if np.any(np.diff(grid) <= 0) or grid[0] < 3:
        raise InvalidInputError("grid must be strictly increasing with n >= 3")
    return grid


def synthetic_decay(grid, scale=1.0, exponent=-0.5, log_power=0.0) -> DecayFit:
    """Fit exact values ``scale * n^exponent * log(n)^log_power`` (harness self-test)."""
    grid = _check_grid(grid)
    n = grid.astype(float)
    est = scale * n ** exponent * np.log(n) ** log_power
    slope, intercept = fit_loglog(n, est)
    return DecayFit(grid, est, slope, intercept, stat="synthetic")


def _stream(seed, n, rep, tag):
    return RngStream(seed, ((int(n) << 24 | int(rep)) << 8) | tag)


def family_params(family: Union[str, Callable], n: int, rng, n_min: int) -> DcsbmParams:
    """Blockmodel for one replicate.

    A preset name draws its q values with ``rng`` and shrinks the q levels by
    ``max_q_scale(n_min)`` so one family stays valid across the whole grid.
    """
    if callable(family):
        return family(n, rng)
    try:
        preset = PRESETS[family]
    except KeyError:
        raise InvalidInputError(f"unknown family {family!r}; choose from {sorted(PRESETS)}") from None
    return preset(n, rng, q_scale=max_q_scale(n_min))


def replicate(stat, family, n, rep, alpha, seed, n_min):
    fn = STATS[stat] if isinstance(stat, str) else stat
    params = family_params(family, n, _stream(seed, n, rep, 0), n_min)
    return float(fn(params, alpha, _stream(seed, n, rep, 1)))


def decay_fit(stat="thm4", grid=(250, 500, 1000, 2000), reps: int = 50,
              family="fig1", alpha: float = 0.5, seed: int = 0, moment: int = 1,
              threads=None) -> DecayFit:
    """Mean statistic over seeded replicates at each n, then a log-log slope.

    Replicate ``rep`` at size ``n`` depends only on ``(seed, n, rep)``, so the
    result does not depend on ``threads``.
    """
    if isinstance(stat, str) and stat not in STATS:
        raise InvalidInputError(f"unknown statistic {stat!r}; choose from {sorted(STATS)}")
    grid = _check_grid(grid)
    if reps < MIN_REPS:
        raise InvalidInputError(f"reps must be at least {MIN_REPS}, got {reps}")
    n_min = int(grid[0])
    jobs = [(int(n), r) for n in grid for r in range(reps)]

    def run(job):
        return replicate(stat, family, job[0], job[1], alpha, seed, n_min)

    if threads is None:
        threads = int(os.environ.get(THREADS_ENV) or 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(run, jobs))
    else:
        values = [run(job) for job in jobs]
    samples = np.array(values).reshape(grid.size, reps)
    est = np.array([moment_norm(row, moment) for row in samples])
    slope, intercept = fit_loglog(grid, est)
    name = stat if isinstance(stat, str) else getattr(stat, "__name__", "custom")
    return DecayFit(grid, est, slope, intercept, stat=name, alpha=float(alpha),
                    reps=reps, moment=moment, samples=samples)
