"""Network signflip parallel analysis.

The observed spectrum of a normalized adjacency matrix is compared against the
leading eigenvalues of randomly signflipped copies ``R * L``, where ``R`` is a
symmetric matrix of independent Rademacher signs. The selected embedding
dimension is the number of leading eigenvalues that rise above a quantile of
the flipped leading eigenvalues.
"""
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import InvalidInputError
from .normadj import NormalizedAdjacency
from .rng import RngStream, as_generator
from .spectra import as_symmetric, eigh_topk, eigvals_sym, leading_eigval

MODES = ("upper-edge", "pairwise")
THREADS_ENV = "NETFLIPPA_THREADS"


@dataclass(frozen=True)
class FlipConfig:
    trials: int = 20
    quantile: float = 1.0
    seed: int = 0
    mode: str = "upper-edge"
    margin: float = 0.0

    def __post_init__(self):
        if not isinstance(self.trials, (int, np.integer)) or self.trials < 1:
            raise InvalidInputError(f"trials must be a positive integer, got {self.trials!r}")
        if not 0.0 <= self.quantile <= 1.0:
            raise InvalidInputError(f"quantile must lie in [0, 1], got {self.quantile!r}")
        if self.mode not in MODES:
            raise InvalidInputError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not math.isfinite(self.margin):
            raise InvalidInputError("margin must be finite")


@dataclass
class SelectionResult:
    """Outcome of :func:`select_dimension`.

    ``threshold`` is the cutoff applied to the first eigenvalue that fails; in
    pairwise mode ``pairwise_thresholds`` holds one cutoff per index and
    ``flip_spectra`` the full flipped spectra (trials x n).
    """

    eigenvalues: np.ndarray
    flip_leading: np.ndarray
    threshold: float
    k_hat: int
    mode: str = "upper-edge"
    margin: float = 0.0
    flip_spectra: Optional[np.ndarray] = field(default=None, repr=False)
    pairwise_thresholds: Optional[np.ndarray] = field(default=None, repr=False)


def symmetric_signs(n: int, rng=None) -> np.ndarray:
    """Symmetric n x n matrix of independent +-1 signs on ``i <= j``.

    Signs are drawn in row-major order over the upper triangle, diagonal
    included, then mirrored.
    """
    gen = as_generator(rng)
    iu, ju = np.triu_indices(n)
    draws = gen.integers(0, 2, size=iu.size, dtype=np.int8)
    R = np.empty((n, n), dtype=np.int8)
    R[iu, ju] = 2 * draws - 1
    R[ju, iu] = R[iu, ju]
    return R


def signflip(l, rng=None, signs=None) -> np.ndarray:
    """Hadamard product ``R * L`` with a random symmetric sign matrix.

    ``signs`` substitutes a fixed sign matrix for the random one.
    """
    l = as_symmetric(_matrix(l))
    R = symmetric_signs(l.shape[0], rng) if signs is None else np.asarray(signs)
    if R.shape != l.shape:
        raise InvalidInputError(f"sign matrix shape {R.shape} does not match {l.shape}")
    return np.where(R < 0, -l, l)


def empirical_quantile(values, gamma: float) -> float:
    """Order statistic at 1-based position ``ceil(gamma * T)``; ``gamma = 0`` gives the minimum.

    No interpolation is done.
    """
    v = np.sort(np.asarray(values, dtype=float).ravel())
    if v.size == 0:
        raise InvalidInputError("cannot take a quantile of an empty sequence")
    if not 0.0 <= gamma <= 1.0:
        raise InvalidInputError(f"quantile must lie in [0, 1], got {gamma!r}")
    pos = gamma * v.size
    # 0.7 * 10 evaluates to 7.000000000000001; snap such products to the integer
    if abs(pos - round(pos)) < 1e-9:
        pos = round(pos)
    idx = max(1, math.ceil(pos))
    return float(v[idx - 1])


def first_k_below(eigenvalues, threshold, margin: float = 0.0) -> int:
    """Smallest ``k >= 0`` with ``eigenvalues[k] <= threshold + margin`` (0-based), else ``n``.

    ``threshold`` may be a scalar or one cutoff per eigenvalue.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    cut = np.broadcast_to(np.asarray(threshold, dtype=float), lam.shape) + margin
    below = np.flatnonzero(lam <= cut)
    return int(below[0]) if below.size else int(lam.size)


def _matrix(l) -> np.ndarray:
    return l.matrix if isinstance(l, NormalizedAdjacency) else l


def _n_workers(threads):
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


def _run_trial(L, seed, t, full):
    flipped = signflip(L, RngStream(seed, t))
    if full:
        return eigvals_sym(flipped)
    return leading_eigval(flipped)


def flip_trials(l, cfg: FlipConfig, full_spectrum=False, threads=None) -> np.ndarray:
    """Run the signflip trials; trial ``t`` (1-based) uses ``RngStream(cfg.seed, t)``.

    Returns the leading flipped eigenvalue per trial, or the full flipped
    spectra (trials x n) when ``full_spectrum`` is set. Output is independent of
    ``threads``.
    """
    L = as_symmetric(_matrix(l))
    ts = range(1, cfg.trials + 1)
    workers = min(_n_workers(threads), cfg.trials)
    if workers == 1:
        out = [_run_trial(L, cfg.seed, t, full_spectrum) for t in ts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(lambda t: _run_trial(L, cfg.seed, t, full_spectrum), ts))
    return np.array(out, dtype=float)


def select_dimension(l, cfg: Optional[FlipConfig] = None, threads=None,
                     threshold: Optional[float] = None) -> SelectionResult:
    """Select the embedding dimension of a normalized adjacency matrix.

    Parameters
    ----------
    l : NormalizedAdjacency or (n, n) array
    cfg : FlipConfig
        Trials, quantile, seed, comparison mode and margin.
    threads : int, optional
        Worker cap for the trial loop; defaults to ``$NETFLIPPA_THREADS`` or the
        CPU count.
    threshold : float, optional
        Skip the trials and use this cutoff directly (upper-edge only).

    Returns
    -------
    SelectionResult
    """
    cfg = cfg or FlipConfig()
    L = as_symmetric(_matrix(l))
    lam = eigvals_sym(L)
    if threshold is not None:
        k = first_k_below(lam, threshold, cfg.margin)
        return SelectionResult(lam, np.array([]), float(threshold), k, cfg.mode, cfg.margin)

    if cfg.mode == "upper-edge":
        leading = flip_trials(L, cfg, threads=threads)
        thr = empirical_quantile(leading, cfg.quantile)
        k = first_k_below(lam, thr, cfg.margin)
        return SelectionResult(lam, leading, thr, k, cfg.mode, cfg.margin)

    spectra = flip_trials(L, cfg, full_spectrum=True, threads=threads)
    per_index = np.array([empirical_quantile(spectra[:, j], cfg.quantile)
                          for j in range(spectra.shape[1])])
    k = first_k_below(lam, per_index, cfg.margin)
    thr = float(per_index[min(k, lam.size - 1)])
    return SelectionResult(lam, spectra[:, 0].copy(), thr, k, cfg.mode, cfg.margin,
                           flip_spectra=spectra, pairwise_thresholds=per_index)


def embed(l, k: int) -> np.ndarray:
    """Top-``k`` eigenvectors as an n x k embedding, first nonzero coordinate positive."""
    _, vectors = eigh_topk(_matrix(l), k)
    return vectors
