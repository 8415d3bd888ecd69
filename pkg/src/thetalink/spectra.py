"""Eigenvalues of real symmetric matrices and empirical spectral statistics."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from thetalink import _backend
from thetalink.errors import ConfigError
from thetalink.matrix import build_matrix


def eigenvalues_symmetric(a, sym_tol: float = 1e-12, backend: Optional[str] = None) -> np.ndarray:
    """All eigenvalues of a real symmetric matrix, ascending.

    Householder tridiagonalization followed by implicit-shift QL on the
    tridiagonal. Only the lower triangle is used once symmetry is checked.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ConfigError("matrix has non-finite entries")
    if a.size and np.max(np.abs(a - a.T)) > sym_tol:
        raise ConfigError("matrix is not symmetric")
    k = _backend.kernels if backend is None else _backend.get(backend)
    d, e = k.tridiagonalize(a)
    return k.tridiagonal_eigenvalues(d, e)


def empirical_moment(eigs, h: int) -> float:
    """(1/n) sum lambda_i^h."""
    eigs = np.asarray(eigs, dtype=np.float64)
    if eigs.size == 0:
        raise ConfigError("empty eigenvalue list")
    if h < 1:
        raise ConfigError(f"moment order must be >= 1, got {h}")
    return float(np.mean(eigs ** h))


def default_zero_tol(eigs) -> float:
    eigs = np.asarray(eigs)
    scale = float(np.max(np.abs(eigs))) if eigs.size else 0.0
    return 1e-6 * (1.0 + scale)


def zero_proportion(eigs, zero_tol: Optional[float] = None) -> float:
    eigs = np.asarray(eigs, dtype=np.float64)
    if eigs.size == 0:
        raise ConfigError("empty eigenvalue list")
    tol = default_zero_tol(eigs) if zero_tol is None else zero_tol
    if tol <= 0:
        raise ConfigError("zero tolerance must be positive")
    return float(np.count_nonzero(np.abs(eigs) <= tol)) / eigs.size


@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    underflow: int = 0
    overflow: int = 0
    dropped: int = 0

    def rows(self):
        for left, right, c in zip(self.edges[:-1], self.edges[1:], self.counts):
            yield float(left), float(right), int(c)


def histogram(eigs, bins: int = 81, range: Optional[Sequence[float]] = None,
              exclude_zero: bool = False, zero_tol: Optional[float] = None) -> Histogram:
    """Equal-width histogram; values outside ``range`` go to under/overflow.

    With ``exclude_zero`` the values with |x| <= zero_tol are removed first
    and their number is reported as ``dropped``.
    """
    eigs = np.asarray(eigs, dtype=np.float64)
    if bins < 1:
        raise ConfigError("bins must be >= 1")
    if range is None:
        half = float(np.max(np.abs(eigs))) if eigs.size else 1.0
        range = (-half, half) if half > 0 else (-1.0, 1.0)
    lo, hi = float(range[0]), float(range[1])
    if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
        raise ConfigError(f"invalid histogram range {range!r}")
    dropped = 0
    if exclude_zero and eigs.size:
        tol = default_zero_tol(eigs) if zero_tol is None else zero_tol
        keep = np.abs(eigs) > tol
        dropped = int(eigs.size - np.count_nonzero(keep))
        eigs = eigs[keep]
    counts, edges = np.histogram(eigs, bins=bins, range=(lo, hi))
    return Histogram(edges=edges, counts=counts.astype(np.int64),
                     underflow=int(np.count_nonzero(eigs < lo)),
                     overflow=int(np.count_nonzero(eigs > hi)), dropped=dropped)


@dataclass
class SpectralSummary:
    eigenvalues: np.ndarray
    moments: np.ndarray  # moments[h-1] = beta_h
    zero_proportion: float
    histogram: Histogram
    zero_tol: float = 0.0


def summarize(eigs, max_moment: int = 6, zero_tol: Optional[float] = None, bins: int = 81,
              range=None, exclude_zero: bool = False) -> SpectralSummary:
    eigs = np.sort(np.asarray(eigs, dtype=np.float64))
    tol = default_zero_tol(eigs) if zero_tol is None else zero_tol
    return SpectralSummary(
        eigenvalues=eigs,
        moments=np.array([empirical_moment(eigs, h) for h in np.arange(1, max_moment + 1)]),
        zero_proportion=zero_proportion(eigs, tol),
        histogram=histogram(eigs, bins, range, exclude_zero, tol),
        zero_tol=tol,
    )


def ensemble_eigenvalues(link, n: int, reps: int, dist: str = "gaussian", seed: int = 0,
                         workers: int = 1, backend: Optional[str] = None) -> list:
    """Eigenvalues of ``reps`` independent matrices; replicate r uses stream (seed, r).

    The output depends only on the arguments, never on ``workers``.
    """
    if reps < 1:
        raise ConfigError("reps must be >= 1")

    def one(r):
        return eigenvalues_symmetric(build_matrix(n, link, dist, seed, r).entries, backend=backend)

    if workers <= 1:
        return [one(r) for r in range(reps)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(reps)))


@dataclass
class EnsembleMoments:
    orders: np.ndarray
    mean: np.ndarray
    std_error: np.ndarray
    reps: int
    per_rep: np.ndarray = field(repr=False, default=None)

    def __getitem__(self, h: int):
        return float(self.mean[h - 1]), float(self.std_error[h - 1])


def moments_of(spectra: Sequence[np.ndarray], max_moment: int) -> EnsembleMoments:
    per_rep = np.array([[empirical_moment(e, h) for h in range(1, max_moment + 1)] for e in spectra])
    reps = per_rep.shape[0]
    se = per_rep.std(axis=0, ddof=1) / math.sqrt(reps) if reps > 1 else np.full(max_moment, np.nan)
    return EnsembleMoments(orders=np.arange(1, max_moment + 1), mean=per_rep.mean(axis=0),
                           std_error=se, reps=reps, per_rep=per_rep)


def ensemble_moments(theta, n: int, reps: int, dist: str = "gaussian", seed: int = 0,
                     max_moment: int = 4, workers: int = 1) -> EnsembleMoments:
    """Averaged beta_h, h = 1..max_moment, with standard errors over replicates."""
    return moments_of(ensemble_eigenvalues(theta, n, reps, dist, seed, workers), max_moment)


def ks_distance(sample, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """sup_x |F_sample(x) - cdf(x)|, exact for samples with ties and cdfs with atoms.

    Both sides are compared at every distinct sample value and at its left
    limit; the cdf's left limit is taken as cdf(nextafter(x, -inf)). A sample
    drawn entirely from an atom therefore has distance 0 from that atom's cdf.
    """
    x = np.sort(np.asarray(sample, dtype=np.float64))
    if x.size == 0:
        raise ConfigError("empty sample")
    vals, counts = np.unique(x, return_counts=True)
    upper = np.cumsum(counts) / x.size
    lower = upper - counts / x.size
    f = np.asarray(cdf(vals), dtype=np.float64)
    f_left = np.asarray(cdf(np.nextafter(vals, -np.inf)), dtype=np.float64)
    return float(max(np.max(np.abs(upper - f)), np.max(np.abs(lower - f_left))))


def snap_zeros(eigs, zero_tol: Optional[float] = None) -> np.ndarray:
    """Copy of ``eigs`` with |x| <= zero_tol replaced by exact zeros."""
    eigs = np.array(eigs, dtype=np.float64)
    tol = default_zero_tol(eigs) if zero_tol is None else zero_tol
    eigs[np.abs(eigs) <= tol] = 0.0
    return eigs
