"""Closed-form laws: symmetrized Rayleigh, the integer-theta law, fourth moments, bounds."""
from __future__ import annotations

import math

import numpy as np

from thetalink.errors import ConfigError
from thetalink.matrix import make_rng


def rayleigh_density(x):
    x = np.asarray(x, dtype=np.float64)
    return np.abs(x) * np.exp(-x * x)


def rayleigh_cdf(x):
    x = np.asarray(x, dtype=np.float64)
    tail = 0.5 * np.exp(-x * x)
    return np.where(x < 0, tail, 1.0 - tail)


def rayleigh_quantile(u):
    u = np.asarray(u, dtype=np.float64)
    lower = u < 0.5
    mag = np.sqrt(-np.log(np.where(lower, 2 * u, 2 * (1 - u))))
    return np.where(lower, -mag, mag)


def rayleigh_sample(seed: int, count: int) -> np.ndarray:
    """|X| = sqrt(-log U) with an independent fair sign."""
    rng = make_rng(seed, 0x4A7)
    mag = np.sqrt(-np.log1p(-rng.random(count)))
    sign = np.where(rng.random(count) < 0.5, -1.0, 1.0)
    return sign * mag


def _check_integer_theta(theta) -> int:
    if not (float(theta) == int(theta) and theta >= 1):
        raise ConfigError(f"theta must be a positive integer, got {theta!r}")
    return int(theta)


def integer_theta_cdf(theta, x):
    """(1 - 1/theta) 1{x >= 0} + (1/theta) F_1(x / sqrt(theta)); right-continuous."""
    t = _check_integer_theta(theta)
    x = np.asarray(x, dtype=np.float64)
    return (1.0 - 1.0 / t) * (x >= 0) + rayleigh_cdf(x / math.sqrt(t)) / t


def integer_theta_sample(theta, seed: int, count: int) -> np.ndarray:
    t = _check_integer_theta(theta)
    keep = make_rng(seed, 0xB3).random(count) < 1.0 / t
    return np.where(keep, math.sqrt(t) * rayleigh_sample(seed, count), 0.0)


def scaled_rayleigh_cdf(theta: float, x):
    """F_1(x / sqrt(theta)), the law of sqrt(theta) R; not the limit for non-integer theta."""
    return rayleigh_cdf(np.asarray(x, dtype=np.float64) / math.sqrt(theta))


def moment_integer_theta(theta, k: int) -> float:
    """k! theta^(k-1), the 2k-th moment of the integer-theta law."""
    t = _check_integer_theta(theta)
    if k < 1:
        raise ConfigError("k must be >= 1")
    return float(math.factorial(k) * t ** (k - 1))


def _floor(theta: float) -> int:
    return int(math.floor(theta + 1e-12 * max(1.0, theta)))


def beta4_closed_form(theta: float) -> float:
    """Fourth limiting moment p(abba) + p(aabb), valid for every theta > 0."""
    if not theta > 0:
        raise ConfigError("theta must be positive")
    f = _floor(theta)
    return 2 * (1 - f / theta) * (f + 1) ** 2 + 2 * ((f + 1) / theta - 1) * f ** 2


def catalan_number(k: int) -> int:
    return math.comb(2 * k, k) // (k + 1)


def moment_bounds(theta: float, k: int):
    """(C_k floor(theta)^(k-1), k! (floor(theta)+1)^(k-1)) for beta_{2k}."""
    if not theta > 0 or k < 1:
        raise ConfigError("need theta > 0 and k >= 1")
    f = _floor(theta)
    return float(catalan_number(k) * f ** (k - 1)), float(math.factorial(k) * (f + 1) ** (k - 1))


def law_table(theta: float, x):
    """Rows (x, density, cdf) for overlays.

    Integer theta uses the integer-theta law; its density column is the
    continuous part only (the atom at 0 shows up as a jump in the cdf).
    Other theta fall back to sqrt(theta) R, which is a reference curve only.
    """
    x = np.asarray(x, dtype=np.float64)
    s = math.sqrt(theta)
    if float(theta) == int(theta) and theta >= 1:
        dens = rayleigh_density(x / s) / (s * theta)
        cdf = integer_theta_cdf(theta, x)
    else:
        dens = rayleigh_density(x / s) / s
        cdf = scaled_rayleigh_cdf(theta, x)
    return np.column_stack([x, dens, cdf])


def limiting_zero_proportion(theta: float) -> float:
    """1 - 1/theta for theta >= 1 (also for non-integer theta), 0 below."""
    if not theta > 0:
        raise ConfigError("theta must be positive")
    return max(0.0, 1.0 - 1.0 / theta)
