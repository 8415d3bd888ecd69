"""Patterned matrices with the mod-type link i + j (mod a_n)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from thetalink.errors import ConfigError

DISTRIBUTIONS = ("gaussian", "rademacher", "uniform")


@dataclass(frozen=True)
class LinkSpec:
    """Either ``theta`` (modulus floor(n/theta)) or a custom ``modulus_rule`` n -> a_n."""

    theta: Optional[float] = None
    modulus_rule: Optional[Callable[[int], int]] = field(default=None, compare=False)
    label: str = ""

    def __post_init__(self):
        if (self.theta is None) == (self.modulus_rule is None):
            raise ConfigError("give exactly one of theta or modulus_rule")
        if self.theta is not None and not (self.theta > 0 and math.isfinite(self.theta)):
            raise ConfigError(f"theta must be a positive finite number, got {self.theta!r}")

    @classmethod
    def from_theta(cls, theta: float) -> "LinkSpec":
        return cls(theta=float(theta))

    @classmethod
    def custom(cls, rule: Callable[[int], int], label: str = "custom") -> "LinkSpec":
        return cls(modulus_rule=rule, label=label)

    def describe(self) -> str:
        if self.theta is not None:
            return f"theta={self.theta:g}"
        return self.label or "custom"


def _as_link(link) -> LinkSpec:
    if isinstance(link, LinkSpec):
        return link
    return LinkSpec.from_theta(link)


def modulus(link, n: int) -> int:
    """floor(n/theta) for a theta-link, a_n for a custom link."""
    link = _as_link(link)
    if n < 1:
        raise ConfigError(f"dimension must be >= 1, got {n}")
    if link.theta is not None:
        # exact floor for rational-looking theta such as 1.5 or 0.1
        q = n / link.theta
        m = int(math.floor(q))
        if abs(q - round(q)) < 1e-9 * max(1.0, q):
            m = int(round(q))
    else:
        m = int(link.modulus_rule(n))
    if m < 1:
        raise ConfigError(f"modulus is {m} for n={n}, {link.describe()} (theta > n?)")
    return m


def link_value(i: int, j: int, link, n: int) -> int:
    """(i + j) mod a_n for 1-based indices."""
    if not (1 <= i <= n and 1 <= j <= n):
        raise ConfigError(f"indices ({i}, {j}) outside 1..{n}")
    return (i + j) % modulus(link, n)


def link_table(link, n: int) -> np.ndarray:
    """n x n integer array of link values, row/column k holding index k+1."""
    idx = np.arange(1, n + 1)
    return np.add.outer(idx, idx) % modulus(link, n)


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 generator for the stream (seed, *stream); streams are independent."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream)))


def draw_inputs(dist: str, size: int, rng: np.random.Generator) -> np.ndarray:
    """Mean 0, variance 1 input variables."""
    if dist == "gaussian":
        return rng.standard_normal(size)
    if dist == "rademacher":
        return rng.integers(0, 2, size=size) * 2.0 - 1.0
    if dist == "uniform":
        return rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), size=size)
    raise ConfigError(f"unknown distribution {dist!r}; choose from {', '.join(DISTRIBUTIONS)}")


@dataclass
class PatternedMatrix:
    n: int
    link: LinkSpec
    entries: np.ndarray
    seed: int
    replicate: int = 0
    dist: str = "gaussian"

    @property
    def modulus(self) -> int:
        return modulus(self.link, self.n)


def build_matrix(n: int, link, dist: str = "gaussian", seed: int = 0, replicate: int = 0) -> PatternedMatrix:
    """A_n = n^{-1/2} (x_{L(i,j)}) with one input variable per residue class.

    ``(seed, replicate)`` fully determine the result.
    """
    link = _as_link(link)
    table = link_table(link, n)
    x = draw_inputs(dist, modulus(link, n), make_rng(seed, replicate))
    return PatternedMatrix(n=n, link=link, entries=x[table] / math.sqrt(n), seed=seed,
                           replicate=replicate, dist=dist)
