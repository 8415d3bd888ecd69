"""Word limits p_theta(w) by three routes.

* ``word_limit_mc``: symbolic linear representation of the circuit vertices,
  exact treatment of the closing constraint, Monte Carlo volume of the rest.
* ``word_limit_catalan``: the double-letter recursion for Catalan words.
* ``count_pi_star_exact``: brute-force circuit count at finite n.

Match convention, used everywhere: for the letter s with positions i < j,
nu[i-1] + nu[i] - nu[j-1] - nu[j] = gamma_s.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from thetalink import _backend
from thetalink.errors import BudgetExceeded, ConfigError
from thetalink.matrix import LinkSpec, make_rng, modulus
from thetalink.words import (Word, enumerate_pair_matched, is_catalan, is_symmetric,
                             parse_word, reduce_double)

DEFAULT_SAMPLES = 10 ** 6
DEFAULT_BUDGET = 10 ** 9
_BLOCK = 1 << 16


def _floor(x: float) -> int:
    # floor that does not fall one short on values like 2 * 1.15
    return int(math.floor(x + 1e-12 * max(1.0, abs(x))))


def _is_integer(theta: float) -> bool:
    return abs(theta - round(theta)) < 1e-12 * max(1.0, theta)


def _word(w) -> Word:
    return parse_word(w) if isinstance(w, str) else w


@dataclass
class LinearRep:
    """nu_i = coeffs[i] . nu_S + gamma[i] . gamma for every vertex i = 0..2k.

    Columns of ``coeffs`` follow ``generating`` (the sorted set S(w)); columns
    of ``gamma`` follow the letters a, b, c, ...
    """

    word: Word
    generating: tuple
    coeffs: np.ndarray
    gamma: np.ndarray

    @property
    def k(self) -> int:
        return self.word.k

    @property
    def interior(self) -> List[int]:
        """Non-generating vertices other than the closing vertex 2k."""
        s = set(self.generating)
        return [i for i in range(1, 2 * self.k) if i not in s]

    def closure(self) -> str:
        e0 = np.zeros(self.k + 1, dtype=np.int64)
        e0[0] = 1
        return "consistent" if np.array_equal(self.coeffs[2 * self.k], e0) else "inconsistent"

    def evaluate(self, nu_s, gamma) -> np.ndarray:
        """All vertex values for given generating values and gamma vector."""
        return self.coeffs @ np.asarray(nu_s, dtype=float) + self.gamma @ np.asarray(gamma, dtype=float)


def linear_representation(w) -> LinearRep:
    """Resolve every vertex left to right as an integer combination of nu_S and gamma."""
    w = _word(w)
    k, h = w.k, len(w)
    partner = w.partner()
    gen = (0,) + tuple(p for p in range(1, h + 1) if partner[p] < 0)
    col = {v: c for c, v in enumerate(gen)}
    coeffs = np.zeros((h + 1, k + 1), dtype=np.int64)
    gamma = np.zeros((h + 1, k), dtype=np.int64)
    coeffs[0, 0] = 1
    for p in range(1, h + 1):
        i = partner[p]
        if i < 0:
            coeffs[p, col[p]] = 1
            continue
        coeffs[p] = coeffs[i - 1] + coeffs[i] - coeffs[p - 1]
        gamma[p] = gamma[i - 1] + gamma[i] - gamma[p - 1]
        gamma[p, w[p]] -= 1
    return LinearRep(word=w, generating=gen, coeffs=coeffs, gamma=gamma)


def closure_type(w) -> str:
    """"consistent" when the closing constraint involves gamma only."""
    rep = w if isinstance(w, LinearRep) else linear_representation(w)
    return rep.closure()


def gamma_range(theta: float) -> int:
    """floor(2 theta): gamma entries lie in {0, +-1, ..., +-floor(2 theta)}."""
    return _floor(2.0 * theta)


def admissible_gammas(rep: LinearRep, theta: float) -> np.ndarray:
    """Gamma vectors with zero closing offset and no interval-infeasible interior vertex.

    Letters are introduced in order of their second occurrence; each vertex is
    screened as soon as every gamma it depends on is fixed.
    """
    k = rep.k
    h = 2 * k
    if rep.closure() != "consistent":
        return np.zeros((0, k), dtype=np.int64)
    K = gamma_range(theta)
    values = np.arange(-K, K + 1, dtype=np.int64)
    partner = rep.word.partner()
    lo = theta * np.minimum(rep.coeffs, 0).sum(axis=1)
    hi = theta * np.maximum(rep.coeffs, 0).sum(axis=1)
    cand = np.zeros((1, k), dtype=np.int64)
    for p in range(1, h + 1):
        if partner[p] < 0:
            continue
        s = rep.word[p]
        cand = np.repeat(cand, len(values), axis=0)
        cand[:, s] = np.tile(values, cand.shape[0] // len(values))
        off = cand @ rep.gamma[p]
        if p == h:
            keep = off == 0
        else:
            keep = (lo[p] + off < theta) & (hi[p] + off > 0)
        cand = cand[keep]
    return cand


@dataclass
class WordLimitEstimate:
    word: str
    theta: float
    method: str
    value: float
    std_error: float = 0.0
    samples: int = 0
    gamma_admissible_count: Optional[int] = None
    closure: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {"word": self.word, "theta": self.theta, "method": self.method, "value": self.value,
             "std_error": self.std_error, "samples": self.samples,
             "gamma_admissible_count": self.gamma_admissible_count, "closure": self.closure}
        d.update(self.extra)
        return d


def _stream_key(w: Word):
    return (0x5EED, w.k) + w.letters


def word_limit_mc(w, theta: float, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                  backend: Optional[str] = None) -> WordLimitEstimate:
    """Monte Carlo value of the limit integral for p_theta(w).

    Samples nu_S uniformly on (0, theta)^{k+1}; for each sample counts the
    admissible gamma vectors whose interior vertices all land in (0, theta).
    The mean count estimates p_theta(w); all gammas share the samples, so the
    standard error is that of the per-sample count.
    """
    w = _word(w)
    if samples < 1:
        raise ConfigError("samples must be >= 1")
    if not theta > 0:
        raise ConfigError("theta must be positive")
    rep = linear_representation(w)
    closure = rep.closure()
    gammas = admissible_gammas(rep, theta)
    est = WordLimitEstimate(word=str(w), theta=theta, method="mc", value=0.0, samples=samples,
                            gamma_admissible_count=int(gammas.shape[0]), closure=closure)
    if closure != "consistent" or gammas.shape[0] == 0:
        return est
    interior = rep.interior
    coef = np.ascontiguousarray(rep.coeffs[interior], dtype=np.int64)
    offsets = np.ascontiguousarray(gammas @ rep.gamma[interior].T, dtype=np.int64)
    kern = _backend.kernels if backend is None else _backend.get(backend)
    total = 0
    total_sq = 0
    for b, start in enumerate(range(0, samples, _BLOCK)):
        size = min(_BLOCK, samples - start)
        nu = make_rng(seed, *_stream_key(w), b).uniform(0.0, theta, size=(size, w.k + 1))
        counts = kern.mc_indicator_counts(nu, coef, offsets, float(theta))
        total += int(counts.sum())
        total_sq += int((counts * counts).sum())
    mean = total / samples
    if samples > 1:
        var = max(total_sq - total * total / samples, 0.0) / (samples - 1)
        est.std_error = math.sqrt(var / samples)
    est.value = mean
    return est


@dataclass
class CatalanRecursionState:
    A: List[float]
    alpha_trace: List[float]
    m_trace: List[int]
    chain: List[tuple] = field(default_factory=list)

    def check(self, tol: float = 1e-12):
        assert abs(sum(self.A) - 1.0) <= tol and all(-tol <= a <= 1 + tol for a in self.A)


def dependence_count(w, vertex: int) -> int:
    """Number of other vertices tied to ``vertex`` in a Catalan word.

    Two vertices are tied when their linear representations share the same
    generating variable (they are congruent modulo the link modulus in every
    circuit). Vertices 0 and 2k count once, since pi(0) = pi(2k).
    """
    rep = linear_representation(w)
    h = 2 * rep.k
    row = rep.coeffs[vertex]
    cols = np.flatnonzero(row)
    if len(cols) != 1 or row[cols[0]] != 1:
        raise ConfigError(f"vertex {vertex} of {rep.word} is not tied to a single generating vertex")
    tied = [v for v in range(h + 1) if rep.coeffs[v, cols[0]] != 0]
    if 0 in tied:
        tied.remove(h)
    return len(tied) - 1


def alpha_limit(theta: float, m: int) -> float:
    f = _floor(theta)
    up = (f + 1) ** (m + 1) * (1.0 - f / theta)
    down = f ** (m + 1) * ((f + 1) / theta - 1.0)
    return up / (up + down)


def _catalan_poly(A, theta: float) -> float:
    f = _floor(theta)
    k = len(A)
    return float(sum(a * f ** j * (f + 1) ** (k - 1 - j) for j, a in enumerate(A)))


def catalan_recursion(w, theta: float) -> CatalanRecursionState:
    """Coefficients A_j^w by stripping leftmost double letters down to ``aa``."""
    w = _word(w)
    if not is_catalan(w):
        raise ConfigError(f"{w} is not a Catalan word")
    chain = []
    cur = w
    while cur.k > 1:
        hat, i0 = reduce_double(cur)
        chain.append((hat, i0))
        cur = hat
    A = [1.0]
    alphas, ms = [], []
    for hat, i0 in reversed(chain):
        m = dependence_count(hat, i0 - 1)
        a = alpha_limit(theta, m)
        A = [a * A[0]] + [(1 - a) * A[j - 1] + a * A[j] for j in range(1, len(A))] + [(1 - a) * A[-1]]
        alphas.append(a)
        ms.append(m)
    return CatalanRecursionState(A=A, alpha_trace=alphas, m_trace=ms,
                                 chain=[(str(h_), i0) for h_, i0 in chain])


def word_limit_catalan(w, theta: float) -> WordLimitEstimate:
    """p_theta(w) for a Catalan word.

    1 for theta <= 1, theta^(k-1) for integer theta, otherwise the value of
    sum_j A_j floor(theta)^j (floor(theta)+1)^(k-1-j) from the recursion.
    """
    w = _word(w)
    if not theta > 0:
        raise ConfigError("theta must be positive")
    state = catalan_recursion(w, theta)
    if theta <= 1:
        value = 1.0
    elif _is_integer(theta):
        value = float(round(theta) ** (w.k - 1))
    else:
        value = _catalan_poly(state.A, theta)
    return WordLimitEstimate(word=str(w), theta=theta, method="catalan-recursion", value=value,
                             closure="consistent",
                             extra={"A": state.A, "alpha_trace": state.alpha_trace,
                                    "m_trace": state.m_trace})


def word_limit_closed_form(w, theta: float) -> Optional[WordLimitEstimate]:
    """Known exact values; ``None`` when no closed form applies."""
    w = _word(w)
    value = None
    if not is_symmetric(w):
        value = 0.0
    elif _is_integer(theta) and theta >= 1:
        value = float(round(theta) ** (w.k - 1))
    elif is_catalan(w):
        if theta <= 1:
            value = 1.0
        elif w.k == 2:
            f = _floor(theta)
            value = (1 - f / theta) * (f + 1) ** 2 + ((f + 1) / theta - 1) * f ** 2
        elif w.k == 1:
            value = 1.0
    if value is None:
        return None
    return WordLimitEstimate(word=str(w), theta=theta, method="closed-form", value=float(value),
                             closure=closure_type(w))


def work_estimate(k: int, n: int, m: int) -> int:
    """Upper bound on leaves visited by the brute-force circuit count."""
    branch = (n - 1) // m + 1
    return n ** (k + 1) * branch ** max(k - 1, 0)


def count_pi_star_exact(w, n: int, theta=None, link: Optional[LinkSpec] = None,
                        budget: int = DEFAULT_BUDGET, backend: Optional[str] = None,
                        algorithm: str = "grouped"):
    """(#Pi*(w), #Pi*(w) / n^(k+1)) at finite n.

    ``algorithm="enumerate"`` visits every circuit; ``"grouped"`` (default)
    counts residue patterns weighted by residue-class sizes, which is exact
    and much faster. The budget check uses the enumeration bound for both.
    """
    w = _word(w)
    if link is None:
        if theta is None:
            raise ConfigError("give theta or link")
        link = LinkSpec.from_theta(theta)
    if algorithm not in ("grouped", "enumerate"):
        raise ConfigError(f"unknown algorithm {algorithm!r}")
    m = modulus(link, n)
    work = work_estimate(w.k, n, m)
    if work > budget:
        raise BudgetExceeded(f"circuit count for {w} at n={n} needs ~{work:.3g} steps (budget {budget:.3g})")
    kern = _backend.kernels if backend is None else _backend.get(backend)
    fn = kern.count_circuits if algorithm == "grouped" else kern.count_circuits_enumerate
    count = int(fn(np.array(w.partner(), dtype=np.int64), n, m))
    return count, count / n ** (w.k + 1)


def word_limit_finite(w, n: int, theta: float, budget: int = DEFAULT_BUDGET,
                      backend: Optional[str] = None) -> WordLimitEstimate:
    w = _word(w)
    count, norm = count_pi_star_exact(w, n, theta, budget=budget, backend=backend)
    return WordLimitEstimate(word=str(w), theta=theta, method="finite-n", value=norm,
                             closure=closure_type(w), extra={"n": n, "count": count})


@dataclass
class MomentEstimate:
    theta: float
    order: int
    method: str
    value: float
    std_error: float
    words: List[WordLimitEstimate] = field(default_factory=list)


def lsd_moment(theta: float, k: int, method: str = "mixed", samples: int = DEFAULT_SAMPLES,
               seed: int = 0, backend: Optional[str] = None) -> MomentEstimate:
    """beta_{2k} = sum of word limits over all pair-matched words of length 2k.

    ``method="mc"`` uses Monte Carlo for every word; ``"mixed"`` uses the
    recursion for Catalan words. Non-symmetric words contribute exactly 0.
    """
    if method not in ("mc", "mixed"):
        raise ConfigError(f"unknown method {method!r}")
    if method == "mc" and k > 4:
        raise ConfigError("Monte Carlo moments are limited to k <= 4")
    parts = []
    for w in enumerate_pair_matched(k):
        if method == "mixed" and is_catalan(w):
            parts.append(word_limit_catalan(w, theta))
        else:
            parts.append(word_limit_mc(w, theta, samples, seed, backend))
    value = float(sum(p.value for p in parts))
    se = math.sqrt(sum(p.std_error ** 2 for p in parts))
    return MomentEstimate(theta=theta, order=2 * k, method=method, value=value, std_error=se, words=parts)


def lsd_moment_order(theta: float, h: int, **kw) -> MomentEstimate:
    """beta_h for any h >= 1; odd orders are 0."""
    if h < 1:
        raise ConfigError("order must be >= 1")
    if h % 2:
        return MomentEstimate(theta=theta, order=h, method=kw.get("method", "mixed"), value=0.0, std_error=0.0)
    return lsd_moment(theta, h // 2, **kw)
