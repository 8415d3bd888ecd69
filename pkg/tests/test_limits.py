import math

import numpy as np
import pytest

from oracles import brute_force_count, catalan_count, catalan_limit
from thetalink.errors import BudgetExceeded, ConfigError
from thetalink.limits import (admissible_gammas, alpha_limit, catalan_recursion, closure_type,
                              count_pi_star_exact, dependence_count, gamma_range,
                              linear_representation, lsd_moment, lsd_moment_order,
                              word_limit_catalan, word_limit_closed_form, word_limit_finite,
                              word_limit_mc, work_estimate)
from thetalink.matrix import LinkSpec, modulus
from thetalink.words import catalan_words, enumerate_pair_matched, is_catalan, is_symmetric, parse_word

THETAS = (0.5, 1, 1.3, 2, 2.5)


def rep_row(rep, v):
    return list(rep.coeffs[v]), list(rep.gamma[v])


def test_linear_rep_aa():
    rep = linear_representation("aa")
    assert rep_row(rep, 2) == ([1, 0], [-1])


def test_linear_rep_abba():
    rep = linear_representation("abba")
    # columns: nu_0, nu_1, nu_2 and gamma_a, gamma_b
    assert rep_row(rep, 3) == ([0, 1, 0], [0, -1])
    assert rep_row(rep, 4) == ([1, 0, 0], [-1, 1])


def test_linear_rep_abab():
    rep = linear_representation("abab")
    assert rep_row(rep, 3) == ([1, 1, -1], [-1, 0])
    assert rep_row(rep, 4) == ([-1, 0, 2], [1, -1])


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_linear_rep_satisfies_every_match(k):
    rng = np.random.default_rng(k)
    for w in enumerate_pair_matched(k):
        rep = linear_representation(w)
        nu_s = rng.uniform(0, 3, size=k + 1)
        gam = rng.integers(-3, 4, size=k)
        nu = rep.evaluate(nu_s, gam)
        for s, (i, j) in enumerate(w.matches()):
            assert nu[i - 1] + nu[i] - nu[j - 1] - nu[j] == pytest.approx(gam[s])
        for c, v in enumerate(rep.generating):
            assert nu[v] == pytest.approx(nu_s[c])


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_closure_iff_symmetric(k):
    for w in enumerate_pair_matched(k):
        assert (closure_type(w) == "consistent") == is_symmetric(w)


def test_closure_examples():
    assert closure_type("abba") == "consistent"
    assert closure_type("abab") == "inconsistent"


def test_gamma_range():
    assert gamma_range(0.5) == 1 and gamma_range(1.3) == 2 and gamma_range(2.5) == 5


@pytest.mark.parametrize("k", [1, 2, 3])
def test_hankel_regime_only_zero_gamma(k):
    for theta in (0.3, 0.5):
        for w in enumerate_pair_matched(k):
            g = admissible_gammas(linear_representation(w), theta)
            assert not np.any(g)


def test_admissible_gammas_unpruned_superset():
    # pruning must keep every gamma that a direct search finds feasible
    import itertools
    w, theta = parse_word("abccba"), 1.3
    rep = linear_representation(w)
    kept = {tuple(g) for g in admissible_gammas(rep, theta)}
    K = gamma_range(theta)
    rng = np.random.default_rng(0)
    nu = rng.uniform(0, theta, size=(20000, 4))
    interior = rep.interior
    for g in itertools.product(range(-K, K + 1), repeat=3):
        if rep.gamma[6] @ np.array(g) != 0:
            continue
        vals = nu @ rep.coeffs[interior].T + rep.gamma[interior] @ np.array(g)
        hit = np.any(np.all((vals > 0) & (vals < theta), axis=1))
        if hit:
            assert g in kept


def test_mc_trivial_word():
    est = word_limit_mc("aa", 1.7, samples=1000)
    assert est.value == 1.0 and est.std_error == 0.0
    assert est.gamma_admissible_count == 1


def test_mc_non_symmetric_is_exact_zero():
    est = word_limit_mc("abab", 1.3, samples=1000)
    assert est.value == 0.0 and est.std_error == 0.0 and est.closure == "inconsistent"


@pytest.mark.parametrize("theta,target", [(1, 1.0), (1.5, 5 / 3)])
def test_mc_abba(theta, target):
    est = word_limit_mc("abba", theta, samples=10 ** 6, seed=1)
    assert abs(est.value - target) <= 3 * est.std_error
    assert est.std_error > 0 or theta == 1


def test_mc_reproducible_and_seed_sensitive():
    a = word_limit_mc("abccba", 1.3, samples=5000, seed=4)
    b = word_limit_mc("abccba", 1.3, samples=5000, seed=4)
    c = word_limit_mc("abccba", 1.3, samples=5000, seed=5)
    assert a.value == b.value and a.value != c.value


def test_mc_rejects_bad_input():
    with pytest.raises(ConfigError):
        word_limit_mc("abba", 1.0, samples=0)
    with pytest.raises(ConfigError):
        word_limit_mc("abba", 0.0)


@pytest.mark.parametrize("theta", [1.3, 2.5])
@pytest.mark.parametrize("k", [2, 3])
def test_mc_matches_catalan_oracle(theta, k):
    for w in catalan_words(k):
        est = word_limit_mc(w, theta, samples=200000, seed=2)
        assert abs(est.value - catalan_limit(w, theta)) <= 4 * est.std_error + 1e-12


def test_catalan_examples():
    assert word_limit_catalan("aabb", 1.5).value == pytest.approx(5 / 3, abs=1e-12)
    assert word_limit_catalan("abba", 2).value == 2
    for w in catalan_words(3):
        assert word_limit_catalan(w, 0.7).value == 1


def test_catalan_rejects_non_catalan():
    with pytest.raises(ConfigError):
        word_limit_catalan("abcabc", 1.5)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_recursion_matches_class_product(k):
    for theta in (0.4, 1.3, 1.5, 2.5, 2.9, 3.25, 4.7):
        for w in catalan_words(k):
            state = catalan_recursion(w, theta)
            state.check()
            got = word_limit_catalan(w, theta).value
            assert got == pytest.approx(catalan_limit(w, theta), rel=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_catalan_bounds_and_growth(k):
    for theta in (0.5, 1, 1.2, 1.5, 2, 2.5, 3, 3.7):
        f = math.floor(theta)
        for w in catalan_words(k):
            p = word_limit_catalan(w, theta).value
            assert f ** (k - 1) - 1e-12 <= p <= (f + 1) ** (k - 1) + 1e-12
            if k > 1:
                assert (p > 1) if theta > 1 else (p == 1)


def test_dependence_count_and_alpha():
    # aa: vertex 0 is tied to vertex 2 = vertex 0 only
    assert dependence_count("aa", 0) == 0
    # abba: vertices 1 and 3 are tied
    assert dependence_count("abba", 1) == 1
    assert alpha_limit(1.5, 0) == pytest.approx(2 / 3)
    assert 0 < alpha_limit(2.5, 3) < 1


def test_closed_form():
    assert word_limit_closed_form("abab", 1.3).value == 0
    assert word_limit_closed_form("abcabc", 3).value == 9
    assert word_limit_closed_form("aabb", 1.5).value == pytest.approx(5 / 3)
    assert word_limit_closed_form("abcabc", 1.5) is None


def test_count_examples():
    assert count_pi_star_exact("aa", 10, 1) == (100, 1.0)
    _, norm = count_pi_star_exact("abab", 24, 1)
    assert norm <= 8 / 24
    # on multiples of theta the Catalan count is already exact; off them the error is O(1/n)
    for n in (24, 48, 96):
        assert abs(count_pi_star_exact("abba", n, 1.5)[1] - 5 / 3) <= 3 / n
    errs = [abs(count_pi_star_exact("abba", n, 1.5)[1] - 5 / 3) for n in (25, 49, 97)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] * 97 < 3


@pytest.mark.parametrize("algorithm", ["grouped", "enumerate"])
@pytest.mark.parametrize("backend", ["cython", "python"])
@pytest.mark.parametrize("theta", [0.5, 1, 1.3, 2, 2.5])
def test_count_against_brute_force(backend, algorithm, theta):
    for n in (5, 7, 8):
        m = modulus(theta, n)
        for k in (1, 2, 3):
            for w in enumerate_pair_matched(k):
                got = count_pi_star_exact(w, n, theta, backend=backend, algorithm=algorithm)[0]
                assert got == brute_force_count(w, n, m)


@pytest.mark.parametrize("theta", [0.75, 1.3, 2, 2.5, 3.4])
def test_count_catalan_product(theta):
    for n in (29, 40):
        m = modulus(theta, n)
        for k in (2, 3):
            for w in catalan_words(k):
                assert count_pi_star_exact(w, n, theta)[0] == catalan_count(w, n, m)


def test_counters_agree_on_medium_n():
    for theta in (1.3, 2.5):
        for w in enumerate_pair_matched(3):
            a = count_pi_star_exact(w, 30, theta, backend="cython")[0]
            b = count_pi_star_exact(w, 30, theta, backend="python")[0]
            c = count_pi_star_exact(w, 30, theta, backend="cython", algorithm="enumerate")[0]
            assert a == b == c


def test_count_budget_and_custom_link():
    with pytest.raises(BudgetExceeded):
        count_pi_star_exact("abcabc", 500, 1.5, budget=10 ** 6)
    assert work_estimate(2, 10, 5) == 10 ** 3 * 2
    link = LinkSpec.custom(lambda n: n // 2 + 1, "half")
    c, _ = count_pi_star_exact("abba", 9, link=link)
    assert c == brute_force_count(parse_word("abba"), 9, 5)
    with pytest.raises(ConfigError):
        count_pi_star_exact("abba", 9)


def test_finite_n_estimate():
    est = word_limit_finite("abba", 24, 1.5)
    assert est.method == "finite-n" and est.extra["n"] == 24
    assert est.value == count_pi_star_exact("abba", 24, 1.5)[1]


@pytest.mark.parametrize("theta", THETAS)
@pytest.mark.parametrize("k", [1, 2])
def test_finite_n_converges_towards_mc(theta, k):
    # |finite-n - limit| should shrink like 1/n along n = 24, 48, 96
    grid = (24, 48, 96)
    for w in enumerate_pair_matched(k):
        mc = word_limit_mc(w, theta, samples=200000, seed=7)
        errs = [abs(count_pi_star_exact(w, n, theta)[1] - mc.value) for n in grid]
        slack = 4 * mc.std_error
        assert errs[2] <= errs[0] + slack
        assert errs[2] <= 20 / grid[2] + slack


def test_lsd_moment_examples():
    assert lsd_moment(1, 2).value == pytest.approx(2, abs=1e-12)
    est = lsd_moment(2, 3, samples=200000, seed=3)
    assert abs(est.value - 24) <= 4 * est.std_error + 1e-12
    est = lsd_moment(1.5, 2, method="mc", samples=200000, seed=3)
    assert abs(est.value - 10 / 3) <= 4 * est.std_error
    assert lsd_moment_order(1.5, 3).value == 0
    with pytest.raises(ConfigError):
        lsd_moment(1.5, 2, method="exact")
