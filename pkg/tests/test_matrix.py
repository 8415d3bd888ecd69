import math

import numpy as np
import pytest

from thetalink.errors import ConfigError
from thetalink.matrix import (LinkSpec, build_matrix, draw_inputs, link_table, link_value, make_rng,
                              modulus)


def test_modulus_examples():
    assert modulus(1, 5) == 5
    assert modulus(0.5, 4) == 8
    assert modulus(1.5, 1000) == 666
    assert modulus(0.1, 7) == 70


def test_modulus_rejects_theta_above_n():
    with pytest.raises(ConfigError):
        modulus(5, 4)
    with pytest.raises(ConfigError):
        LinkSpec.from_theta(-1)


def test_link_value_examples():
    assert link_value(2, 3, 1, 5) == 0
    assert link_value(1, 1, 0.5, 4) == 2
    assert link_value(4, 4, 2, 4) == 0
    with pytest.raises(ConfigError):
        link_value(0, 1, 1, 5)


def test_theta_link_is_custom_floor():
    for theta in (0.5, 1.3, 2, 2.5):
        custom = LinkSpec.custom(lambda n, t=theta: math.floor(n / t))
        for n in (7, 24, 95, 96):
            assert modulus(custom, n) == modulus(theta, n)
            assert np.array_equal(link_table(custom, n), link_table(theta, n))


def test_build_deterministic():
    a = build_matrix(30, 1.5, seed=7, replicate=2).entries
    b = build_matrix(30, 1.5, seed=7, replicate=2).entries
    c = build_matrix(30, 1.5, seed=7, replicate=3).entries
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_shared_residue_entries():
    a = build_matrix(3, 1, seed=1).entries
    # (1,2) and (3,3) both have link value 0
    assert a[0, 1] == a[1, 0] == a[2, 2]


@pytest.mark.parametrize("theta,n", [(2, 100), (0.5, 40), (1.3, 57), (3, 90)])
def test_symmetry_and_distinct_values(theta, n):
    pm = build_matrix(n, theta, seed=3)
    a = pm.entries
    assert np.array_equal(a, a.T)
    assert len(np.unique(a)) <= modulus(theta, n)
    table = link_table(theta, n)
    for r in range(modulus(theta, n)):
        assert len(np.unique(a[table == r])) <= 1


def test_hankel_regime_never_wraps():
    n, theta = 20, 0.5
    m = modulus(theta, n)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i + j < m:
                assert link_value(i, j, theta, n) == i + j


@pytest.mark.parametrize("dist", ["gaussian", "rademacher", "uniform"])
def test_input_moments(dist):
    x = draw_inputs(dist, 10 ** 6, make_rng(11, 0))
    se = 1 / math.sqrt(x.size)
    assert abs(x.mean()) < 5 * se
    # second moment about the known mean 0; its std error is sqrt(var(x^2) / N)
    sq_se = np.std(x ** 2) / math.sqrt(x.size)
    assert abs(np.mean(x ** 2) - 1) <= 5 * sq_se + 1e-12


def test_unknown_dist():
    with pytest.raises(ConfigError):
        build_matrix(5, 1, dist="cauchy")
