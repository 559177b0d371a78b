import math

import numpy as np
import pytest

from funcsig.bootstrap import MAMMEN, mammen_draw, replicate_stats, wild_bootstrap
from funcsig.errors import DegenerateStatisticError, InvalidInputError
from funcsig.funcspace import FunctionalSample, Grid
from funcsig.kernels import GramSet, k_gram
from funcsig.residuals import centering_maker
from funcsig.ustat import statistic, u_gram


def test_mammen_closed_form():
    phi = (1 + math.sqrt(5)) / 2
    assert math.isclose(MAMMEN.v_plus, phi, rel_tol=1e-15)
    assert math.isclose(MAMMEN.v_minus, 1 - phi, rel_tol=1e-15)
    assert abs(MAMMEN.p_minus + MAMMEN.p_plus - 1) < 1e-15
    assert abs(MAMMEN.moment(1)) < 1e-12
    assert abs(MAMMEN.moment(2) - 1) < 1e-12
    assert abs(MAMMEN.moment(3) - 1) < 1e-12


def test_mammen_draws():
    z = mammen_draw(np.random.default_rng(1), 1000)
    assert np.all(np.isclose(z, -0.618034, atol=1e-6) | np.isclose(z, 1.618034, atol=1e-6))
    big = mammen_draw(np.random.default_rng(2), 10**6)
    assert abs(big.mean()) < 0.005


def _grams(rng, n=20, functional=False):
    z = rng.standard_normal(n)
    if functional:
        g = Grid(11)
        u = FunctionalSample(g, rng.standard_normal((n, 11)))
    else:
        u = rng.standard_normal(n)
    a = rng.random((n, n))
    phi = np.exp(-(a + a.T))
    np.fill_diagonal(phi, 1.0)
    return u, GramSet(u_gram(u), k_gram(z, "epanechnikov", 1.0), phi, 1.0, 1)


def test_zero_residuals_are_degenerate(rng):
    _, g = _grams(rng)
    g0 = g.with_u(np.zeros_like(g.u_gram))
    with pytest.raises(DegenerateStatisticError):
        wild_bootstrap(g0, 0.0, 19, rng=0)


def test_identity_multipliers_reproduce_statistic(rng):
    _, g = _grams(rng)
    t = statistic(g)[2]
    res = wild_bootstrap(g, t, 1, draw=lambda r, size: np.ones(size))
    assert math.isclose(res.stats[0], t, rel_tol=1e-12)
    assert res.crit == res.stats[0]


@pytest.mark.parametrize("functional", [False, True])
@pytest.mark.parametrize("with_maker", [False, True])
def test_cached_grams_match_recomputation(rng, functional, with_maker):
    u, g = _grams(rng, functional=functional)
    zeta = mammen_draw(np.random.default_rng(3), (5, g.n))
    maker = centering_maker(g.n) if with_maker else None
    u_vec = None if functional else u
    i_star, v_star = replicate_stats(g, zeta, maker, u_vec)
    for b in range(5):
        if functional:
            ub = u.with_data(zeta[b][:, None] * u.data)
            if with_maker:
                ub = ub.with_data(maker @ ub.data)
        else:
            ub = zeta[b] * u
            if with_maker:
                ub = maker @ ub
        i_ref, v_ref, _ = statistic(g.with_u(u_gram(ub)))
        assert math.isclose(i_star[b], i_ref, rel_tol=1e-12, abs_tol=1e-14)
        assert math.isclose(v_star[b], v_ref, rel_tol=1e-12)


def test_quantile_monotone_and_pvalue(rng):
    _, g = _grams(rng)
    t = statistic(g)[2]
    crits = [wild_bootstrap(g, t, 199, a, rng=5).crit for a in (0.01, 0.05, 0.1, 0.5)]
    assert crits == sorted(crits, reverse=True)
    res = wild_bootstrap(g, t, 199, 0.1, rng=5)
    assert 0 <= res.p_boot <= 1
    assert res.p_boot == (1 + np.sum(res.stats >= t)) / 200
    # order statistic ceil(0.9 * 199) = 180
    assert res.crit == res.stats[179]


def test_bootstrap_is_deterministic(rng):
    _, g = _grams(rng)
    a = wild_bootstrap(g, 0.3, 99, rng=np.random.default_rng(11))
    b = wild_bootstrap(g, 0.3, 99, rng=np.random.default_rng(11))
    assert np.array_equal(a.stats, b.stats) and a.crit == b.crit


def test_argument_checks(rng):
    _, g = _grams(rng)
    with pytest.raises(InvalidInputError):
        wild_bootstrap(g, 0.0, 0)
    with pytest.raises(InvalidInputError):
        replicate_stats(g, np.ones((2, 3)))
