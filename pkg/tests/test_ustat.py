import math

import numpy as np
import pytest

from funcsig.errors import DegenerateStatisticError, InvalidInputError
from funcsig.funcspace import FunctionalSample, Grid
from funcsig.kernels import GramSet, k_gram
from funcsig.procedure import build_grams, prepare_covariates
from funcsig.simulate import DgpSpec, generate
from funcsig.ustat import (
    TestResult,
    asymptotic_pvalue,
    compute_In,
    compute_Tn,
    compute_vn2,
    statistic,
    u_gram,
)
from oracles import naive_stats


def worked_instance():
    # <U_1, U_2> = 2, K_12 = 0.75, phi_12 = 1, h = 1
    return GramSet(u_gram(np.array([1.0, 2.0])), k_gram(np.array([0.0, 0.0]), "epanechnikov", 1.0),
                   np.ones((2, 2)), 1.0, 1)


def test_u_gram_examples():
    assert np.array_equal(u_gram(np.array([1.0, 2.0])), [[1, 2], [2, 4]])
    g = Grid(101)
    f = np.full(101, math.sqrt(3))
    assert np.allclose(u_gram(FunctionalSample(g, np.vstack([f, f]))), 3.0, atol=1e-10)
    with pytest.raises(InvalidInputError):
        u_gram(np.ones((2, 2)))


def test_worked_instance():
    i_n, v_n2, t_n = statistic(worked_instance())
    assert i_n == 1.5 and v_n2 == 2.25 and t_n == 1.0


def test_zero_residuals():
    g = GramSet(np.zeros((3, 3)), np.ones((3, 3)), np.ones((3, 3)), 0.5, 1)
    assert compute_In(g) == 0.0 and compute_vn2(g) == 0.0
    with pytest.raises(DegenerateStatisticError):
        statistic(g)


def test_pvalues():
    assert asymptotic_pvalue(0.0)[0] == 0.5
    p, rej = asymptotic_pvalue(1.2815515655446004, 0.10)
    assert math.isclose(p, 0.10, rel_tol=1e-12) and rej
    assert compute_Tn(1.5, 2.25) == 1.0
    with pytest.raises(InvalidInputError):
        asymptotic_pvalue(1.0, 1.5)


def _instance(rng, n):
    u = rng.standard_normal(n)
    z = rng.standard_normal(n)
    a = rng.random((n, n))
    phi = np.exp(-(a + a.T))
    np.fill_diagonal(phi, 1.0)
    h = 1.5
    return u, z, phi, h


def test_matches_naive_loops(rng):
    for n in (3, 6, 11):
        u, z, phi, h = _instance(rng, n)
        g = GramSet(u_gram(u), k_gram(z, "epanechnikov", h), phi, h, 1)
        i_ref, v_ref = naive_stats(u.tolist(), z.tolist(), phi.tolist(), h)
        assert math.isclose(compute_In(g), i_ref, rel_tol=1e-12, abs_tol=1e-15)
        assert math.isclose(compute_vn2(g), v_ref, rel_tol=1e-12)


def test_scale_and_permutation_invariance(rng):
    u, z, phi, h = _instance(rng, 25)
    kg = k_gram(z, "epanechnikov", h)
    i0, v0, t0 = statistic(GramSet(u_gram(u), kg, phi, h, 1))
    i1, v1, t1 = statistic(GramSet(u_gram(3.7 * u), kg, phi, h, 1))
    assert math.isclose(i1, 3.7**2 * i0, rel_tol=1e-12)
    assert math.isclose(v1, 3.7**4 * v0, rel_tol=1e-12)
    assert math.isclose(t1, t0, rel_tol=1e-10)
    p = rng.permutation(25)
    tp = statistic(GramSet(u_gram(u[p]), kg[np.ix_(p, p)], phi[np.ix_(p, p)], h, 1))[2]
    assert abs(tp - t0) <= 1e-12 * max(1.0, abs(t0))


def test_result_record_and_reject():
    r = TestResult(1.5, 2.25, 1.0, 0.158, 1.0, 1, 2, extra={"model": "raw"})
    rec = r.to_record()
    assert rec["t_n"] == 1.0 and rec["model"] == "raw" and "extra" not in rec
    assert not r.reject(0.10) and r.reject(0.20)
    with pytest.raises(InvalidInputError):
        r.reject(0.1, bootstrap=True)


def test_null_mean_of_in_is_zero():
    spec = DgpSpec("scalar-quadratic", 0.0, n=40)
    vals = []
    for rep in range(300):
        data = generate(spec, [7, rep])
        cov = prepare_covariates(data.x, 1)
        g = build_grams(data.noise, cov.z, cov.w, 40 ** -0.2)
        vals.append(compute_In(g))
    vals = np.array(vals)
    se = vals.std(ddof=1) / math.sqrt(len(vals))
    assert abs(vals.mean()) <= 3 * se
