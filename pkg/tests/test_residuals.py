import math

import numpy as np
import pytest

from funcsig.errors import InvalidInputError, RankDeficiencyError
from funcsig.funcspace import FunctionalSample, Grid
from funcsig.residuals import (
    GroupedFunctionalSample,
    ancova_maker,
    ancova_residuals,
    anova_residuals,
    center_residuals,
    centering_maker,
    fpc_linear_residuals,
    indicator_residuals,
    loo_maker,
    select_ancova_k,
)
from funcsig.simulate import DgpSpec, generate


def test_center_residuals(rng):
    assert np.array_equal(center_residuals([1.0, 3.0]), [-1.0, 1.0])
    assert np.all(center_residuals(np.full(5, 2.5)) == 0)
    y = rng.standard_normal(9)
    once = center_residuals(y)
    assert np.allclose(center_residuals(once), once, rtol=0, atol=1e-12)
    assert np.allclose(centering_maker(9) @ y, once, atol=1e-14)
    g = Grid(5)
    s = FunctionalSample(g, rng.standard_normal((4, 5)))
    assert np.allclose(center_residuals(s).data.sum(axis=0), 0, atol=1e-12)


def _wiener(rng, n, m=101):
    g = Grid(m)
    return FunctionalSample(g, np.cumsum(rng.standard_normal((n, m)), axis=1) * math.sqrt(g.spacing))


def test_fpc_linear_matches_least_squares(rng):
    x = _wiener(rng, 60)
    y = rng.standard_normal(60) + x.data[:, 50]
    fit = fpc_linear_residuals(y, x, 5)
    scores = x.data @ (x.grid.weights * fit.basis.functions).T
    design = np.column_stack([np.ones(60), scores])
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    assert abs(beta[0] - fit.intercept) < 1e-8
    assert np.allclose(beta[1:], fit.coef, atol=1e-8)
    assert np.allclose(y - design @ beta, fit.residuals, atol=1e-8)
    assert np.allclose(fit.residual_maker @ y, fit.residuals, atol=1e-10)


def test_fpc_linear_constant_and_noiseless():
    data = generate(DgpSpec("scalar-quadratic", 0.0, n=200, sigma2=0.0), 3)
    fit = fpc_linear_residuals(data.y, data.x, 5)
    assert math.sqrt(np.mean(fit.residuals**2)) < 0.05
    const = fpc_linear_residuals(np.full(200, 4.0), data.x, 5)
    assert abs(const.intercept - 4.0) < 1e-10
    assert np.max(np.abs(const.slope.values)) < 1e-10
    assert np.max(np.abs(const.residuals)) < 1e-10


def test_fpc_linear_rank_checks(rng):
    g = Grid(11)
    x = FunctionalSample(g, np.outer(rng.standard_normal(20), np.ones(11)))
    with pytest.raises(RankDeficiencyError):
        fpc_linear_residuals(rng.standard_normal(20), x, 3)
    with pytest.raises(InvalidInputError):
        fpc_linear_residuals(np.ones(3), _wiener(rng, 3), 5)


def test_anova_examples(rng):
    g = Grid(7)
    f, h = rng.standard_normal(7), rng.standard_normal(7)
    same = GroupedFunctionalSample(FunctionalSample(g, np.vstack([f, f])), [0, 0])
    assert np.all(anova_residuals(same).data == 0)
    pair = GroupedFunctionalSample(FunctionalSample(g, np.vstack([f, h])), [1, 1])
    assert np.allclose(anova_residuals(pair).data[0], f - h, atol=1e-15)
    with pytest.raises(InvalidInputError):
        anova_residuals(GroupedFunctionalSample(FunctionalSample(g, np.vstack([f, h])), [0, 1]))


def test_anova_group_identity(rng):
    g = Grid(9)
    labels = np.array([0, 1, 0, 2, 1, 0, 2, 2, 2, 1])
    y = GroupedFunctionalSample(FunctionalSample(g, rng.standard_normal((10, 9))), labels)
    res = anova_residuals(y).data
    for i in range(10):
        members = [k for k in range(10) if labels[k] == labels[i]]
        nj = len(members)
        gm = sum(y.sample.data[k] for k in members) / nj
        assert np.allclose(res[i], nj / (nj - 1) * (y.sample.data[i] - gm), rtol=1e-12, atol=1e-14)
    assert np.allclose(loo_maker(labels) @ y.sample.data, res, atol=1e-14)
    overall = anova_residuals(y, "overall").data
    assert np.allclose(overall, 10 / 9 * (y.sample.data - y.sample.data.mean(axis=0)), atol=1e-14)


def _ancova_data(rng, n=24, m=31):
    g = Grid(m)
    labels = np.repeat([0, 1, 2], n // 3)
    x = FunctionalSample(g, rng.standard_normal((n, m)))
    y = FunctionalSample(g, rng.standard_normal((n, m)) + 0.5 * x.data)
    return GroupedFunctionalSample(y, labels), GroupedFunctionalSample(x, labels)


def _loo_diff(data, labels):
    out = np.empty_like(data)
    for i in range(len(labels)):
        others = [k for k in range(len(labels)) if labels[k] == labels[i] and k != i]
        out[i] = data[i] - data[others].mean(axis=0)
    return out


def test_ancova_matches_loop_oracle(rng):
    y, x = _ancova_data(rng)
    k = 4
    y_t = _loo_diff(y.sample.data, y.labels)
    x_t = _loo_diff(x.sample.data, x.labels)
    # unit-norm score vectors from the n x n Gram matrix of the differences
    gram = (x_t * x.sample.grid.weights) @ x_t.T
    vals, vecs = np.linalg.eigh(gram)
    c = vecs[:, ::-1][:, :k]
    expected = y_t.copy()
    for i in range(y_t.shape[0]):
        for j in range(k):
            acc = np.zeros(y_t.shape[1])
            for l in range(y_t.shape[0]):
                if l != i:
                    acc += c[l, j] * y_t[l]
            expected[i] -= c[i, j] * acc
    got = ancova_residuals(y, x, k).data
    assert np.allclose(got, expected, atol=1e-10)
    assert np.allclose(ancova_maker(y, x, k) @ y.sample.data, got, atol=1e-10)


def test_ancova_examples(rng):
    y, x = _ancova_data(rng)
    zero = GroupedFunctionalSample(y.sample.with_data(np.zeros_like(y.sample.data)), y.labels)
    assert np.all(ancova_residuals(zero, x, 5).data == 0)
    y_t = _loo_diff(y.sample.data, y.labels)
    assert np.allclose(ancova_residuals(y, x, 0).data, y_t, atol=1e-13)


def test_ancova_exact_fit_leaves_leverage_term(rng):
    # when Y~ lies in the span of the first K score vectors, the leave-one-out
    # projection removes everything except P_ii Y~_i
    y, x = _ancova_data(rng)
    k = 5
    x_t = _loo_diff(x.sample.data, x.labels)
    sw = np.sqrt(x.sample.grid.weights)
    u, s, _ = np.linalg.svd(x_t * sw, full_matrices=False)
    ck = u[:, :k]
    y_fit = ck @ rng.standard_normal((k, y.sample.grid.m))
    # choose Y so that its leave-one-out differences equal y_fit
    y_data = np.linalg.solve(loo_maker(y.labels), y_fit)
    yy = GroupedFunctionalSample(y.sample.with_data(y_data), y.labels)
    p = ck @ ck.T
    got = ancova_residuals(yy, x, k).data
    assert np.allclose(got, np.diag(p)[:, None] * y_fit, atol=1e-9)


def test_select_k(rng):
    y, x = _ancova_data(rng)
    k = select_ancova_k(y, x, [2, 4, 6])
    w = y.sample.grid.weights
    energies = {c: float(np.sum((ancova_residuals(y, x, c).data ** 2) @ w)) for c in (2, 4, 6)}
    assert k == min(energies, key=energies.get)


def test_indicator_residuals():
    g = Grid(3)
    assert np.all(indicator_residuals([0.4], g).data == 0)
    res = indicator_residuals([0.25, 0.75], g).data
    assert np.array_equal(res[:, 1], [0.5, -0.5])
    big = indicator_residuals(np.random.default_rng(0).random(37), Grid(101)).data
    assert np.max(np.abs(big.sum(axis=0))) < 1e-12
    with pytest.raises(InvalidInputError):
        indicator_residuals([1.5], g)
