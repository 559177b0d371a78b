import math

import numpy as np
import pytest

from funcsig.basis import (
    CovarianceOperator,
    eigendecompose,
    estimate_covariance,
    fpca,
    project_scores,
    split_components,
    split_first_component,
    standardize_split,
)
from funcsig.errors import DegenerateStatisticError, InvalidInputError
from funcsig.funcspace import FunctionalSample, Grid, inner_product


def test_identical_rows_give_zero_covariance():
    g = Grid(11)
    s = FunctionalSample(g, np.tile(np.sin(g.points), (4, 1)))
    assert np.all(estimate_covariance(s).kernel_matrix == 0)


def test_two_opposite_rows():
    g = Grid(9)
    f = np.cos(3 * g.points) + 0.5
    cov = estimate_covariance(FunctionalSample(g, np.vstack([f, -f])))
    assert np.array_equal(cov.kernel_matrix, np.outer(f, f))


def test_covariance_requires_two_curves():
    g = Grid(5)
    with pytest.raises(InvalidInputError):
        estimate_covariance(FunctionalSample(g, np.ones((1, 5))))


def test_zero_operator():
    g = Grid(21)
    es = eigendecompose(CovarianceOperator(g, np.zeros((21, 21))), 3)
    assert np.all(es.eigenvalues == 0)


def test_rank_one_spectrum():
    g = Grid(201)
    f = 1.5 * np.sin(np.pi * g.points) + g.points
    c = inner_product(g.curve(f), g.curve(f))
    es = eigendecompose(CovarianceOperator(g, np.outer(f, f)), 4)
    assert abs(es.eigenvalues[0] - c) < 1e-6
    assert np.all(np.abs(es.eigenvalues[1:]) < 1e-10)
    phi = es.functions[0]
    assert np.allclose(phi, f / math.sqrt(c), atol=1e-10)


def test_orthonormal_and_descending(rng):
    g = Grid(51)
    s = FunctionalSample(g, np.cumsum(rng.standard_normal((30, 51)), axis=1) * 0.14)
    es = fpca(s, 10)
    assert np.all(np.diff(es.eigenvalues) <= 0) and np.all(es.eigenvalues >= 0)
    gram = (es.functions * g.weights) @ es.functions.T
    assert np.allclose(gram, np.eye(10), atol=1e-12)


def test_trace_and_eigen_residual(rng):
    # quadrature-weighted discretization: the trace carries the trapezoid
    # weights and eigenpairs solve K W phi = theta phi
    g = Grid(41)
    s = FunctionalSample(g, rng.standard_normal((12, 41)))
    cov = estimate_covariance(s)
    es = eigendecompose(cov, g.m)
    trace = float(np.dot(g.weights, np.diag(cov.kernel_matrix)))
    assert math.isclose(es.eigenvalues.sum(), trace, rel_tol=1e-8)
    op = cov.kernel_matrix * g.weights[None, :]
    scale = max(es.eigenvalues[0], 1.0)
    for theta, phi in zip(es.eigenvalues, es.functions):
        assert np.linalg.norm(op @ phi - theta * phi) <= 1e-8 * scale


def test_decomposition_is_bitwise_deterministic(rng):
    g = Grid(31)
    s = FunctionalSample(g, rng.standard_normal((15, 31)))
    a, b = fpca(s, 5), fpca(s, 5)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.functions, b.functions)
    for phi in a.functions:
        assert phi.sum() >= 0


def test_reference_direction_orients_eigenfunctions(rng):
    g = Grid(31)
    s = FunctionalSample(g, rng.standard_normal((15, 31)))
    base = fpca(s, 3)
    flipped = fpca(s, 3, reference=-base.functions)
    assert np.array_equal(flipped.functions, -base.functions)


def test_projection_examples(rng):
    g = Grid(41)
    s = FunctionalSample(g, rng.standard_normal((10, 41)))
    es = fpca(s, 4)
    probe = FunctionalSample(g, np.vstack([es.functions[0], np.zeros(41)]))
    scores = project_scores(probe, es)
    assert np.allclose(scores[0], [1, 0, 0, 0], atol=1e-6)
    assert np.all(scores[1] == 0)


def test_split_examples(rng):
    g = Grid(41)
    s = FunctionalSample(g, rng.standard_normal((10, 41)))
    es = fpca(s, 3)
    row = 3 * es.functions[0]
    ortho = es.functions[1] + 2 * es.functions[2]
    z, w = split_first_component(FunctionalSample(g, np.vstack([row, ortho])), es)
    assert abs(z[0] - 3) < 1e-10 and np.max(np.abs(w.data[0])) < 1e-10
    assert abs(z[1]) < 1e-10 and np.allclose(w.data[1], ortho, atol=1e-10)


def test_split_reconstructs(rng):
    g = Grid(41)
    s = FunctionalSample(g, rng.standard_normal((10, 41)))
    es = fpca(s, 4)
    z, w = split_components(s, es, 2)
    assert z.shape == (10, 2)
    assert np.allclose(z @ es.functions[:2] + w.data, s.data, atol=1e-12)
    assert np.allclose(project_scores(w, es, 2), 0, atol=1e-10)


def test_standardize_split():
    g = Grid(5)
    w = FunctionalSample(g, np.vstack([np.ones(5), 3 * np.ones(5)]))
    z1, w1 = standardize_split([1.0, -1.0], w)
    z2, _ = standardize_split([2.0, -2.0], w)
    assert np.allclose(z1, [1, -1]) and np.allclose(z2, [1, -1])
    energy = (w1.data**2) @ g.weights
    assert math.isclose(energy.mean(), 1.0, rel_tol=1e-12)
    zq, _ = standardize_split(np.array([[1.0, 4.0], [-1.0, 0.0]]), w)
    assert np.allclose(np.mean(zq**2, axis=0), 1.0)
    with pytest.raises(DegenerateStatisticError):
        standardize_split([0.0, 0.0], w)
