"""Plug-in residuals for the models the test is applied to.

Each builder returns the estimated ``U_i`` that enter the statistic: a
vector for scalar responses, a :class:`FunctionalSample` for curves.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .basis import EigenSystem, fpca
from .errors import InvalidInputError, RankDeficiencyError
from .funcspace import Curve, FunctionalSample, Grid

__all__ = [
    "GroupedFunctionalSample",
    "FpcLinearFit",
    "center_residuals",
    "fpc_linear_residuals",
    "anova_residuals",
    "ancova_residuals",
    "select_ancova_k",
    "indicator_residuals",
    "centering_maker",
    "loo_maker",
    "ancova_maker",
]

RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class GroupedFunctionalSample:
    sample: FunctionalSample
    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.shape != (self.sample.n,):
            raise InvalidInputError("need exactly one group label per curve")
        object.__setattr__(self, "labels", labels)

    @property
    def groups(self) -> np.ndarray:
        return np.unique(self.labels)

    @property
    def sizes(self) -> dict:
        g, counts = np.unique(self.labels, return_counts=True)
        return dict(zip(g.tolist(), counts.tolist()))


def center_residuals(y):
    """``U_i = Y_i - mean(Y)`` for scalar or functional responses."""
    if isinstance(y, FunctionalSample):
        return y.with_data(y.data - y.data.mean(axis=0))
    y = np.asarray(y, dtype=float)
    return y - y.mean()


class FpcLinearFit(NamedTuple):
    residuals: np.ndarray
    intercept: float
    slope: Curve
    coef: np.ndarray  # slope coordinates in the estimated FPC basis
    basis: EigenSystem
    residual_maker: np.ndarray  # M with residuals = M @ y


def fpc_linear_residuals(
    y, x: FunctionalSample, n_components: int = 5, basis: EigenSystem | None = None
) -> FpcLinearFit:
    """Residuals of the scalar-on-function linear model fitted by FPC regression.

    The slope is estimated as ``sum_j (g_j / theta_j) phi_j`` over the first
    ``n_components`` eigenfunctions of the covariate covariance, where
    ``g_j`` is the projection of the empirical cross-covariance of Y and X.
    A precomputed FPC ``basis`` of ``x`` may be passed to skip the
    eigendecomposition.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (x.n,):
        raise InvalidInputError("y must hold one scalar per covariate curve")
    if x.n <= n_components:
        raise InvalidInputError(f"need n > {n_components} observations, got {x.n}")
    basis = fpca(x, n_components) if basis is None else basis.truncate(n_components)
    theta = basis.eigenvalues
    if n_components and theta[-1] <= RANK_TOL * theta[0]:
        raise RankDeficiencyError(
            f"eigenvalue {n_components} is {theta[-1]:.3e}; covariate too degenerate"
        )
    ybar = y.mean()
    xbar = x.data.mean(axis=0)
    w = x.grid.weights
    g_hat = (y - ybar) @ (x.data - xbar) / x.n
    g_coef = basis.functions @ (w * g_hat)
    coef = g_coef / theta
    slope = coef @ basis.functions
    intercept = ybar - float(np.dot(w, xbar * slope))
    fitted = intercept + x.data @ (w * slope)
    # centered scores are orthogonal, so the fit is least squares on [1, scores]
    scores = (x.data - xbar) @ (w * basis.functions).T
    design = np.column_stack([np.ones(x.n), scores])
    hat = design @ np.linalg.solve(design.T @ design, design.T)
    maker = np.eye(x.n) - hat
    return FpcLinearFit(y - fitted, intercept, Curve(x.grid, slope), coef, basis, maker)


def centering_maker(n: int) -> np.ndarray:
    """``M`` with ``M @ y = y - mean(y)``."""
    return np.eye(n) - np.full((n, n), 1.0 / n)


def loo_maker(labels=None, n: int | None = None) -> np.ndarray:
    """``M`` with ``M @ y`` the leave-one-out residuals of :func:`anova_residuals`.

    ``labels=None`` gives the overall (single group) version for ``n`` curves.
    """
    if labels is None:
        labels = np.zeros(n, dtype=int)
    labels = np.asarray(labels)
    same = labels[:, None] == labels[None, :]
    size = same.sum(axis=1).astype(float)
    if np.any(size < 2):
        raise InvalidInputError("every group needs at least two members")
    mean_others = same / (size - 1)[:, None]
    np.fill_diagonal(mean_others, 0.0)
    return np.eye(len(labels)) - mean_others


def _group_index(labels: np.ndarray):
    groups, inverse = np.unique(labels, return_inverse=True)
    return groups, inverse


def _loo_group_means(data: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Leave-one-out class means ``(n_j - 1)^-1 sum_{k != i} A_kj``."""
    groups, inv = _group_index(labels)
    counts = np.bincount(inv)
    if np.any(counts < 2):
        bad = groups[counts < 2].tolist()
        raise InvalidInputError(f"groups {bad} have a single member")
    sums = np.zeros((len(groups), data.shape[1]))
    np.add.at(sums, inv, data)
    return (sums[inv] - data) / (counts[inv] - 1)[:, None]


def anova_residuals(y: GroupedFunctionalSample, mode: str = "group") -> FunctionalSample:
    """Residuals against leave-one-out means.

    ``mode="overall"`` subtracts the mean of all other curves (no-effect
    model); ``mode="group"`` subtracts the mean of the other curves in the
    same class (one-way functional ANOVA).
    """
    data = y.sample.data
    n = data.shape[0]
    if mode == "overall":
        if n < 2:
            raise InvalidInputError("need at least two curves")
        loo = (data.sum(axis=0) - data) / (n - 1)
    elif mode == "group":
        loo = _loo_group_means(data, y.labels)
    else:
        raise InvalidInputError(f"unknown mode {mode!r}")
    return y.sample.with_data(data - loo)


def _ancova_parts(y: GroupedFunctionalSample, x: GroupedFunctionalSample):
    if not np.array_equal(y.labels, x.labels):
        raise InvalidInputError("response and covariate group labels differ")
    y_t = y.sample.data - _loo_group_means(y.sample.data, y.labels)
    x_t = x.sample.data - _loo_group_means(x.sample.data, x.labels)
    sw = np.sqrt(x.sample.grid.weights)
    c, s, _ = np.linalg.svd(x_t * sw, full_matrices=False)
    return y_t, c, s


def _ancova_from_parts(y_t, c, s, k):
    if k > len(s):
        raise InvalidInputError(f"K={k} exceeds the {len(s)} available components")
    if k and s[k - 1] <= RANK_TOL * s[0]:
        raise RankDeficiencyError(f"component {k} of the covariate has zero variance")
    ck = c[:, :k]
    proj = ck @ ck.T
    return y_t - (proj - np.diag(np.diag(proj))) @ y_t


def ancova_residuals(
    y: GroupedFunctionalSample, x: GroupedFunctionalSample, k: int = 13
) -> FunctionalSample:
    """Residuals of the functional ANCOVA model with a leave-one-out projection.

    Both response and covariate are first differenced against their
    leave-one-out class means. The pooled covariate differences are written
    as ``sum_k lambda_k c_ik v_k`` with unit-norm score vectors ``c_k``, and
    ``U_i = Y~_i - sum_k c_ik (sum_{l != i} c_lk Y~_l)``.
    """
    y_t, c, s = _ancova_parts(y, x)
    return y.sample.with_data(_ancova_from_parts(y_t, c, s, k))


def ancova_maker(y: GroupedFunctionalSample, x: GroupedFunctionalSample, k: int = 13) -> np.ndarray:
    """``M`` with ``M @ Y`` equal to :func:`ancova_residuals` (row-wise)."""
    _, c, s = _ancova_parts(y, x)
    if k and s[k - 1] <= RANK_TOL * s[0]:
        raise RankDeficiencyError(f"component {k} of the covariate has zero variance")
    ck = c[:, :k]
    proj = ck @ ck.T
    n = y.sample.n
    return (np.eye(n) - proj + np.diag(np.diag(proj))) @ loo_maker(y.labels)


def select_ancova_k(y: GroupedFunctionalSample, x: GroupedFunctionalSample, candidates) -> int:
    """Number of components minimizing the total residual energy."""
    y_t, c, s = _ancova_parts(y, x)
    w = y.sample.grid.weights
    best_k, best = None, np.inf
    for k in candidates:
        u = _ancova_from_parts(y_t, c, s, k)
        energy = float(np.sum((u * u) @ w))
        if energy < best:
            best_k, best = k, energy
    if best_k is None:
        raise InvalidInputError("no candidate K given")
    return best_k


def indicator_residuals(y, grid: Grid) -> FunctionalSample:
    """``U_i(t) = 1{Y_i <= t} - n^-1 sum_j 1{Y_j <= t}`` for Y in [0, 1]."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size < 1:
        raise InvalidInputError("y must be a nonempty vector")
    if np.any((y < 0) | (y > 1)):
        raise InvalidInputError("indicator residuals need responses in [0, 1]")
    ind = (y[:, None] <= grid.points[None, :]).astype(float)
    return FunctionalSample(grid, ind - ind.mean(axis=0))
