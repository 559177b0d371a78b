"""Chi-square test of no linear effect built from cross-covariance scores.

With ``v_k`` (eigenvalues ``gamma_k``) the eigenfunctions of the covariate
covariance and ``u_j`` (``lambda_j``) those of the response covariance,

    T = n sum_{k <= p, j <= q} <Delta_n v_k, u_j>^2 / (gamma_k lambda_j)

where ``Delta_n x = n^-1 sum_i <X_i, x> Y_i``. Under no linear effect T is
asymptotically chi-square with ``p q`` degrees of freedom. Both samples are
centered before the operators are formed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .basis import EigenSystem, fpca, project_scores
from .errors import InvalidInputError, RankDeficiencyError
from .funcspace import FunctionalSample, center_sample

__all__ = ["CrossOperators", "KmszResult", "cross_operators", "kmsz_statistic"]

RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CrossOperators:
    gamma_hat: EigenSystem
    lambda_hat: EigenSystem
    x_centered: FunctionalSample
    y_centered: FunctionalSample

    @property
    def x_scores(self) -> np.ndarray:
        return project_scores(self.x_centered, self.gamma_hat)

    @property
    def y_scores(self) -> np.ndarray:
        return project_scores(self.y_centered, self.lambda_hat)

    def delta_op(self, f: np.ndarray) -> np.ndarray:
        """Apply ``Delta_n`` to a covariate-grid function given by its values."""
        xc, yc = self.x_centered, self.y_centered
        coef = xc.data @ (xc.grid.weights * np.asarray(f, dtype=float))
        return coef @ yc.data / xc.n


@dataclass
class KmszResult:
    statistic: float
    df: int
    p_value: float

    def reject(self, alpha: float) -> bool:
        return self.p_value <= alpha


def cross_operators(x: FunctionalSample, y: FunctionalSample, p: int, q: int) -> CrossOperators:
    if x.n != y.n:
        raise InvalidInputError("x and y must have the same number of curves")
    xc, yc = center_sample(x), center_sample(y)
    gx = fpca(xc, p)
    gy = fpca(yc, q)
    return CrossOperators(gx, gy, xc, yc)


def _check_rank(vals: np.ndarray, name: str) -> None:
    if len(vals) and vals[-1] <= RANK_TOL * max(vals[0], np.finfo(float).tiny):
        raise RankDeficiencyError(f"{name} has a (near) zero eigenvalue among those requested")


def kmsz_statistic(x: FunctionalSample, y: FunctionalSample, p: int = 1, q: int = 6) -> KmszResult:
    if p < 1 or q < 1:
        raise InvalidInputError("p and q must be positive")
    ops = cross_operators(x, y, p, q)
    gam = ops.gamma_hat.eigenvalues
    lam = ops.lambda_hat.eigenvalues
    _check_rank(gam, "covariate covariance")
    _check_rank(lam, "response covariance")
    n = x.n
    # <Delta_n v_k, u_j> = n^-1 sum_i <X_i, v_k> <Y_i, u_j>
    cross = ops.x_scores.T @ ops.y_scores / n
    t = float(n * np.sum(cross**2 / np.outer(gam, lam)))
    df = p * q
    return KmszResult(t, df, float(chi2.sf(t, df)))
