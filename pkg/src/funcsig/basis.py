"""Empirical covariance operator and functional principal components.

The integral eigenproblem ``int K(t, s) phi(s) ds = theta phi(t)`` is
discretized with the trapezoid weights of the grid (Nystrom method). The
weighted symmetric form ``W^{1/2} K W^{1/2}`` is diagonalized, so the
returned eigenfunctions are exactly orthonormal for
:func:`funcsig.funcspace.inner_product`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStatisticError, InvalidInputError, NumericError
from .funcspace import Curve, FunctionalSample, Grid, _check_grid

__all__ = [
    "CovarianceOperator",
    "EigenSystem",
    "estimate_covariance",
    "eigendecompose",
    "fpca",
    "project_scores",
    "split_components",
    "split_first_component",
    "standardize_split",
]

NEGATIVE_EIG_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CovarianceOperator:
    grid: Grid
    kernel_matrix: np.ndarray


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Leading eigenpairs; ``functions`` holds one eigenfunction per row."""

    grid: Grid
    eigenvalues: np.ndarray
    functions: np.ndarray

    @property
    def k(self) -> int:
        return len(self.eigenvalues)

    @property
    def eigenfunctions(self) -> list[Curve]:
        return [Curve(self.grid, f) for f in self.functions]

    def truncate(self, k: int) -> "EigenSystem":
        if k > self.k:
            raise InvalidInputError(f"basis holds {self.k} components, asked for {k}")
        return EigenSystem(self.grid, self.eigenvalues[:k], self.functions[:k])


def estimate_covariance(s: FunctionalSample) -> CovarianceOperator:
    if s.n < 2:
        raise InvalidInputError("covariance estimation needs n >= 2 curves")
    centered = s.data - s.data.mean(axis=0)
    k = centered.T @ centered / s.n
    return CovarianceOperator(s.grid, 0.5 * (k + k.T))


def _fix_sign(v: np.ndarray, ref: np.ndarray | None, w: np.ndarray) -> np.ndarray:
    if ref is not None:
        d = float(np.dot(w, v * ref))
        if d != 0.0:
            return v if d > 0 else -v
    total = v.sum()
    if total != 0.0:
        return v if total > 0 else -v
    nz = np.flatnonzero(v)
    if nz.size and v[nz[0]] < 0:
        return -v
    return v


def eigendecompose(cov: CovarianceOperator, k: int, reference=None) -> EigenSystem:
    """Top ``k`` eigenpairs of the covariance operator.

    Parameters
    ----------
    cov : CovarianceOperator
    k : int
        Number of components, at most the grid size.
    reference : array_like, optional
        ``k x m`` array of reference directions. Eigenfunction ``j`` is
        oriented so that its inner product with reference ``j`` is
        nonnegative. Without a reference (or when that inner product is
        exactly zero) the eigenfunction is oriented so its values sum to a
        nonnegative number, ties broken by a positive first nonzero value.
    """
    grid = cov.grid
    if not 0 <= k <= grid.m:
        raise InvalidInputError(f"k={k} must lie in [0, m={grid.m}]")
    if reference is not None:
        reference = np.atleast_2d(np.asarray(reference, dtype=float))
        if reference.shape[0] < k or reference.shape[1] != grid.m:
            raise InvalidInputError("reference must provide k curves on the grid")
    w = grid.weights
    sw = np.sqrt(w)
    a = sw[:, None] * cov.kernel_matrix * sw[None, :]
    a = 0.5 * (a + a.T)
    try:
        vals, vecs = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed: {exc}") from exc
    vals = vals[::-1]
    vecs = vecs[:, ::-1]
    tol = NEGATIVE_EIG_TOL * max(1.0, float(vals[0]))
    if vals[-1] < -tol:
        raise NumericError(f"covariance has eigenvalue {vals[-1]:.3e} < 0")
    vals = np.where(vals < 0, 0.0, vals)

    funcs = np.empty((k, grid.m))
    for j in range(k):
        phi = vecs[:, j] / sw
        ref = None if reference is None else reference[j]
        funcs[j] = _fix_sign(phi, ref, w)
    return EigenSystem(grid, vals[:k].copy(), funcs)


def fpca(s: FunctionalSample, k: int, reference=None) -> EigenSystem:
    """Shortcut for ``eigendecompose(estimate_covariance(s), k)``."""
    return eigendecompose(estimate_covariance(s), k, reference)


def project_scores(s: FunctionalSample, basis: EigenSystem, k: int | None = None) -> np.ndarray:
    """``n x k`` matrix of scores ``<s_i, phi_j>``."""
    _check_grid(s.grid, basis.grid)
    k = basis.k if k is None else k
    if k > basis.k:
        raise InvalidInputError(f"basis holds {basis.k} components, asked for {k}")
    w = s.grid.weights
    scores = np.empty((s.n, k))
    for j in range(k):
        scores[:, j] = (s.data * basis.functions[j]) @ w
    return scores


def split_components(s: FunctionalSample, basis: EigenSystem, q: int = 1):
    """Split each curve into its first ``q`` scores and the remainder curve."""
    z = project_scores(s, basis, q)
    remainder = s.data - z @ basis.functions[:q]
    return z, s.with_data(remainder)


def split_first_component(s: FunctionalSample, basis: EigenSystem):
    """Return ``(z, w)`` with ``z_i = <s_i, phi_1>`` and ``w_i = s_i - z_i phi_1``."""
    z, w = split_components(s, basis, 1)
    return z[:, 0], w


def standardize_split(z, w: FunctionalSample):
    """Scale scores to unit empirical second moment and curves to unit mean energy.

    ``z`` may be a vector or an ``n x q`` matrix; each column is scaled
    separately.
    """
    z = np.asarray(z, dtype=float)
    zden = np.sqrt(np.mean(z**2, axis=0))
    if np.any(zden == 0):
        raise DegenerateStatisticError("scores have zero second moment")
    energy = (w.data**2) @ w.grid.weights
    wden = np.sqrt(energy.mean())
    if wden == 0:
        raise DegenerateStatisticError("remainder curves are identically zero")
    return z / zden, w.with_data(w.data / wden)
