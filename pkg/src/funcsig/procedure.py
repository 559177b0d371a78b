"""End-to-end significance test from residuals and covariates."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .basis import EigenSystem, fpca, split_components, standardize_split
from .bootstrap import wild_bootstrap
from .errors import InvalidInputError
from .funcspace import FunctionalSample
from .kernels import GramSet, WeightSequence, get_kernel, k_gram, phi_gram, raw_l2
from .ustat import TestResult, asymptotic_pvalue, statistic, u_gram

__all__ = ["Covariates", "bandwidth", "prepare_covariates", "weight_residuals", "build_grams", "significance_test"]


class Covariates(NamedTuple):
    z: np.ndarray  # n x q smoothing variables
    w: FunctionalSample | None  # remainder curves entering phi_gram
    basis: EigenSystem | None


def bandwidth(n: int, c: float = 1.0, q: int = 1) -> float:
    """``c n^{-1/(q+4)}``, i.e. ``c n^{-1/5}`` for a scalar smoothing variable."""
    return c * n ** (-1.0 / (q + 4))


def prepare_covariates(
    x: FunctionalSample,
    q: int = 1,
    standardize: bool = True,
    n_basis: int | None = None,
    basis: EigenSystem | None = None,
) -> Covariates:
    """Split functional covariates into ``q`` leading FPC scores and a remainder.

    The remainder is what the exponential weight compares; the scores are
    smoothed with the kernel. ``n_basis`` (default ``q``) sets how many
    components the returned basis keeps, e.g. for the weighted norm.
    """
    n_basis = q if n_basis is None else max(n_basis, q)
    if basis is None:
        basis = fpca(x, n_basis)
    z, w = split_components(x, basis, q)
    if standardize:
        z, w = standardize_split(z, w)
    return Covariates(z, w, basis)


def weight_residuals(u, omega=None):
    """Pre-multiply residuals by the positive weights ``omega(Z_i)``."""
    if omega is None:
        return u
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise InvalidInputError("omega weights must be positive")
    if isinstance(u, FunctionalSample):
        return u.with_data(u.data * omega[:, None])
    return np.asarray(u, dtype=float) * omega


def build_grams(
    u,
    z,
    w: FunctionalSample | None,
    h: float,
    kernel="epanechnikov",
    weights: WeightSequence | None = None,
    basis: EigenSystem | None = None,
    phi: np.ndarray | None = None,
) -> GramSet:
    ug = u_gram(u)
    n = ug.shape[0]
    z = np.asarray(z, dtype=float)
    z2 = z[:, None] if z.ndim == 1 else z
    if z2.shape[0] != n:
        raise InvalidInputError(f"Z has {z2.shape[0]} rows, residuals have {n}")
    kg = k_gram(z2, get_kernel(kernel), h)
    if phi is None:
        if w is None:
            phi = np.ones((n, n))
        else:
            if w.n != n:
                raise InvalidInputError(f"W has {w.n} curves, residuals have {n}")
            phi = phi_gram(w, weights, basis)
    return GramSet(ug, kg, phi, float(h), z2.shape[1])


def significance_test(
    u,
    z,
    w: FunctionalSample | None,
    h: float,
    kernel="epanechnikov",
    weights: WeightSequence | None = None,
    basis: EigenSystem | None = None,
    omega=None,
    alpha: float = 0.10,
    n_boot: int = 0,
    seed=None,
    residual_maker: np.ndarray | None = None,
) -> TestResult:
    """Kernel significance test of ``E[U | Z, W] = 0``.

    Parameters
    ----------
    u : array_like or FunctionalSample
        Residuals, scalar (length ``n``) or functional.
    z : array_like
        ``n`` or ``n x q`` smoothing variables.
    w : FunctionalSample or None
        Remainder covariate curves; ``None`` sets every ``phi_ij`` to 1.
    h : float
        Bandwidth.
    weights, basis
        Norm used for ``phi_ij``; plain L2 by default.
    n_boot : int
        Wild bootstrap replicates; 0 skips the bootstrap.
    residual_maker : ndarray, optional
        ``n x n`` linear map taking responses to ``u``. When given, bootstrap
        residuals are re-estimated as ``M (zeta * u)``; leave it out when
        ``u`` holds true errors rather than fitted residuals.
    """
    weights = raw_l2() if weights is None else weights
    u = weight_residuals(u, omega)
    grams = build_grams(u, z, w, h, kernel, weights, basis)
    i_n, v_n2, t_n = statistic(grams)
    p_asym, _ = asymptotic_pvalue(t_n, alpha)
    result = TestResult(
        i_n=i_n,
        v_n2=v_n2,
        t_n=t_n,
        p_asym=p_asym,
        h=float(h),
        q=grams.q,
        n=grams.n,
        kernel=get_kernel(kernel).name,
        phi_mode=weights.mode if w is not None else "none",
        seed=seed if seed is None or isinstance(seed, int) else None,
    )
    if n_boot:
        u_vec = None if isinstance(u, FunctionalSample) else np.asarray(u, dtype=float)
        boot = wild_bootstrap(
            grams, t_n, n_boot, alpha, np.random.default_rng(seed),
            residual_maker=residual_maker, u=u_vec,
        )
        result.p_boot = boot.p_boot
        result.crit_boot = boot.crit
        result.n_boot = n_boot
        result.n_boot_excluded = boot.n_excluded
    return result
