"""Smoothing kernels, covariate weights and the pairwise Gram matrices.

Two ``n x n`` matrices do not depend on the response and are shared across
bootstrap replicates:

* ``k_gram[i, j] = K((Z_i - Z_j) / h)`` with a multiplicative kernel ``K``;
* ``phi_gram[i, j] = exp(-||W_i - W_j||^2 / 2)`` with either the plain L2
  norm or the weighted norm ``sum_k a_k <W_i - W_j, phi_k>^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basis import EigenSystem, project_scores
from .errors import InvalidInputError
from .funcspace import FunctionalSample, pairwise_sq_dist

__all__ = [
    "UnivariateKernel",
    "MultiplicativeKernel",
    "EPANECHNIKOV",
    "GAUSSIAN",
    "TRIANGLE",
    "get_kernel",
    "kernel_eval",
    "k_gram",
    "WeightSequence",
    "a_weights",
    "raw_l2",
    "default_k_trunc",
    "phi_gram",
    "GramSet",
]


def _epanechnikov(x):
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) < 1.0, 0.75 * (1.0 - x * x), 0.0)


def _gaussian(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def _triangle(x):
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) < 1.0, 1.0 - np.abs(x), 0.0)


@dataclass(frozen=True)
class UnivariateKernel:
    """Symmetric probability density used for smoothing.

    ``ft_positive`` records whether the Fourier transform is strictly
    positive. The Epanechnikov kernel fails that condition but is the
    customary choice in practice.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    ft_positive: bool
    support: float  # half-width, inf for unbounded

    def __call__(self, x):
        return self.func(x)


EPANECHNIKOV = UnivariateKernel("epanechnikov", _epanechnikov, False, 1.0)
GAUSSIAN = UnivariateKernel("gaussian", _gaussian, True, math.inf)
TRIANGLE = UnivariateKernel("triangle", _triangle, True, 1.0)

_KERNELS = {k.name: k for k in (EPANECHNIKOV, GAUSSIAN, TRIANGLE)}


def get_kernel(name: str | UnivariateKernel) -> UnivariateKernel:
    if isinstance(name, UnivariateKernel):
        return name
    try:
        return _KERNELS[name.lower()]
    except KeyError:
        raise InvalidInputError(
            f"unknown kernel {name!r}; choose from {sorted(_KERNELS)}"
        ) from None


@dataclass(frozen=True)
class MultiplicativeKernel:
    """Product kernel ``K(z) = prod_d base(z_d)`` on R^q."""

    base: UnivariateKernel
    q: int = 1

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        return np.prod(self.base(z), axis=-1)

    @property
    def at_zero(self) -> float:
        return float(self.base(0.0)) ** self.q


def kernel_eval(k: MultiplicativeKernel, z) -> float:
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.shape != (k.q,):
        raise InvalidInputError(f"expected a vector of length {k.q}, got shape {z.shape}")
    return float(k(z))


def _as_design(z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.ndim == 1:
        z = z[:, None]
    if z.ndim != 2:
        raise InvalidInputError("Z must be a vector or an n x q matrix")
    return z


def k_gram(z, kernel: MultiplicativeKernel | UnivariateKernel | str, h: float) -> np.ndarray:
    """Matrix of ``K((Z_i - Z_j) / h)``."""
    if not h > 0:
        raise InvalidInputError(f"bandwidth must be positive, got {h}")
    z = _as_design(z)
    if not isinstance(kernel, MultiplicativeKernel):
        kernel = MultiplicativeKernel(get_kernel(kernel), z.shape[1])
    elif kernel.q != z.shape[1]:
        raise InvalidInputError(f"kernel dimension {kernel.q} != Z columns {z.shape[1]}")
    diff = (z[:, None, :] - z[None, :, :]) / h
    return kernel(diff)


@dataclass(frozen=True, eq=False)
class WeightSequence:
    """Norm used inside ``phi_gram``.

    ``mode="l2"`` uses the plain L2 distance of the curves. ``mode="weighted"``
    uses ``sum_k a_k (c_ik - c_jk)^2`` over the first ``k_trunc`` basis
    scores, with ``weights`` holding ``a_1..a_{k_trunc}``.
    """

    mode: str
    beta: float | None = None
    epsilon: float | None = None
    weights: np.ndarray | None = None

    @property
    def k_trunc(self) -> int | None:
        return None if self.weights is None else len(self.weights)


def raw_l2() -> WeightSequence:
    return WeightSequence("l2")


def default_k_trunc(n: int, m: int) -> int:
    return min(n, m, 50)


def a_weights(beta: float = 2.0, epsilon: float = 0.5, k_trunc: int = 50) -> WeightSequence:
    """Summable weights matched to covariate score decay ``E c_k^2 ~ k^-beta``.

    ======================  =========================================
    regime                  ``a_k`` proportional to
    ======================  =========================================
    ``beta > 2``            ``k^(-beta/2)``
    ``1 < beta <= 2``       ``k^-1 ln(k+1)^-(1+eps)``
    ``0 < beta <= 1``       ``k^(beta-2) ln(k+1)^(-2(1+eps))``
    ======================  =========================================

    The sequence is scaled so that ``a_1 = 1``; ``ln(k+1)`` replaces
    ``ln k`` so the first term is finite.
    """
    if not beta > 0:
        raise InvalidInputError(f"beta must be positive, got {beta}")
    if not epsilon > 0:
        raise InvalidInputError(f"epsilon must be positive, got {epsilon}")
    if int(k_trunc) != k_trunc or k_trunc < 1:
        raise InvalidInputError(f"k_trunc must be a positive integer, got {k_trunc}")
    k = np.arange(1, int(k_trunc) + 1, dtype=float)
    log = np.log(k + 1.0)
    if beta > 2:
        a = k ** (-beta / 2)
    elif beta > 1:
        a = 1.0 / (k * log ** (1.0 + epsilon))
    else:
        a = k ** (beta - 2.0) / log ** (2.0 * (1.0 + epsilon))
    return WeightSequence("weighted", float(beta), float(epsilon), a / a[0])


def phi_gram(
    w: FunctionalSample,
    weights: WeightSequence | None = None,
    basis: EigenSystem | None = None,
) -> np.ndarray:
    """Matrix of ``exp(-||W_i - W_j||^2 / 2)`` for the chosen norm."""
    weights = raw_l2() if weights is None else weights
    if weights.mode == "l2":
        return np.exp(-0.5 * pairwise_sq_dist(w))
    if weights.mode != "weighted":
        raise InvalidInputError(f"unknown phi mode {weights.mode!r}")
    if basis is None:
        raise InvalidInputError("weighted norm needs a basis to compute scores")
    kt = weights.k_trunc
    if basis.k < kt:
        raise InvalidInputError(f"basis holds {basis.k} components, weights need {kt}")
    c = project_scores(w, basis, kt)
    diff = c[:, None, :] - c[None, :, :]
    d2 = (diff * diff) @ weights.weights
    return np.exp(-0.5 * (0.5 * (d2 + d2.T)))


@dataclass(frozen=True, eq=False)
class GramSet:
    """Pairwise matrices entering the U-statistic, plus the bandwidth used."""

    u_gram: np.ndarray
    k_gram: np.ndarray
    phi_gram: np.ndarray
    h: float
    q: int

    @property
    def n(self) -> int:
        return self.u_gram.shape[0]

    def with_u(self, u_gram: np.ndarray) -> "GramSet":
        return GramSet(u_gram, self.k_gram, self.phi_gram, self.h, self.q)
