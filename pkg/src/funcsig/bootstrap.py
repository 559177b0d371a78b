"""Wild bootstrap calibration with Mammen's two-point multipliers.

Multiplying residual ``i`` by ``zeta_i`` scales ``<U_i, U_j>`` by
``zeta_i zeta_j`` while ``k_gram`` and ``phi_gram`` stay fixed, so each
replicate reduces to two quadratic forms in the multiplier vector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStatisticError, InvalidInputError
from .kernels import GramSet
from .ustat import pair_terms

__all__ = ["MammenLaw", "MAMMEN", "mammen_draw", "BootstrapResult", "wild_bootstrap", "replicate_stats"]

_SQRT5 = math.sqrt(5.0)


@dataclass(frozen=True)
class MammenLaw:
    v_minus: float = -(_SQRT5 - 1.0) / 2.0
    v_plus: float = (_SQRT5 + 1.0) / 2.0
    p_minus: float = (_SQRT5 + 1.0) / (2.0 * _SQRT5)
    p_plus: float = (_SQRT5 - 1.0) / (2.0 * _SQRT5)

    def moment(self, k: int) -> float:
        return self.p_minus * self.v_minus**k + self.p_plus * self.v_plus**k


MAMMEN = MammenLaw()

MAX_EXCLUDED_FRACTION = 0.10


def mammen_draw(rng: np.random.Generator, size) -> np.ndarray:
    """I.i.d. Mammen multipliers (mean 0, variance 1, third moment 1)."""
    u = rng.random(size)
    return np.where(u < MAMMEN.p_minus, MAMMEN.v_minus, MAMMEN.v_plus)


@dataclass
class BootstrapResult:
    stats: np.ndarray  # sorted valid replicates
    crit: float
    p_boot: float
    n_excluded: int = 0


def _scaled(g: GramSet) -> tuple[float, float]:
    n = g.n
    return 1.0 / (n * (n - 1) * g.h**g.q), 2.0 / (n**2 * (n - 1) ** 2 * g.h ** (2 * g.q))


def replicate_stats(
    g: GramSet,
    multipliers: np.ndarray,
    residual_maker: np.ndarray | None = None,
    u=None,
    chunk: int = 64,
) -> tuple[np.ndarray, np.ndarray]:
    """``(I*, v*^2)`` for each row of a ``B x n`` multiplier matrix.

    Without ``residual_maker`` the bootstrap residuals are ``zeta_i U_i``.
    With it, they are ``M (zeta * U)``: the multiplied residuals passed
    through the same linear map ``M`` that produced ``U`` from the
    response, so refitted bootstrap residuals inherit the constraints
    (e.g. zero sum) of the original ones. ``u`` (vector or n x m array) is
    required for scalar residuals in that case; otherwise ``g.u_gram`` is
    enough.
    """
    n = g.n
    zeta = np.atleast_2d(np.asarray(multipliers, dtype=float))
    if zeta.shape[1] != n:
        raise InvalidInputError(f"multipliers need {n} columns, got {zeta.shape[1]}")
    ci, cv = _scaled(g)
    if residual_maker is None:
        p = pair_terms(g)
        z2 = zeta * zeta
        i_star = np.einsum("bi,bi->b", zeta @ p, zeta) * ci
        v_star = np.einsum("bi,bi->b", z2 @ (p * p), z2) * cv
        return i_star, v_star

    m = np.asarray(residual_maker, dtype=float)
    if m.shape != (n, n):
        raise InvalidInputError(f"residual_maker must be {n} x {n}")
    a = g.k_gram * g.phi_gram
    np.fill_diagonal(a, 0.0)
    a2 = a * a
    i_star = np.empty(zeta.shape[0])
    v_star = np.empty(zeta.shape[0])
    for start in range(0, zeta.shape[0], chunk):
        zb = zeta[start : start + chunk]
        if u is not None and np.ndim(u) == 1:
            s = (zb * np.asarray(u, dtype=float)) @ m.T  # b x n residual vectors
            i_star[start : start + len(zb)] = np.einsum("bi,bi->b", s @ a, s)
            s2 = s * s
            v_star[start : start + len(zb)] = np.einsum("bi,bi->b", s2 @ a2, s2)
        else:
            inner = zb[:, :, None] * g.u_gram * zb[:, None, :]
            ug = m @ inner @ m.T
            terms = ug * a
            i_star[start : start + len(zb)] = terms.sum(axis=(1, 2))
            v_star[start : start + len(zb)] = (terms * terms).sum(axis=(1, 2))
    return i_star * ci, v_star * cv


def wild_bootstrap(
    g: GramSet,
    t_obs: float,
    n_boot: int = 199,
    alpha: float = 0.10,
    rng: np.random.Generator | int | None = None,
    draw=mammen_draw,
    residual_maker: np.ndarray | None = None,
    u=None,
) -> BootstrapResult:
    """Bootstrap critical value and p-value for an observed ``T_n``.

    Replicates whose variance estimate vanishes are dropped; more than 10%
    dropped raises :class:`DegenerateStatisticError`. The critical value is
    the ``ceil((1 - alpha) B)``-th order statistic of the kept replicates and
    the p-value is ``(1 + #{T* >= T_n}) / (B + 1)``.

    ``residual_maker`` and ``u`` are forwarded to :func:`replicate_stats`.
    """
    if n_boot < 1:
        raise InvalidInputError("n_boot must be at least 1")
    if not 0 < alpha < 1:
        raise InvalidInputError(f"alpha must lie in (0, 1), got {alpha}")
    rng = np.random.default_rng(rng)
    zeta = draw(rng, (n_boot, g.n))
    i_star, v_star = replicate_stats(g, zeta, residual_maker, u)
    ok = v_star > 0
    excluded = int(n_boot - ok.sum())
    if excluded > MAX_EXCLUDED_FRACTION * n_boot:
        raise DegenerateStatisticError(
            f"{excluded} of {n_boot} bootstrap replicates have zero variance; increase h"
        )
    stats = np.sort(i_star[ok] / np.sqrt(v_star[ok]))
    b = stats.size
    # guard against (1 - 0.1) * 100 = 90.00000000000001
    idx = max(math.ceil((1.0 - alpha) * b - 1e-9), 1) - 1
    crit = float(stats[idx])
    p_boot = (1.0 + np.count_nonzero(stats >= t_obs)) / (b + 1.0)
    return BootstrapResult(stats, crit, float(p_boot), excluded)
