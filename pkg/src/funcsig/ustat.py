"""The U-statistic ``I_n(h)``, its variance estimate and the studentized ``T_n``."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import norm

from .errors import DegenerateStatisticError, InvalidInputError
from .funcspace import FunctionalSample, sample_inner
from .kernels import GramSet

__all__ = [
    "TestResult",
    "u_gram",
    "pair_terms",
    "compute_In",
    "compute_vn2",
    "compute_Tn",
    "asymptotic_pvalue",
    "statistic",
]


@dataclass
class TestResult:
    __test__ = False  # keep pytest from collecting this class

    i_n: float
    v_n2: float
    t_n: float
    p_asym: float
    h: float
    q: int
    n: int
    kernel: str = ""
    phi_mode: str = ""
    seed: int | None = None
    p_boot: float | None = None
    crit_boot: float | None = None
    n_boot: int = 0
    n_boot_excluded: int = 0
    extra: dict = field(default_factory=dict)

    def reject(self, alpha: float, bootstrap: bool | None = None) -> bool:
        if bootstrap is None:
            bootstrap = self.p_boot is not None
        if bootstrap:
            if self.crit_boot is None:
                raise InvalidInputError("no bootstrap critical value available")
            return self.t_n >= self.crit_boot
        return self.t_n >= norm.ppf(1.0 - alpha)

    def to_record(self) -> dict:
        rec = asdict(self)
        extra = rec.pop("extra")
        rec.update(extra)
        return rec


def u_gram(u) -> np.ndarray:
    """Inner products of the (weighted) residuals.

    ``u`` is either a length-``n`` vector of scalar residuals or a
    :class:`FunctionalSample` of residual curves.
    """
    if isinstance(u, FunctionalSample):
        return sample_inner(u)
    u = np.asarray(u, dtype=float)
    if u.ndim != 1:
        raise InvalidInputError("scalar residuals must be a 1-d array")
    return np.multiply.outer(u, u)


def pair_terms(g: GramSet) -> np.ndarray:
    """Elementwise product ``<U_i, U_j> K_ij phi_ij`` with a zeroed diagonal."""
    p = g.u_gram * g.k_gram * g.phi_gram
    np.fill_diagonal(p, 0.0)
    return p


def _check(g: GramSet) -> int:
    n = g.n
    if n < 2:
        raise InvalidInputError("the statistic needs n >= 2 observations")
    for name in ("k_gram", "phi_gram"):
        if getattr(g, name).shape != (n, n):
            raise InvalidInputError(f"{name} shape does not match u_gram")
    return n


def _upper_sum(p: np.ndarray) -> float:
    # correctly rounded sum over i < j, independent of index order
    iu = np.triu_indices(p.shape[0], k=1)
    return math.fsum(p[iu])


def compute_In(g: GramSet) -> float:
    n = _check(g)
    p = pair_terms(g)
    return 2.0 * _upper_sum(p) / (n * (n - 1) * g.h**g.q)


def compute_vn2(g: GramSet) -> float:
    n = _check(g)
    p = pair_terms(g)
    return 4.0 * _upper_sum(p * p) / (n**2 * (n - 1) ** 2 * g.h ** (2 * g.q))


def compute_Tn(i_n: float, v_n2: float) -> float:
    if not v_n2 > 0:
        raise DegenerateStatisticError(
            "variance estimate is zero: no pair of observations interacts "
            "under the kernel; increase h"
        )
    return i_n / math.sqrt(v_n2)


def asymptotic_pvalue(t_n: float, alpha: float = 0.05) -> tuple[float, bool]:
    """One-sided standard normal p-value and the level-``alpha`` decision."""
    if not 0 < alpha < 1:
        raise InvalidInputError(f"alpha must lie in (0, 1), got {alpha}")
    return float(norm.sf(t_n)), bool(t_n >= norm.ppf(1.0 - alpha))


def statistic(g: GramSet) -> tuple[float, float, float]:
    """Return ``(I_n, v_n^2, T_n)``."""
    i_n = compute_In(g)
    v_n2 = compute_vn2(g)
    return i_n, v_n2, compute_Tn(i_n, v_n2)
