"""Discretized L2[0, 1]: uniform grids, curves and samples of curves.

Every curve lives on a uniform grid ``t_r = (r - 1) / (m - 1)`` and inner
products use the composite trapezoid rule on that grid.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "Grid",
    "Curve",
    "FunctionalSample",
    "inner_product",
    "l2_norm_sq",
    "mean_curve",
    "center_sample",
    "sample_inner",
    "pairwise_sq_dist",
]


@dataclass(frozen=True)
class Grid:
    """Uniform grid of ``m`` points spanning [0, 1]."""

    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise InvalidInputError(f"grid needs at least 2 points, got m={self.m}")

    @cached_property
    def points(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.m)

    @property
    def spacing(self) -> float:
        return 1.0 / (self.m - 1)

    @cached_property
    def weights(self) -> np.ndarray:
        """Trapezoid quadrature weights; they sum to one."""
        w = np.full(self.m, self.spacing)
        w[0] = w[-1] = 0.5 * self.spacing
        return w

    def curve(self, values) -> "Curve":
        return Curve(self, values)

    def evaluate(self, func) -> "Curve":
        """Sample ``func`` (vectorized callable of t) on the grid."""
        return Curve(self, func(self.points))


@dataclass(frozen=True, eq=False)
class Curve:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.m,):
            raise InvalidInputError(
                f"curve has shape {values.shape}, grid expects ({self.grid.m},)"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("curve values must be finite")
        object.__setattr__(self, "values", values)

    def __add__(self, other: "Curve") -> "Curve":
        _check_grid(self.grid, other.grid)
        return Curve(self.grid, self.values + other.values)

    def __sub__(self, other: "Curve") -> "Curve":
        _check_grid(self.grid, other.grid)
        return Curve(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> "Curve":
        return Curve(self.grid, self.values * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class FunctionalSample:
    """``n`` curves on a common grid, stored row-wise in an ``n x m`` array."""

    grid: Grid
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2 or data.shape[1] != self.grid.m:
            raise InvalidInputError(
                f"sample has shape {data.shape}, grid expects (n, {self.grid.m})"
            )
        if data.shape[0] < 1:
            raise InvalidInputError("sample is empty")
        if not np.all(np.isfinite(data)):
            raise InvalidInputError("sample values must be finite")
        object.__setattr__(self, "data", data)

    @classmethod
    def from_array(cls, data) -> "FunctionalSample":
        data = np.asarray(data, dtype=float)
        if data.ndim != 2:
            raise InvalidInputError("expected a 2-d array of curves")
        return cls(Grid(data.shape[1]), data)

    @classmethod
    def from_curves(cls, curves) -> "FunctionalSample":
        curves = list(curves)
        if not curves:
            raise InvalidInputError("sample is empty")
        grid = curves[0].grid
        for c in curves[1:]:
            _check_grid(grid, c.grid)
        return cls(grid, np.vstack([c.values for c in curves]))

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> Curve:
        return Curve(self.grid, self.data[i])

    def __iter__(self):
        for row in self.data:
            yield Curve(self.grid, row)

    def with_data(self, data) -> "FunctionalSample":
        return FunctionalSample(self.grid, data)


def _check_grid(a: Grid, b: Grid) -> None:
    if a != b:
        raise InvalidInputError(f"grid mismatch: m={a.m} vs m={b.m}")


def inner_product(f: Curve, g: Curve) -> float:
    """Trapezoid approximation of the L2 inner product of two curves."""
    _check_grid(f.grid, g.grid)
    # f*g is computed elementwise so the result is exactly symmetric
    return float(np.dot(f.grid.weights, f.values * g.values))


def l2_norm_sq(f: Curve) -> float:
    return inner_product(f, f)


def mean_curve(s: FunctionalSample) -> Curve:
    return Curve(s.grid, s.data.mean(axis=0))


def center_sample(s: FunctionalSample) -> FunctionalSample:
    return s.with_data(s.data - s.data.mean(axis=0))


def sample_inner(a: FunctionalSample, b: FunctionalSample | None = None) -> np.ndarray:
    """Matrix of inner products ``<a_i, b_j>``; ``b`` defaults to ``a``.

    When ``b`` is omitted the result is symmetrized so that entry (i, j)
    equals entry (j, i) bit for bit.
    """
    if b is None:
        g = (a.data * a.grid.weights) @ a.data.T
        return 0.5 * (g + g.T)
    _check_grid(a.grid, b.grid)
    return (a.data * a.grid.weights) @ b.data.T


def pairwise_sq_dist(s: FunctionalSample, block: int = 256) -> np.ndarray:
    """Squared L2 distances ``||s_i - s_j||^2`` from explicit differences.

    Differencing first (rather than expanding the square) keeps the result
    nonnegative, exactly symmetric and exactly zero on the diagonal.
    """
    x, w = s.data, s.grid.weights
    n = x.shape[0]
    out = np.empty((n, n))
    for start in range(0, n, block):
        stop = min(start + block, n)
        diff = x[start:stop, None, :] - x[None, :, :]
        out[start:stop] = (diff * diff) @ w
    return 0.5 * (out + out.T)
