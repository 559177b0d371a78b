"""Gaussian path generators and the simulation designs used for level/power studies.

Covariates and noise are drawn from two independent child streams of one
seed, so changing the noise stream leaves the covariates untouched.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError
from .funcspace import Curve, FunctionalSample, Grid

__all__ = [
    "FAMILIES",
    "SCALAR_FAMILIES",
    "DgpSpec",
    "Dataset",
    "wiener_paths",
    "wiener_path",
    "brownian_motion",
    "brownian_bridges",
    "brownian_bridge",
    "slope_b",
    "eigfun_e",
    "eigval_lambda",
    "bump_beta",
    "hermite_h",
    "gen_scalar_quadratic",
    "gen_scalar_far",
    "gen_func_concurrent",
    "gen_func_quadratic",
    "gen_func_far",
    "streams",
    "generate",
]

SCALAR_FAMILIES = ("scalar-quadratic", "scalar-far")
FAMILIES = SCALAR_FAMILIES + ("func-concurrent", "func-quadratic", "func-far")


@dataclass(frozen=True)
class DgpSpec:
    """Parameters of one simulation design; ``delta = 0`` is the null."""

    family: str = "scalar-quadratic"
    delta: float = 0.0
    k: int = 1
    n: int = 40
    m: int = 101
    sigma2: float = 1.0 / 16.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidInputError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.delta < 0:
            raise InvalidInputError("delta must be nonnegative")
        if self.k < 1:
            raise InvalidInputError("k must be a positive integer")
        if self.n < 2:
            raise InvalidInputError("n must be at least 2")
        if self.sigma2 < 0:
            raise InvalidInputError("sigma2 must be nonnegative")

    @property
    def grid(self) -> Grid:
        return Grid(self.m)

    @property
    def scalar_response(self) -> bool:
        return self.family in SCALAR_FAMILIES

    def with_delta(self, delta: float) -> "DgpSpec":
        return replace(self, delta=delta)


class Dataset(NamedTuple):
    y: np.ndarray | FunctionalSample
    x: FunctionalSample
    noise: np.ndarray | FunctionalSample  # the true errors U_i


def wiener_paths(grid: Grid, rng: np.random.Generator, n: int) -> np.ndarray:
    """``n x m`` standard Wiener paths from exact Gaussian increments."""
    inc = rng.standard_normal((n, grid.m - 1)) * math.sqrt(grid.spacing)
    out = np.zeros((n, grid.m))
    np.cumsum(inc, axis=1, out=out[:, 1:])
    return out


def brownian_bridges(grid: Grid, rng: np.random.Generator, n: int) -> np.ndarray:
    w = wiener_paths(grid, rng, n)
    b = w - grid.points[None, :] * w[:, -1:]
    b[:, -1] = 0.0
    return b


def wiener_path(grid: Grid, rng: np.random.Generator) -> Curve:
    return Curve(grid, wiener_paths(grid, rng, 1)[0])


brownian_motion = wiener_path


def brownian_bridge(grid: Grid, rng: np.random.Generator) -> Curve:
    return Curve(grid, brownian_bridges(grid, rng, 1)[0])


def slope_b(t):
    return np.sin(2.0 * np.pi * np.asarray(t) ** 3) ** 3


def eigfun_e(t, k: int):
    """Karhunen-Loeve eigenfunctions of the Wiener process."""
    return math.sqrt(2.0) * np.sin((k - 0.5) * np.pi * np.asarray(t))


def eigval_lambda(k: int) -> float:
    return 1.0 / ((k - 0.5) ** 2 * math.pi**2)


def bump_beta(t):
    return np.exp(-4.0 * (np.asarray(t) - 0.3) ** 2)


def hermite_h(x):
    return np.asarray(x) ** 2 - 1.0


def _project(paths: np.ndarray, grid: Grid, f: np.ndarray) -> np.ndarray:
    return paths @ (grid.weights * f)


def gen_scalar_quadratic(spec: DgpSpec, x_rng, noise_rng) -> Dataset:
    """``Y = <X, b> + delta <X, b>^2 + U`` with X Wiener and ``b = sin^3(2 pi t^3)``."""
    grid = spec.grid
    x = wiener_paths(grid, x_rng, spec.n)
    u = noise_rng.standard_normal(spec.n) * math.sqrt(spec.sigma2)
    lin = _project(x, grid, slope_b(grid.points))
    y = lin + spec.delta * lin**2 + u
    return Dataset(y, FunctionalSample(grid, x), u)


def gen_scalar_far(spec: DgpSpec, x_rng, noise_rng) -> Dataset:
    """``Y = delta (<X, e_k>^2 / lambda_k - 1) + U`` with X Wiener."""
    grid = spec.grid
    x = wiener_paths(grid, x_rng, spec.n)
    u = noise_rng.standard_normal(spec.n) * math.sqrt(spec.sigma2)
    score = _project(x, grid, eigfun_e(grid.points, spec.k))
    y = spec.delta * (score**2 / eigval_lambda(spec.k) - 1.0) + u
    return Dataset(y, FunctionalSample(grid, x), u)


def gen_func_concurrent(spec: DgpSpec, x_rng, noise_rng) -> Dataset:
    """``Y(t) = delta beta(t) X(t) + eps(t)``; X and eps Brownian bridges."""
    grid = spec.grid
    x = brownian_bridges(grid, x_rng, spec.n)
    eps = brownian_bridges(grid, noise_rng, spec.n)
    y = spec.delta * bump_beta(grid.points)[None, :] * x + eps
    return Dataset(FunctionalSample(grid, y), FunctionalSample(grid, x), FunctionalSample(grid, eps))


def gen_func_quadratic(spec: DgpSpec, x_rng, noise_rng) -> Dataset:
    """``Y(t) = delta (B(t)^2 - 1) + eps(t)``; B Brownian motion, eps a bridge."""
    grid = spec.grid
    b = wiener_paths(grid, x_rng, spec.n)
    eps = brownian_bridges(grid, noise_rng, spec.n)
    y = spec.delta * hermite_h(b) + eps
    return Dataset(FunctionalSample(grid, y), FunctionalSample(grid, b), FunctionalSample(grid, eps))


def gen_func_far(spec: DgpSpec, x_rng, noise_rng) -> Dataset:
    """``Y(t) = delta <B, e_k> / sqrt(lambda_k) + eps(t)`` (drift constant in t)."""
    grid = spec.grid
    b = wiener_paths(grid, x_rng, spec.n)
    eps = brownian_bridges(grid, noise_rng, spec.n)
    score = _project(b, grid, eigfun_e(grid.points, spec.k)) / math.sqrt(eigval_lambda(spec.k))
    y = spec.delta * score[:, None] + eps
    return Dataset(FunctionalSample(grid, y), FunctionalSample(grid, b), FunctionalSample(grid, eps))


_GENERATORS = {
    "scalar-quadratic": gen_scalar_quadratic,
    "scalar-far": gen_scalar_far,
    "func-concurrent": gen_func_concurrent,
    "func-quadratic": gen_func_quadratic,
    "func-far": gen_func_far,
}


def streams(seed) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent (covariate, noise) generators derived from one seed."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    # explicit child keys: SeedSequence.spawn would advance a counter on ss
    x_ss, noise_ss = (
        np.random.SeedSequence(ss.entropy, spawn_key=ss.spawn_key + (i,)) for i in (0, 1)
    )
    return np.random.default_rng(x_ss), np.random.default_rng(noise_ss)


def generate(spec: DgpSpec, seed=None, noise_seed=None) -> Dataset:
    """Draw one dataset. ``noise_seed`` overrides only the noise stream."""
    x_rng, noise_rng = streams(seed)
    if noise_seed is not None:
        noise_rng = streams(noise_seed)[1]
    return _GENERATORS[spec.family](spec, x_rng, noise_rng)
