"""Monte Carlo level and power studies over the simulation designs.

Every replication draws its data and bootstrap multipliers from seeds
derived from ``(seed, delta index, replication)``, so the output does not
depend on how replications are spread over worker processes.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import DegenerateStatisticError, InvalidInputError
from .kernels import a_weights, default_k_trunc, phi_gram, raw_l2
from .kmsz import kmsz_statistic
from .procedure import bandwidth, build_grams, prepare_covariates
from .residuals import center_residuals, centering_maker, fpc_linear_residuals
from .simulate import DgpSpec, generate
from .bootstrap import wild_bootstrap
from .ustat import asymptotic_pvalue, statistic

__all__ = [
    "ExperimentConfig",
    "parse_config_text",
    "load_config",
    "run_replication",
    "run_power_study",
    "format_rows",
    "THREADS_ENV",
]

THREADS_ENV = "FUNCSIG_THREADS"
DEFAULT_C_GRID = tuple(2 ** (k / 2) for k in range(-2, 3))
METHODS = ("asymptotic", "bootstrap", "kmsz")


@dataclass(frozen=True)
class ExperimentConfig:
    family: str = "scalar-quadratic"
    k: int = 1
    n: int = 40
    m: int = 101
    sigma2: float = 1.0 / 16.0
    deltas: tuple = (0.0,)
    c_grid: tuple = DEFAULT_C_GRID
    n_boot: int = 199
    reps: int = 500
    alpha: float = 0.10
    kernel: str = "epanechnikov"
    phi: str = "l2"
    beta: float = 2.0
    epsilon: float = 0.5
    k_trunc: int | None = None
    q: int = 1
    n_components: int = 5
    methods: tuple = ("asymptotic", "bootstrap")
    kmsz_p: int = 1
    kmsz_q: int = 6
    true_errors: bool = False
    seed: int | None = None
    threads: int = 1
    timing: bool = False

    def __post_init__(self):
        if self.reps < 1:
            raise InvalidInputError("reps must be at least 1")
        if self.n_boot < 0:
            raise InvalidInputError("n_boot must be nonnegative")
        if not 0 < self.alpha < 1:
            raise InvalidInputError("alpha must lie in (0, 1)")
        if self.phi not in ("l2", "weighted"):
            raise InvalidInputError(f"phi must be 'l2' or 'weighted', got {self.phi!r}")
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise InvalidInputError(f"unknown methods {sorted(bad)}")
        if "bootstrap" in self.methods and self.n_boot < 1:
            raise InvalidInputError("bootstrap method needs n_boot >= 1")
        if self.threads < 1:
            raise InvalidInputError("threads must be at least 1")
        self.dgp(0.0)  # validates the design parameters

    def dgp(self, delta: float) -> DgpSpec:
        return DgpSpec(self.family, delta, self.k, self.n, self.m, self.sigma2)

    def config_hash(self) -> str:
        """Hash of everything that affects results (not threads or timing)."""
        d = asdict(self)
        d.pop("threads")
        d.pop("timing")
        blob = json.dumps(d, sort_keys=True, default=list)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


_TUPLE_FIELDS = {"deltas", "c_grid", "methods"}


def _convert(name: str, raw: str):
    ftype = {f.name: f.type for f in fields(ExperimentConfig)}[name]
    raw = raw.strip()
    if name in _TUPLE_FIELDS:
        items = [s.strip() for s in raw.split(",") if s.strip()]
        return tuple(items) if name == "methods" else tuple(float(s) for s in items)
    if ftype.startswith("bool"):
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise InvalidInputError(f"{name}: expected a boolean, got {raw!r}")
    if raw.lower() in ("none", ""):
        return None
    if ftype.startswith("int"):
        return int(raw)
    if ftype.startswith("float"):
        return float(raw)
    return raw


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse flat ``key = value`` lines (``#`` starts a comment)."""
    known = {f.name for f in fields(ExperimentConfig)}
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInputError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise InvalidInputError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _convert(key, value)
        except ValueError as exc:
            raise InvalidInputError(f"{source}:{lineno}: {exc}") from None
    return out


def load_config(path: str | None = None, **overrides) -> ExperimentConfig:
    values = {}
    if path is not None:
        with open(path) as fh:
            values.update(parse_config_text(fh.read(), path))
    values.update({k: v for k, v in overrides.items() if v is not None})
    if "threads" not in values and os.environ.get(THREADS_ENV):
        values["threads"] = int(os.environ[THREADS_ENV])
    return ExperimentConfig(**values)


def _phi_weights(cfg: ExperimentConfig):
    if cfg.phi == "l2":
        return raw_l2(), cfg.q
    kt = cfg.k_trunc if cfg.k_trunc is not None else default_k_trunc(cfg.n, cfg.m)
    return a_weights(cfg.beta, cfg.epsilon, kt), max(cfg.q, kt)


def run_replication(cfg: ExperimentConfig, delta_index: int, rep: int) -> dict:
    """Decisions of every (c, method) cell for one simulated dataset.

    Returns a mapping ``(c_index, method) -> 1 | 0 | None`` where ``None``
    marks a degenerate statistic (counted as no rejection).
    """
    root = np.random.SeedSequence([cfg.seed, delta_index, rep])
    data_ss = np.random.SeedSequence(root.entropy, spawn_key=root.spawn_key + (0,))
    spec = cfg.dgp(cfg.deltas[delta_index])
    data = generate(spec, data_ss)
    out = {}

    if "kmsz" in cfg.methods and not spec.scalar_response:
        res = kmsz_statistic(data.x, data.y, cfg.kmsz_p, cfg.kmsz_q)
        out[(None, "kmsz")] = int(res.reject(cfg.alpha))

    kernel_methods = [m for m in cfg.methods if m != "kmsz"]
    if not kernel_methods:
        return out
    weights, n_basis = _phi_weights(cfg)
    n_basis = max(n_basis, cfg.n_components if spec.scalar_response else 0)
    cov = prepare_covariates(data.x, cfg.q, n_basis=n_basis)
    if cfg.true_errors:
        u, maker = data.noise, None
    elif spec.scalar_response:
        fit = fpc_linear_residuals(data.y, data.x, cfg.n_components, basis=cov.basis)
        u, maker = fit.residuals, fit.residual_maker
    else:
        u, maker = center_residuals(data.y), centering_maker(spec.n)
    phi = phi_gram(cov.w, weights, cov.basis)
    u_vec = None if hasattr(u, "grid") else u

    for ci, c in enumerate(cfg.c_grid):
        h = bandwidth(cfg.n, c, cfg.q)
        grams = build_grams(u, cov.z, cov.w, h, cfg.kernel, phi=phi)
        try:
            _, _, t_n = statistic(grams)
        except DegenerateStatisticError:
            for m in kernel_methods:
                out[(ci, m)] = None
            continue
        if "asymptotic" in kernel_methods:
            out[(ci, "asymptotic")] = int(asymptotic_pvalue(t_n, cfg.alpha)[1])
        if "bootstrap" in kernel_methods:
            boot_ss = np.random.SeedSequence(root.entropy, spawn_key=root.spawn_key + (1, ci))
            try:
                boot = wild_bootstrap(
                    grams, t_n, cfg.n_boot, cfg.alpha, np.random.default_rng(boot_ss),
                    residual_maker=maker, u=u_vec,
                )
                out[(ci, "bootstrap")] = int(t_n >= boot.crit)
            except DegenerateStatisticError:
                out[(ci, "bootstrap")] = None
    return out


def _run_chunk(args):
    cfg, tasks = args
    return [run_replication(cfg, d, r) for d, r in tasks]


def _cells(cfg: ExperimentConfig):
    for di, delta in enumerate(cfg.deltas):
        if "kmsz" in cfg.methods and not cfg.dgp(delta).scalar_response:
            yield di, None, "kmsz"
        for ci in range(len(cfg.c_grid)):
            for m in cfg.methods:
                if m != "kmsz":
                    yield di, ci, m


def run_power_study(cfg: ExperimentConfig) -> list[dict]:
    """Rejection rates for every (delta, c, method) cell.

    Replications run in ``cfg.threads`` worker processes; results are
    gathered in replication order, so rows are identical for any thread
    count.
    """
    if cfg.seed is None:
        raise InvalidInputError("a seed is required for studies")
    tasks = [(d, r) for d in range(len(cfg.deltas)) for r in range(cfg.reps)]
    started = time.perf_counter()
    if cfg.threads == 1:
        results = [run_replication(cfg, d, r) for d, r in tasks]
    else:
        size = math.ceil(len(tasks) / (4 * cfg.threads))
        chunks = [(cfg, tasks[i : i + size]) for i in range(0, len(tasks), size)]
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            results = [r for chunk in pool.map(_run_chunk, chunks) for r in chunk]
    elapsed = time.perf_counter() - started

    by_delta = {}
    for (d, _), res in zip(tasks, results):
        by_delta.setdefault(d, []).append(res)
    chash = cfg.config_hash()
    rows = []
    for di, ci, method in _cells(cfg):
        decisions = [res.get((ci, method)) for res in by_delta[di]]
        degenerate = sum(v is None for v in decisions)
        rejections = sum(v for v in decisions if v is not None)
        rate = rejections / cfg.reps
        row = {
            "family": cfg.family,
            "k": cfg.k,
            "n": cfg.n,
            "delta": cfg.deltas[di],
            "c": "" if ci is None else cfg.c_grid[ci],
            "h": "" if ci is None else bandwidth(cfg.n, cfg.c_grid[ci], cfg.q),
            "q": cfg.q,
            "phi": "" if ci is None else cfg.phi,
            "method": method,
            "reps": cfg.reps,
            "rejections": rejections,
            "rate": rate,
            "stderr": math.sqrt(rate * (1.0 - rate) / cfg.reps),
            "degenerate": degenerate,
            "seed": cfg.seed,
            "config_hash": chash,
        }
        if cfg.timing:
            row["runtime_s"] = round(elapsed, 3)
        rows.append(row)
    return rows


def format_rows(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()
