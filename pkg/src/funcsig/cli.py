"""Command-line interface: ``funcsig {test,power-study,fpc,simulate,baseline}``."""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import io
from .basis import fpca
from .errors import DegenerateStatisticError, InvalidInputError, NumericError
from .funcspace import FunctionalSample, Grid
from .kernels import a_weights, default_k_trunc, raw_l2
from .kmsz import kmsz_statistic
from .procedure import bandwidth, build_grams, prepare_covariates, significance_test
from .residuals import (
    GroupedFunctionalSample,
    ancova_maker,
    ancova_residuals,
    anova_residuals,
    center_residuals,
    centering_maker,
    fpc_linear_residuals,
    indicator_residuals,
    loo_maker,
    select_ancova_k,
)
from .simulate import FAMILIES, DgpSpec, generate
from .study import THREADS_ENV, format_rows, load_config, run_power_study

MODELS = ("raw", "no-effect", "loo-mean", "anova", "ancova", "fpc-linear", "indicator")


def _floats(text: str) -> tuple:
    return tuple(float(s) for s in text.split(",") if s.strip())


def _add_kernel_opts(p):
    p.add_argument("--kernel", default="epanechnikov", choices=["epanechnikov", "gaussian", "triangle"])
    p.add_argument("--phi", default="l2", choices=["l2", "weighted"])
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--k-trunc", type=int, default=None)
    p.add_argument("--q", type=int, default=1, help="number of FPC scores smoothed by the kernel")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="funcsig", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run the significance test on data files")
    p.add_argument("--y", required=True, help="response CSV (curves or id,y scalars)")
    p.add_argument("--x", help="functional covariate CSV; Z and W are its FPC split")
    p.add_argument("--z", help="CSV of smoothing variables id,z1..zq (instead of --x)")
    p.add_argument("--w", help="CSV of remainder curves used with --z")
    p.add_argument("--model", default="raw", choices=MODELS)
    p.add_argument("--components", type=int, default=None,
                   help="FPC components for fpc-linear (default 5) or ancova (default 13)")
    p.add_argument("--select-k", default=None,
                   help="comma list of ancova K values; the one with least residual energy is used")
    p.add_argument("--indicator-m", type=int, default=101, help="grid size for indicator residuals")
    p.add_argument("--h", type=float, default=None, help="bandwidth (default c n^(-1/(q+4)))")
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--no-standardize", action="store_true")
    _add_kernel_opts(p)
    p.add_argument("--bootstrap", type=int, default=0, metavar="B")
    p.add_argument("--alpha", type=float, default=0.10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-", help="JSON output path ('-' for stdout)")
    p.add_argument("--dump-grams", default=None, metavar="DIR")

    p = sub.add_parser("power-study", help="Monte Carlo rejection rates")
    p.add_argument("--config", default=None, help="flat key = value file; flags override it")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--deltas", type=_floats)
    p.add_argument("--c-grid", type=_floats)
    p.add_argument("--reps", type=int)
    p.add_argument("--bootstrap", dest="n_boot", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--kernel")
    p.add_argument("--phi")
    p.add_argument("--q", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--methods", type=lambda s: tuple(x.strip() for x in s.split(",") if x.strip()))
    p.add_argument("--true-errors", action="store_true", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None, help=f"worker processes (env {THREADS_ENV})")
    p.add_argument("--timing", action="store_true", default=None)
    p.add_argument("--out", default="-")

    p = sub.add_parser("fpc", help="eigenvalues and eigenfunctions of a curve sample")
    p.add_argument("--data", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--out-prefix", required=True)

    p = sub.add_parser("simulate", help="write one simulated dataset")
    p.add_argument("--family", default="scalar-quadratic", choices=FAMILIES)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--n", type=int, default=40)
    p.add_argument("--m", type=int, default=101)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--sigma2", type=float, default=1.0 / 16.0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-prefix", required=True)

    p = sub.add_parser("baseline", help="competitor tests")
    bsub = p.add_subparsers(dest="baseline", required=True)
    b = bsub.add_parser("kmsz", help="chi-square test of no linear effect")
    b.add_argument("--x", required=True)
    b.add_argument("--y", required=True)
    b.add_argument("--p", type=int, default=1)
    b.add_argument("--q", type=int, default=6)
    b.add_argument("--alpha", type=float, default=0.10)
    b.add_argument("--out", default="-")
    return parser


def _response(path):
    table = io.read_table(path)
    if table.values.shape[1] == 1:
        return table.values[:, 0], table
    return FunctionalSample(Grid(table.values.shape[1]), table.values), table


def _residuals(args, y, y_table, x, x_table):
    """Residuals and the linear map producing them (None for raw input)."""
    model = args.model
    if model == "raw":
        return y, None, {}
    if model == "no-effect":
        return center_residuals(y), centering_maker(len(y)), {}
    if model == "indicator":
        if isinstance(y, FunctionalSample):
            raise InvalidInputError("indicator model needs a scalar response")
        return indicator_residuals(y, Grid(args.indicator_m)), centering_maker(len(y)), {}
    if model == "fpc-linear":
        if x is None or isinstance(y, FunctionalSample):
            raise InvalidInputError("fpc-linear needs a scalar --y and a functional --x")
        fit = fpc_linear_residuals(y, x, args.components or 5)
        return fit.residuals, fit.residual_maker, {"intercept": fit.intercept}
    if not isinstance(y, FunctionalSample):
        raise InvalidInputError(f"model {model} needs functional responses")
    labels = y_table.groups
    if model == "loo-mean":
        ys = GroupedFunctionalSample(y, np.zeros(y.n, dtype=int))
        return anova_residuals(ys, "overall"), loo_maker(n=y.n), {}
    if labels is None:
        raise InvalidInputError(f"model {model} needs a 'g' column in the response file")
    ys = GroupedFunctionalSample(y, labels)
    if model == "anova":
        return anova_residuals(ys, "group"), loo_maker(labels), {}
    if x is None:
        raise InvalidInputError("ancova needs --x")
    xs = GroupedFunctionalSample(x, labels)
    k = args.components or 13
    if args.select_k:
        k = select_ancova_k(ys, xs, [int(v) for v in args.select_k.split(",")])
    return ancova_residuals(ys, xs, k), ancova_maker(ys, xs, k), {"ancova_k": k}


def cmd_test(args) -> dict:
    y, y_table = _response(args.y)
    x = x_table = None
    if args.x:
        x, x_table = io.load_curves(args.x)
        if x.n != len(y):
            raise InvalidInputError("--x and --y have different numbers of rows")
    u, maker, extra = _residuals(args, y, y_table, x, x_table)
    n = len(y)

    weights, basis = raw_l2(), None
    if args.z:
        z, _ = io.load_scalars(args.z)
        w = io.load_curves(args.w)[0] if args.w else None
        q = 1 if np.ndim(z) == 1 else z.shape[1]
        if args.phi == "weighted":
            raise InvalidInputError("--phi weighted needs --x (FPC basis)")
    elif x is not None:
        q = args.q
        n_basis = q
        if args.phi == "weighted":
            kt = args.k_trunc or default_k_trunc(n, x.grid.m)
            weights = a_weights(args.beta, args.epsilon, kt)
            n_basis = max(q, kt)
        cov = prepare_covariates(x, q, standardize=not args.no_standardize, n_basis=n_basis)
        z, w, basis = cov.z, cov.w, cov.basis
    else:
        raise InvalidInputError("need --x, or --z for the smoothing variables")

    h = args.h if args.h is not None else bandwidth(n, args.c, q)
    result = significance_test(
        u, z, w, h, args.kernel, weights, basis, alpha=args.alpha,
        n_boot=args.bootstrap, seed=args.seed, residual_maker=maker,
    )
    result.extra.update({"model": args.model, **extra})
    if args.dump_grams:
        os.makedirs(args.dump_grams, exist_ok=True)
        g = build_grams(u, z, w, h, args.kernel, weights, basis)
        for name in ("u_gram", "k_gram", "phi_gram"):
            np.savetxt(os.path.join(args.dump_grams, f"{name}.csv"), getattr(g, name),
                       delimiter=",", fmt="%.17g")
    return result.to_record()


def cmd_power_study(args) -> str:
    overrides = {
        k: getattr(args, k)
        for k in ("family", "deltas", "c_grid", "reps", "n_boot", "alpha", "kernel", "phi",
                  "q", "n", "m", "k", "methods", "true_errors", "seed", "threads", "timing")
    }
    cfg = load_config(args.config, **overrides)
    if cfg.seed is None:
        raise InvalidInputError("power-study requires --seed (or seed = ... in the config)")
    return format_rows(run_power_study(cfg))


def cmd_fpc(args) -> tuple[str, str]:
    x, _ = io.load_curves(args.data)
    return io.write_eigensystem(args.out_prefix, fpca(x, args.k))


def cmd_simulate(args) -> tuple[str, str]:
    spec = DgpSpec(args.family, args.delta, args.k, args.n, args.m, args.sigma2)
    data = generate(spec, args.seed)
    y_path, x_path = f"{args.out_prefix}_y.csv", f"{args.out_prefix}_x.csv"
    if spec.scalar_response:
        io.write_scalars(y_path, data.y)
    else:
        io.write_curves(y_path, data.y)
    io.write_curves(x_path, data.x)
    return y_path, x_path


def cmd_kmsz(args) -> dict:
    x, _ = io.load_curves(args.x)
    y, _ = io.load_curves(args.y)
    res = kmsz_statistic(x, y, args.p, args.q)
    return {"statistic": res.statistic, "df": res.df, "p_value": res.p_value,
            "reject": res.reject(args.alpha), "alpha": args.alpha}


def _emit(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "test":
            io.write_json(args.out, cmd_test(args))
        elif args.command == "power-study":
            _emit(cmd_power_study(args), args.out)
        elif args.command == "fpc":
            for path in cmd_fpc(args):
                print(path)
        elif args.command == "simulate":
            for path in cmd_simulate(args):
                print(path)
        elif args.command == "baseline":
            io.write_json(args.out, cmd_kmsz(args))
    except DegenerateStatisticError as exc:
        print(f"funcsig: degenerate statistic: {exc}", file=sys.stderr)
        return 3
    except (InvalidInputError, NumericError, OSError) as exc:
        print(f"funcsig: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
