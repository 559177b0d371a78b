"""CSV reading and writing for curves, scalars and FPC output.

Curve files are wide: ``id[,g],t_1,...,t_m`` with one curve per row, values
on a uniform grid over [0, 1]. Scalar files are ``id[,g],y`` (or several
value columns, e.g. ``id,z1,z2``). The optional ``g`` column holds group
labels. Floats are written with ``repr`` so files re-load bit-identically.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .basis import EigenSystem
from .errors import InvalidInputError
from .funcspace import FunctionalSample, Grid

__all__ = [
    "Table",
    "read_table",
    "load_curves",
    "load_scalars",
    "write_table",
    "write_curves",
    "write_scalars",
    "write_eigensystem",
    "write_json",
]


@dataclass
class Table:
    columns: list[str]  # value column names
    ids: list[str]
    groups: np.ndarray | None
    values: np.ndarray  # n x p


def read_table(path) -> Table:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InvalidInputError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "id":
        raise InvalidInputError(f"{path}:1: header must start with 'id'")
    has_group = len(header) > 1 and header[1] == "g"
    first = 2 if has_group else 1
    columns = header[first:]
    if not columns:
        raise InvalidInputError(f"{path}:1: no value columns")
    ids, groups, values = [], [], []
    for lineno, row in enumerate(rows[1:], 2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise InvalidInputError(
                f"{path}:{lineno}: expected {len(header)} fields, found {len(row)}"
            )
        ids.append(row[0].strip())
        if has_group:
            groups.append(row[1].strip())
        try:
            vals = [float(c) for c in row[first:]]
        except ValueError as exc:
            raise InvalidInputError(f"{path}:{lineno}: {exc}") from None
        if not all(np.isfinite(vals)):
            raise InvalidInputError(f"{path}:{lineno}: non-finite value")
        values.append(vals)
    if not values:
        raise InvalidInputError(f"{path}: no data rows")
    return Table(columns, ids, np.array(groups) if has_group else None, np.array(values))


def load_curves(path) -> tuple[FunctionalSample, Table]:
    table = read_table(path)
    if table.values.shape[1] < 2:
        raise InvalidInputError(f"{path}: curves need at least two grid columns")
    return FunctionalSample(Grid(table.values.shape[1]), table.values), table


def load_scalars(path) -> tuple[np.ndarray, Table]:
    """Vector for one value column, ``n x p`` matrix for several."""
    table = read_table(path)
    vals = table.values[:, 0] if table.values.shape[1] == 1 else table.values
    return vals, table


def _fmt(x) -> str:
    return repr(float(x))


def write_table(path, columns, values, ids=None, groups=None) -> None:
    values = np.atleast_2d(np.asarray(values, dtype=float))
    n = values.shape[0]
    ids = [str(i + 1) for i in range(n)] if ids is None else [str(i) for i in ids]
    header = ["id"] + (["g"] if groups is not None else []) + list(columns)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i in range(n):
            lead = [ids[i]] + ([str(groups[i])] if groups is not None else [])
            writer.writerow(lead + [_fmt(v) for v in values[i]])


def write_curves(path, sample: FunctionalSample, ids=None, groups=None) -> None:
    cols = [f"t_{r + 1}" for r in range(sample.grid.m)]
    write_table(path, cols, sample.data, ids, groups)


def write_scalars(path, values, name: str = "y", ids=None, groups=None) -> None:
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        write_table(path, [name], values[:, None], ids, groups)
    else:
        cols = [f"{name}{j + 1}" for j in range(values.shape[1])]
        write_table(path, cols, values, ids, groups)


def write_eigensystem(prefix, basis: EigenSystem) -> tuple[str, str]:
    """Write ``PREFIX_eigenvalues.csv`` and ``PREFIX_eigenfunctions.csv``."""
    val_path = f"{prefix}_eigenvalues.csv"
    fun_path = f"{prefix}_eigenfunctions.csv"
    write_table(val_path, ["eigenvalue"], basis.eigenvalues[:, None],
                ids=[str(k + 1) for k in range(basis.k)])
    cols = [f"t_{r + 1}" for r in range(basis.grid.m)]
    write_table(fun_path, cols, basis.functions.reshape(basis.k, basis.grid.m),
                ids=[f"phi_{k + 1}" for k in range(basis.k)])
    return val_path, fun_path


def write_json(path, record: dict) -> None:
    text = json.dumps(record, sort_keys=True, indent=2)
    if path is None or path == "-":
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")
