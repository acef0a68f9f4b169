"""Canonical in-memory form of a MILP instance.

An instance is

    min/max  c'x
    s.t.     A x  {<=, >=, =}  b        (row-wise senses)
             l <= x <= u
             x_j integral for integer/binary columns

with A stored as canonical COO triplets: duplicate entries summed,
explicit zeros dropped, sorted by (row, col). Two instances compare
equal when every numeric field matches exactly; names never take part
in equality.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import InvalidConfig

SENSE_LE = "<="
SENSE_GE = ">="
SENSE_EQ = "="
SENSES = (SENSE_LE, SENSE_GE, SENSE_EQ)

CONTINUOUS = "continuous"
INTEGER = "integer"
BINARY = "binary"
DOMAINS = (CONTINUOUS, INTEGER, BINARY)


@dataclass(eq=False)
class MilpInstance:
    name: str
    minimize: bool
    objective: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    senses: List[str]
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    integrality: List[str]
    var_names: Optional[List[str]] = None
    row_names: Optional[List[str]] = None

    @property
    def num_rows(self):
        return len(self.rhs)

    @property
    def num_cols(self):
        return len(self.objective)

    @property
    def nnz(self):
        return len(self.vals)

    def __eq__(self, other):
        if not isinstance(other, MilpInstance):
            return NotImplemented
        return (
            self.minimize == other.minimize
            and self.num_rows == other.num_rows
            and self.num_cols == other.num_cols
            and np.array_equal(self.objective, other.objective)
            and np.array_equal(self.rows, other.rows)
            and np.array_equal(self.cols, other.cols)
            and np.array_equal(self.vals, other.vals)
            and list(self.senses) == list(other.senses)
            and np.array_equal(self.rhs, other.rhs)
            and np.array_equal(self.lower, other.lower)
            and np.array_equal(self.upper, other.upper)
            and list(self.integrality) == list(other.integrality)
        )

    def __hash__(self):
        return hash((self.num_rows, self.num_cols, self.nnz))


@dataclass
class InstanceStats:
    num_rows: int
    num_cols: int
    nnz: int
    num_continuous: int
    num_integer: int
    num_binary: int
    num_le: int
    num_ge: int
    num_eq: int


def make_instance(
    name,
    minimize,
    objective,
    rows,
    cols,
    vals,
    senses,
    rhs,
    lower,
    upper,
    integrality,
    var_names=None,
    row_names=None,
):
    """Build a validated instance in canonical form.

    Duplicate matrix entries are summed, zeros dropped, triplets sorted
    row-major. Raises InvalidConfig on inconsistent shapes or values.
    """
    objective = np.asarray(objective, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    lower = np.asarray(lower, dtype=np.float64)
    upper = np.asarray(upper, dtype=np.float64)
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    vals = np.asarray(vals, dtype=np.float64)
    senses = list(senses)
    integrality = list(integrality)

    n = objective.shape[0] if objective.ndim == 1 else -1
    m = rhs.shape[0] if rhs.ndim == 1 else -1
    if n < 0 or m < 0:
        raise InvalidConfig("objective and rhs must be one-dimensional")
    if len(senses) != m:
        raise InvalidConfig(f"{len(senses)} senses for {m} rows")
    if lower.shape != (n,) or upper.shape != (n,):
        raise InvalidConfig("bound arrays must match the variable count")
    if len(integrality) != n:
        raise InvalidConfig(f"{len(integrality)} domains for {n} variables")
    if not (rows.shape == cols.shape == vals.shape):
        raise InvalidConfig("matrix triplet arrays must share one shape")

    rows, cols, vals = _canonical_triplets(rows, cols, vals, m, n)

    for s in senses:
        if s not in SENSES:
            raise InvalidConfig(f"unknown row sense {s!r}")
    for d in integrality:
        if d not in DOMAINS:
            raise InvalidConfig(f"unknown variable domain {d!r}")
    if not np.all(np.isfinite(objective)):
        raise InvalidConfig("objective coefficients must be finite")
    if not np.all(np.isfinite(rhs)):
        raise InvalidConfig("right-hand sides must be finite")
    if np.any(np.isnan(lower)) or np.any(np.isnan(upper)):
        raise InvalidConfig("bounds must not be NaN")
    if np.any(lower > upper):
        j = int(np.argmax(lower > upper))
        raise InvalidConfig(f"variable {j} has lower bound above upper bound")
    for j, d in enumerate(integrality):
        if d == BINARY and (lower[j] < 0.0 or upper[j] > 1.0):
            raise InvalidConfig(f"binary variable {j} has bounds outside [0, 1]")
    if var_names is not None and len(var_names) != n:
        raise InvalidConfig("variable name count mismatch")
    if row_names is not None and len(row_names) != m:
        raise InvalidConfig("row name count mismatch")

    return MilpInstance(
        name=str(name),
        minimize=bool(minimize),
        objective=objective,
        rows=rows,
        cols=cols,
        vals=vals,
        senses=senses,
        rhs=rhs,
        lower=lower,
        upper=upper,
        integrality=integrality,
        var_names=list(var_names) if var_names is not None else None,
        row_names=list(row_names) if row_names is not None else None,
    )


def _canonical_triplets(rows, cols, vals, m, n):
    if len(rows) == 0:
        return (
            np.zeros(0, dtype=np.int64),
            np.zeros(0, dtype=np.int64),
            np.zeros(0, dtype=np.float64),
        )
    if rows.min() < 0 or rows.max() >= m:
        raise InvalidConfig("matrix row index out of range")
    if cols.min() < 0 or cols.max() >= n:
        raise InvalidConfig("matrix column index out of range")
    if not np.all(np.isfinite(vals)):
        raise InvalidConfig("matrix coefficients must be finite")

    order = np.lexsort((cols, rows))
    rows, cols, vals = rows[order], cols[order], vals[order]
    # Sum duplicates: group boundaries where (row, col) changes.
    if len(rows) > 1:
        new_group = np.empty(len(rows), dtype=bool)
        new_group[0] = True
        new_group[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
        group_ids = np.cumsum(new_group) - 1
        summed = np.zeros(group_ids[-1] + 1, dtype=np.float64)
        np.add.at(summed, group_ids, vals)
        rows = rows[new_group]
        cols = cols[new_group]
        vals = summed
    keep = vals != 0.0
    return rows[keep], cols[keep], vals[keep]


def instance_stats(inst):
    """Size and composition counts for one instance."""
    domains = list(inst.integrality)
    senses = list(inst.senses)
    return InstanceStats(
        num_rows=inst.num_rows,
        num_cols=inst.num_cols,
        nnz=inst.nnz,
        num_continuous=domains.count(CONTINUOUS),
        num_integer=domains.count(INTEGER),
        num_binary=domains.count(BINARY),
        num_le=senses.count(SENSE_LE),
        num_ge=senses.count(SENSE_GE),
        num_eq=senses.count(SENSE_EQ),
    )
