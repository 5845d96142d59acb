from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

INF = math.inf
SENSES = ("L", "E", "G")


class LPValidationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """Sparse LP in triplet form.

    minimize (or maximize) c.x + obj_offset
    subject to  A x  {<=, =, >=}  rhs,   lb <= x <= ub
    """

    col_names: tuple[str, ...]
    row_names: tuple[str, ...]
    c: np.ndarray
    a_rows: np.ndarray
    a_cols: np.ndarray
    a_vals: np.ndarray
    row_sense: tuple[str, ...]
    rhs: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    obj_offset: float = 0.0
    maximize: bool = False
    name: str = "lp"

    def __post_init__(self):
        n, m = len(self.col_names), len(self.row_names)
        problems = []
        if len(set(self.col_names)) != n:
            problems.append("duplicate column names")
        if len(set(self.row_names)) != m:
            problems.append("duplicate row names")
        for label, arr, size in (("c", self.c, n), ("lb", self.lb, n), ("ub", self.ub, n), ("rhs", self.rhs, m)):
            if np.shape(arr) != (size,):
                problems.append(f"{label} has shape {np.shape(arr)}, expected ({size},)")
        if not (len(self.a_rows) == len(self.a_cols) == len(self.a_vals)):
            problems.append("triplet arrays differ in length")
        if len(self.row_sense) != m or any(s not in SENSES for s in self.row_sense):
            problems.append("row senses must be one of L/E/G per row")
        if problems:
            raise LPValidationError("; ".join(problems))
        if len(self.a_rows):
            if self.a_rows.min() < 0 or self.a_rows.max() >= m:
                problems.append("row index out of range")
            if self.a_cols.min() < 0 or self.a_cols.max() >= n:
                problems.append("column index out of range")
        if not np.all(np.isfinite(self.c)) or not math.isfinite(self.obj_offset):
            problems.append("non-finite objective coefficient")
        if not np.all(np.isfinite(self.a_vals)):
            problems.append("non-finite matrix coefficient")
        if not np.all(np.isfinite(self.rhs)):
            problems.append("non-finite right-hand side")
        if np.isnan(self.lb).any() or np.isnan(self.ub).any():
            problems.append("NaN bound")
        if np.any(self.lb == INF) or np.any(self.ub == -INF):
            problems.append("lower bound +inf or upper bound -inf")
        if problems:
            raise LPValidationError("; ".join(problems))

    @property
    def n_cols(self) -> int:
        return len(self.col_names)

    @property
    def n_rows(self) -> int:
        return len(self.row_names)

    def matrix(self) -> sp.csr_matrix:
        A = sp.coo_matrix(
            (self.a_vals, (self.a_rows, self.a_cols)), shape=(self.n_rows, self.n_cols)
        ).tocsr()
        A.sum_duplicates()
        return A

    def col_index(self) -> dict[str, int]:
        return {n: j for j, n in enumerate(self.col_names)}

    def row_index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.row_names)}

    def objective(self, x: np.ndarray) -> float:
        return float(self.c @ x + self.obj_offset)

    def same_as(self, other: "LinearProgram") -> bool:
        if (self.col_names, self.row_names, self.row_sense, self.maximize) != (
            other.col_names, other.row_names, other.row_sense, other.maximize,
        ):
            return False
        if (self.matrix() != other.matrix()).nnz:
            return False
        return all(
            np.array_equal(a, b)
            for a, b in ((self.c, other.c), (self.rhs, other.rhs), (self.lb, other.lb), (self.ub, other.ub))
        ) and self.obj_offset == other.obj_offset

    def scaled_objective(self, factor: float) -> "LinearProgram":
        return LinearProgram(
            self.col_names, self.row_names, self.c * factor, self.a_rows, self.a_cols,
            self.a_vals, self.row_sense, self.rhs, self.lb, self.ub,
            self.obj_offset * factor, self.maximize, self.name,
        )


class LPBuilder:
    """Incremental construction with stable names in insertion order."""

    def __init__(self, name: str = "lp"):
        self.name = name
        self._cols: list[str] = []
        self._col_idx: dict[str, int] = {}
        self._c: list[float] = []
        self._lb: list[float] = []
        self._ub: list[float] = []
        self._rows: list[str] = []
        self._sense: list[str] = []
        self._rhs: list[float] = []
        self._ti: list[int] = []
        self._tj: list[int] = []
        self._tv: list[float] = []
        self.obj_offset = 0.0

    def add_var(self, name: str, lb: float = 0.0, ub: float = INF, cost: float = 0.0) -> int:
        if name in self._col_idx:
            raise LPValidationError(f"duplicate column {name}")
        j = len(self._cols)
        self._cols.append(name)
        self._col_idx[name] = j
        self._c.append(float(cost))
        self._lb.append(float(lb))
        self._ub.append(float(ub))
        return j

    def add_cost(self, j: int, cost: float) -> None:
        self._c[j] += cost

    def add_row(self, name: str, coeffs: Iterable[tuple[int, float]], sense: str, rhs: float) -> int:
        i = len(self._rows)
        self._rows.append(name)
        self._sense.append(sense)
        self._rhs.append(float(rhs))
        for j, v in coeffs:
            if v != 0:
                self._ti.append(i)
                self._tj.append(j)
                self._tv.append(float(v))
        return i

    def col(self, name: str) -> int:
        return self._col_idx[name]

    def has_col(self, name: str) -> bool:
        return name in self._col_idx

    @property
    def n_cols(self) -> int:
        return len(self._cols)

    @property
    def n_rows(self) -> int:
        return len(self._rows)

    def build(self, maximize: bool = False) -> LinearProgram:
        return LinearProgram(
            col_names=tuple(self._cols),
            row_names=tuple(self._rows),
            c=np.array(self._c, dtype=float),
            a_rows=np.array(self._ti, dtype=np.int64),
            a_cols=np.array(self._tj, dtype=np.int64),
            a_vals=np.array(self._tv, dtype=float),
            row_sense=tuple(self._sense),
            rhs=np.array(self._rhs, dtype=float),
            lb=np.array(self._lb, dtype=float),
            ub=np.array(self._ub, dtype=float),
            obj_offset=self.obj_offset,
            maximize=maximize,
            name=self.name,
        )


def from_dense(
    A: Sequence[Sequence[float]],
    b: Sequence[float],
    c: Sequence[float],
    senses: Sequence[str] | str = "L",
    lb: Sequence[float] | float = 0.0,
    ub: Sequence[float] | float = INF,
    maximize: bool = False,
) -> LinearProgram:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m, n = A.shape if A.size else (len(b), len(c))
    if isinstance(senses, str):
        senses = [senses] * m
    ii, jj = np.nonzero(A) if A.size else (np.array([], int), np.array([], int))
    return LinearProgram(
        col_names=tuple(f"x{j}" for j in range(n)),
        row_names=tuple(f"r{i}" for i in range(m)),
        c=np.asarray(c, dtype=float),
        a_rows=ii.astype(np.int64),
        a_cols=jj.astype(np.int64),
        a_vals=A[ii, jj] if A.size else np.array([], float),
        row_sense=tuple(senses),
        rhs=np.asarray(b, dtype=float),
        lb=np.broadcast_to(np.asarray(lb, dtype=float), (n,)).copy(),
        ub=np.broadcast_to(np.asarray(ub, dtype=float), (n,)).copy(),
        maximize=maximize,
    )


@dataclass
class SolveOptions:
    max_iters: int = 200_000
    tol_feas: float = 1e-7
    tol_opt: float = 1e-8
    pivot: str = "devex"  # or "dantzig", "bland"
    refactor_every: int = 40
    scaling: bool = True
    presolve: bool = True
    stall_limit: int = 300
    method: str = "auto"  # auto | primal | dual

    def __post_init__(self):
        if self.pivot not in ("devex", "dantzig", "bland"):
            raise ValueError(f"unknown pivot rule {self.pivot!r}")
        if self.method not in ("auto", "primal", "dual"):
            raise ValueError(f"unknown method {self.method!r}")


@dataclass
class SolveResult:
    status: str  # optimal | infeasible | unbounded | iteration_limit
    objective: float
    x: np.ndarray
    duals: np.ndarray  # d(objective)/d(rhs) per row
    reduced_costs: np.ndarray
    iterations: int
    basis: tuple[str, ...] = ()
    farkas: np.ndarray | None = None  # row multipliers proving infeasibility
    ray: np.ndarray | None = None  # improving direction when unbounded
    message: str = ""
    col_names: tuple[str, ...] = field(default=(), repr=False)
    row_names: tuple[str, ...] = field(default=(), repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    def value(self, name: str) -> float:
        return float(self.x[self.col_names.index(name)])

    def as_maps(self) -> tuple[dict[str, float], dict[str, float]]:
        return (
            dict(zip(self.col_names, map(float, self.x))),
            dict(zip(self.row_names, map(float, self.duals))),
        )

    def to_bytes(self) -> bytes:
        parts = [self.status, repr(float(self.objective)), str(self.iterations), ",".join(self.basis)]
        for arr in (self.x, self.duals, self.reduced_costs):
            parts.append(np.asarray(arr, dtype="<f8").tobytes().hex())
        return "\n".join(parts).encode()


def row_activity(lp: LinearProgram, x: np.ndarray) -> np.ndarray:
    return lp.matrix() @ x


def result_from_maps(
    lp: LinearProgram,
    primal: Mapping[str, float],
    duals: Mapping[str, float] | None = None,
    status: str = "optimal",
) -> SolveResult:
    """Assemble a SolveResult from externally solved values keyed by name."""
    missing = [n for n in lp.col_names if n not in primal]
    if missing:
        raise KeyError(f"solution lacks {len(missing)} columns, e.g. {missing[:3]}")
    x = np.array([primal[n] for n in lp.col_names], dtype=float)
    y = np.array([(duals or {}).get(n, 0.0) for n in lp.row_names], dtype=float)
    d = lp.c - lp.matrix().T @ y
    return SolveResult(
        status=status,
        objective=lp.objective(x),
        x=x,
        duals=y,
        reduced_costs=d,
        iterations=0,
        message="imported",
        col_names=lp.col_names,
        row_names=lp.row_names,
    )
