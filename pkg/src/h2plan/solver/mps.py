"""MPS export/import with a fixed column layout.

Each data line carries exactly one (name, name, value) triple so that the
file depends only on the LP, never on line-packing choices:

    columns  1-3   indicator (" L ", " UP", ...) or blank
    column   5     first name field, left-justified, width W
    column   5+W+2 second name field, width W
    column   5+2W+4 numeric field, width 19, left-justified

``W`` is ``max(8, longest row/column name)``; with W = 8 this is the
classic fixed MPS spacing.  Numbers use 12 significant digits ("%.12g"),
negative zero is written as 0.  Rows appear in construction order,
columns in index order and, within a column, rows in construction order.
Sections: NAME, [OBJSENSE], ROWS, COLUMNS, RHS, BOUNDS, ENDATA.  The
objective constant is written as the RHS of the objective row with its
sign flipped (the CPLEX/Gurobi convention).
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .lp import LinearProgram, LPValidationError

OBJ_ROW = "OBJ"
RHS_SET = "RHS"
BND_SET = "BND"
NUM_WIDTH = 19


def fmt_num(v: float) -> str:
    v = float(v)
    if v == 0:
        return "0"
    return f"{v:.12g}"


def _check_names(names, kind):
    for n in names:
        if not n or any(ch.isspace() for ch in n):
            raise LPValidationError(f"{kind} name {n!r} is empty or contains whitespace")
        if n == OBJ_ROW and kind == "row":
            raise LPValidationError(f"row name {OBJ_ROW!r} is reserved for the objective")


def to_mps(lp: LinearProgram) -> str:
    _check_names(lp.col_names, "column")
    _check_names(lp.row_names, "row")
    W = max([8, len(OBJ_ROW), len(RHS_SET), *map(len, lp.col_names), *map(len, lp.row_names)])

    def line(ind: str, a: str, b: str = "", v: str = "") -> str:
        s = f"{ind:<3} {a:<{W}}"
        if b:
            s += f"  {b:<{W}}  {v:<{NUM_WIDTH}}"
        return s.rstrip()

    out = [f"NAME          {lp.name}"]
    if lp.maximize:
        out += ["OBJSENSE", "    MAX"]
    out.append("ROWS")
    out.append(line(" N", OBJ_ROW))
    for name, s in zip(lp.row_names, lp.row_sense):
        out.append(line(" " + s, name))

    out.append("COLUMNS")
    A = lp.matrix().tocsc()
    A.sort_indices()
    for j, cname in enumerate(lp.col_names):
        s, e = A.indptr[j], A.indptr[j + 1]
        if lp.c[j] != 0 or s == e:
            out.append(line("", cname, OBJ_ROW, fmt_num(lp.c[j])))
        for p in range(s, e):
            if A.data[p] != 0:
                out.append(line("", cname, lp.row_names[A.indices[p]], fmt_num(A.data[p])))

    out.append("RHS")
    if lp.obj_offset != 0:
        out.append(line("", RHS_SET, OBJ_ROW, fmt_num(-lp.obj_offset)))
    for name, b in zip(lp.row_names, lp.rhs):
        if b != 0:
            out.append(line("", RHS_SET, name, fmt_num(b)))

    out.append("BOUNDS")
    for cname, lo, hi in zip(lp.col_names, lp.lb, lp.ub):
        if lo == hi:
            out.append(line(" FX", BND_SET, cname, fmt_num(lo)))
            continue
        if lo == -math.inf and hi == math.inf:
            out.append(line(" FR", BND_SET, cname, "0").rstrip())
            continue
        if lo == -math.inf:
            out.append(line(" MI", BND_SET, cname, "0"))
        elif lo != 0:
            out.append(line(" LO", BND_SET, cname, fmt_num(lo)))
        if hi != math.inf:
            out.append(line(" UP", BND_SET, cname, fmt_num(hi)))
    out.append("ENDATA")
    return "\n".join(out) + "\n"


def export_model(lp: LinearProgram, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="\n") as fh:
        fh.write(to_mps(lp))
    return path


def from_mps(text: str) -> LinearProgram:
    name = "lp"
    maximize = False
    section = None
    row_names: list[str] = []
    row_sense: list[str] = []
    row_idx: dict[str, int] = {}
    obj_name = None
    cols: list[str] = []
    col_idx: dict[str, int] = {}
    c: list[float] = []
    ti, tj, tv = [], [], []
    rhs: dict[int, float] = {}
    offset = 0.0
    bounds: dict[int, list[float]] = {}

    def col(cname):
        if cname not in col_idx:
            col_idx[cname] = len(cols)
            cols.append(cname)
            c.append(0.0)
        return col_idx[cname]

    for raw in text.splitlines():
        if not raw.strip() or raw.startswith("*"):
            continue
        if not raw[0].isspace():
            head = raw.split()
            section = head[0]
            if section == "NAME":
                name = head[1] if len(head) > 1 else "lp"
            if section == "ENDATA":
                break
            continue
        tok = raw.split()
        if section == "OBJSENSE":
            maximize = tok[0].upper() in ("MAX", "MAXIMIZE")
        elif section == "ROWS":
            kind, rname = tok
            if kind == "N":
                if obj_name is None:
                    obj_name = rname
                continue
            row_idx[rname] = len(row_names)
            row_names.append(rname)
            row_sense.append(kind)
        elif section == "COLUMNS":
            j = col(tok[0])
            for k in range(1, len(tok) - 1, 2):
                rname, val = tok[k], float(tok[k + 1])
                if rname == obj_name:
                    c[j] += val
                else:
                    ti.append(row_idx[rname])
                    tj.append(j)
                    tv.append(val)
        elif section == "RHS":
            for k in range(1, len(tok) - 1, 2):
                rname, val = tok[k], float(tok[k + 1])
                if rname == obj_name:
                    offset = -val
                else:
                    rhs[row_idx[rname]] = val
        elif section == "BOUNDS":
            kind, cname = tok[0], tok[2]
            val = float(tok[3]) if len(tok) > 3 else 0.0
            b = bounds.setdefault(col(cname), [0.0, math.inf])
            if kind == "UP":
                b[1] = val
            elif kind == "LO":
                b[0] = val
            elif kind == "FX":
                b[0] = b[1] = val
            elif kind == "FR":
                b[0], b[1] = -math.inf, math.inf
            elif kind == "MI":
                b[0] = -math.inf
            elif kind == "PL":
                b[1] = math.inf
            else:
                raise LPValidationError(f"unsupported bound type {kind}")
        elif section == "RANGES":
            raise LPValidationError("RANGES section is not supported")
    n = len(cols)
    lb = np.zeros(n)
    ub = np.full(n, math.inf)
    for j, (lo, hi) in bounds.items():
        lb[j], ub[j] = lo, hi
    return LinearProgram(
        col_names=tuple(cols),
        row_names=tuple(row_names),
        c=np.array(c, dtype=float),
        a_rows=np.array(ti, dtype=np.int64),
        a_cols=np.array(tj, dtype=np.int64),
        a_vals=np.array(tv, dtype=float),
        row_sense=tuple(row_sense),
        rhs=np.array([rhs.get(i, 0.0) for i in range(len(row_names))], dtype=float),
        lb=lb,
        ub=ub,
        obj_offset=offset,
        maximize=maximize,
        name=name,
    )


def import_model(path) -> LinearProgram:
    return from_mps(Path(path).read_text())
