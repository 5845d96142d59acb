"""Light presolve: empty rows, singleton rows to bounds, empty columns.

Every reduction is appended to an undo log so that primal values, row duals
and reduced costs of the original problem can be recovered afterwards.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

INF = np.inf


@dataclass
class Presolved:
    A: sp.csc_matrix  # reduced matrix
    c: np.ndarray
    senses: list[str]
    b: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    rows: np.ndarray  # original indices of kept rows
    cols: np.ndarray  # original indices of kept columns
    fixed: dict[int, float]  # removed column -> value
    # singleton rows turned into bounds: (row, col, coef)
    singletons: list[tuple[int, int, float]]
    # which singleton row currently owns each tightened bound
    lb_owner: dict[int, int] = field(default_factory=dict)
    ub_owner: dict[int, int] = field(default_factory=dict)
    status: str = "ok"  # ok | infeasible | unbounded
    farkas_row: int | None = None
    unbounded_col: int | None = None


def presolve(A: sp.csr_matrix, c, senses, b, lb, ub, tol: float = 1e-9) -> Presolved:
    m, n = A.shape
    A = A.tocsr()
    lb = lb.astype(float).copy()
    ub = ub.astype(float).copy()
    row_alive = np.ones(m, bool)
    col_alive = np.ones(n, bool)
    fixed: dict[int, float] = {}
    singletons = []
    lb_owner: dict[int, int] = {}
    ub_owner: dict[int, int] = {}
    out = dict(status="ok", farkas_row=None, unbounded_col=None)

    Acsc = A.tocsc()
    row_count = np.diff(A.indptr).astype(int)
    col_count = np.diff(Acsc.indptr).astype(int)

    def kill_col(j):
        col_alive[j] = False
        for p in range(Acsc.indptr[j], Acsc.indptr[j + 1]):
            i = Acsc.indices[p]
            if row_alive[i]:
                row_count[i] -= 1

    def kill_row(i):
        row_alive[i] = False
        for p in range(A.indptr[i], A.indptr[i + 1]):
            j = A.indices[p]
            if col_alive[j]:
                col_count[j] -= 1

    changed = True
    while changed and out["status"] == "ok":
        changed = False
        for i in range(m):
            if not row_alive[i]:
                continue
            if row_count[i] == 0:
                s, bi = senses[i], b[i]
                ok = (s == "L" and bi >= -tol) or (s == "G" and bi <= tol) or (s == "E" and abs(bi) <= tol)
                if not ok:
                    out.update(status="infeasible", farkas_row=i)
                    break
                kill_row(i)
                changed = True
            elif row_count[i] == 1:
                for p in range(A.indptr[i], A.indptr[i + 1]):
                    j = A.indices[p]
                    if col_alive[j]:
                        a = A.data[p]
                        break
                bound = b[i] / a
                s = senses[i]
                if a < 0:
                    s = {"L": "G", "G": "L", "E": "E"}[s]
                if s in ("G", "E") and bound >= lb[j]:
                    lb[j] = bound
                    lb_owner[j] = i
                if s in ("L", "E") and bound <= ub[j]:
                    ub[j] = bound
                    ub_owner[j] = i
                if lb[j] > ub[j]:
                    if lb[j] - ub[j] <= tol * max(1.0, abs(lb[j])):
                        mid = 0.5 * (lb[j] + ub[j])
                        lb[j] = ub[j] = mid
                    else:
                        out.update(status="infeasible", farkas_row=i)
                        break
                singletons.append((i, j, a))
                kill_row(i)
                changed = True
        if out["status"] != "ok":
            break
        for j in range(n):
            if col_alive[j] and col_count[j] == 0:
                cj = c[j]
                if cj > 0:
                    v = lb[j]
                elif cj < 0:
                    v = ub[j]
                else:
                    v = lb[j] if np.isfinite(lb[j]) else (ub[j] if np.isfinite(ub[j]) else 0.0)
                if not np.isfinite(v):
                    out.update(status="unbounded", unbounded_col=j)
                    break
                fixed[j] = v
                kill_col(j)
                changed = True

    rows = np.flatnonzero(row_alive)
    cols = np.flatnonzero(col_alive)
    sub = A[rows][:, cols].tocsc()
    return Presolved(
        A=sub,
        c=np.asarray(c, float)[cols],
        senses=[senses[i] for i in rows],
        # fixed columns have no entries in surviving rows, so b needs no shift
        b=np.asarray(b, float)[rows],
        lb=lb[cols],
        ub=ub[cols],
        rows=rows,
        cols=cols,
        fixed=fixed,
        singletons=singletons,
        lb_owner=lb_owner,
        ub_owner=ub_owner,
        **out,
    )


def postsolve(pre: Presolved, n: int, m: int, x_red, y_red, d_red, c, tol: float = 1e-9):
    """Map reduced-problem values back to the original index space."""
    x = np.zeros(n)
    y = np.zeros(m)
    d = np.zeros(n)
    x[pre.cols] = x_red
    y[pre.rows] = y_red
    d[pre.cols] = d_red
    for j, v in pre.fixed.items():
        x[j] = v
        d[j] = c[j]  # removed columns touch no surviving row
    # singleton rows: a reduced cost sitting on a bound owned by a row is that row's dual
    owners = {}
    for j, i in pre.lb_owner.items():
        owners.setdefault(j, {})["lb"] = i
    for j, i in pre.ub_owner.items():
        owners.setdefault(j, {})["ub"] = i
    coef = {i: a for i, _, a in pre.singletons}
    for j, own in owners.items():
        dj = d[j]
        if abs(dj) <= 0:
            continue
        key = None
        if dj > 0 and "lb" in own:
            key = "lb"
        elif dj < 0 and "ub" in own:
            key = "ub"
        elif "lb" in own and own.get("lb") == own.get("ub"):
            key = "lb"
        if key is None:
            continue
        i = own[key]
        y[i] = dj / coef[i]
        d[j] = 0.0
    return x, y, d
