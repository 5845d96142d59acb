"""Independent checks of a SolveResult against its LinearProgram.

Nothing here reuses solver internals: residuals, the dual objective and
complementary slackness are recomputed from the LP data alone.  The dual
convention is y = d(obj)/d(rhs) in the caller's sense and d = c - A^T y.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .lp import LinearProgram, SolveResult, result_from_maps

TOL = 1e-6


@dataclass
class VerificationReport:
    primal_residual: float = 0.0
    bound_violation: float = 0.0
    dual_infeasibility: float = 0.0
    duality_gap: float = 0.0
    comp_slack: float = 0.0
    primal_objective: float = 0.0
    dual_objective: float = 0.0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _to_min(lp: LinearProgram, y, d):
    s = -1.0 if lp.maximize else 1.0
    return s * lp.c, s * np.asarray(y, float), s * np.asarray(d, float)


def dual_objective(lp: LinearProgram, y, d) -> float:
    """Dual bound b.y + sum over active bounds, in the caller's sense."""
    c, y, d = _to_min(lp, y, d)
    val = float(lp.rhs @ y)
    for j in range(lp.n_cols):
        if d[j] > 0 and np.isfinite(lp.lb[j]):
            val += d[j] * lp.lb[j]
        elif d[j] < 0 and np.isfinite(lp.ub[j]):
            val += d[j] * lp.ub[j]
    val = -val if lp.maximize else val
    return val + lp.obj_offset


def verify_solution(lp: LinearProgram, result: SolveResult, tol: float = TOL) -> VerificationReport:
    rep = VerificationReport()
    try:
        x = np.asarray(result.x, float)
        y = np.asarray(result.duals, float)
        if x.shape != (lp.n_cols,) or y.shape != (lp.n_rows,):
            rep.violations.append("solution vector sizes do not match the LP")
            return rep
        if result.status != "optimal":
            rep.violations.append(f"status is {result.status}, not optimal")
            return rep
        A = lp.matrix()
        act = A @ x
        d = lp.c - A.T @ y
        bscale = 1.0 + (np.abs(lp.rhs).max() if lp.n_rows else 0.0)

        # primal feasibility
        res = np.zeros(lp.n_rows)
        for i, s in enumerate(lp.row_sense):
            gap = act[i] - lp.rhs[i]
            res[i] = max(gap, 0) if s == "L" else (max(-gap, 0) if s == "G" else abs(gap))
        rep.primal_residual = float(res.max()) if lp.n_rows else 0.0
        if rep.primal_residual > tol * bscale:
            i = int(res.argmax())
            rep.violations.append(
                f"row {lp.row_names[i]} violated by {rep.primal_residual:.3g} "
                f"(limit {tol * bscale:.3g})"
            )
        bv = np.maximum(lp.lb - x, 0) + np.maximum(x - lp.ub, 0)
        rep.bound_violation = float(bv.max()) if lp.n_cols else 0.0
        xscale = 1.0 + float(np.abs(x).max()) if lp.n_cols else 1.0
        if rep.bound_violation > tol * xscale:
            j = int(bv.argmax())
            rep.violations.append(f"column {lp.col_names[j]} outside its bounds by {rep.bound_violation:.3g}")

        rep.primal_objective = lp.objective(x)
        oscale = 1.0 + abs(rep.primal_objective)

        # dual feasibility in min form
        _, ym, dm = _to_min(lp, y, d)
        dinf = 0.0
        for i, s in enumerate(lp.row_sense):
            if s == "L":
                dinf = max(dinf, ym[i])
            elif s == "G":
                dinf = max(dinf, -ym[i])
        for j in range(lp.n_cols):
            if dm[j] > 0 and not np.isfinite(lp.lb[j]):
                dinf = max(dinf, dm[j])
            if dm[j] < 0 and not np.isfinite(lp.ub[j]):
                dinf = max(dinf, -dm[j])
        rep.dual_infeasibility = float(dinf)
        cscale = 1.0 + (float(np.abs(lp.c).max()) if lp.n_cols else 0.0)
        if dinf > tol * cscale:
            rep.violations.append(f"dual infeasibility {dinf:.3g}")

        rep.dual_objective = dual_objective(lp, y, d)
        rep.duality_gap = abs(rep.primal_objective - rep.dual_objective)
        if rep.duality_gap > tol * oscale:
            rep.violations.append(
                f"duality gap {rep.duality_gap:.3g} exceeds {tol * oscale:.3g} "
                f"(primal {rep.primal_objective:.10g}, dual {rep.dual_objective:.10g})"
            )

        # complementary slackness: rows and bounds
        slack = np.abs(act - lp.rhs)
        cs_rows = np.abs(ym * slack)
        cs_cols = np.zeros(lp.n_cols)
        for j in range(lp.n_cols):
            if dm[j] > 0:
                cs_cols[j] = dm[j] * (x[j] - lp.lb[j]) if np.isfinite(lp.lb[j]) else 0.0
            elif dm[j] < 0:
                cs_cols[j] = -dm[j] * (lp.ub[j] - x[j]) if np.isfinite(lp.ub[j]) else 0.0
        worst = max(cs_rows.max(initial=0.0), np.abs(cs_cols).max(initial=0.0))
        rep.comp_slack = float(worst)
        if worst > tol * oscale:
            rep.violations.append(f"complementary slackness violated by {worst:.3g}")
    except Exception as exc:  # the report must never raise
        rep.violations.append(f"verification failed: {type(exc).__name__}: {exc}")
    return rep


def check_farkas(lp: LinearProgram, y, tol: float = 1e-7) -> bool:
    """True when y proves {Ax ~ b, lb <= x <= ub} empty.

    With logicals s (L: s >= 0, G: s <= 0, E: s = 0) the system is
    A x + s = b.  y certifies infeasibility when y.b exceeds the largest
    value y.(A x + s) can take over the box, and that maximum is finite.
    """
    y = np.asarray(y, float)
    if y.shape != (lp.n_rows,):
        return False
    g = lp.matrix().T @ y
    sup = 0.0
    for j in range(lp.n_cols):
        if g[j] > tol:
            if not np.isfinite(lp.ub[j]):
                return False
            sup += g[j] * lp.ub[j]
        elif g[j] < -tol:
            if not np.isfinite(lp.lb[j]):
                return False
            sup += g[j] * lp.lb[j]
    for i, s in enumerate(lp.row_sense):
        if s == "L" and y[i] > tol:
            return False
        if s == "G" and y[i] < -tol:
            return False
    scale = 1.0 + float(np.abs(y).max(initial=0.0)) * (1.0 + float(np.abs(lp.rhs).max(initial=0.0)))
    return float(lp.rhs @ y) - sup > tol * scale


def check_ray(lp: LinearProgram, ray, tol: float = 1e-7) -> bool:
    """True when ray is a feasible direction improving the objective."""
    r = np.asarray(ray, float)
    if r.shape != (lp.n_cols,):
        return False
    Ar = lp.matrix() @ r
    scale = 1.0 + float(np.abs(r).max(initial=0.0))
    for i, s in enumerate(lp.row_sense):
        if s == "L" and Ar[i] > tol * scale:
            return False
        if s == "G" and Ar[i] < -tol * scale:
            return False
        if s == "E" and abs(Ar[i]) > tol * scale:
            return False
    if np.any((r < -tol * scale) & np.isfinite(lp.lb)) or np.any((r > tol * scale) & np.isfinite(lp.ub)):
        return False
    slope = float(lp.c @ r)
    return slope > tol * scale if lp.maximize else slope < -tol * scale


# solution interchange -------------------------------------------------------

def write_solution(result: SolveResult, out_dir) -> tuple[Path, Path]:
    """Write solution.csv (column,value) and duals.csv (row,dual)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sol, dua = out_dir / "solution.csv", out_dir / "duals.csv"
    with open(sol, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["column", "value"])
        for n, v in zip(result.col_names, result.x):
            w.writerow([n, repr(float(v))])
    with open(dua, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row", "dual"])
        for n, v in zip(result.row_names, result.duals):
            w.writerow([n, repr(float(v))])
    return sol, dua


def _read_pairs(path) -> dict[str, float]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return {r[0]: float(r[1]) for r in rows[1:] if r}


def read_solution(lp: LinearProgram, solution_csv, duals_csv=None) -> SolveResult:
    """Import an externally solved point; duals default to zero when absent."""
    primal = _read_pairs(solution_csv)
    duals = _read_pairs(duals_csv) if duals_csv else None
    return result_from_maps(lp, primal, duals)
