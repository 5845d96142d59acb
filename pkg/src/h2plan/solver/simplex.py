"""Bounded-variable revised primal simplex.

Works on  min c.x  s.t.  A x + s = b,  l <= (x, s) <= u  where ``s`` holds
one logical per row whose bounds encode the row sense.  The basis inverse
is kept as a sparse LU factorization plus a product-form eta file that is
rebuilt every ``refactor_every`` pivots.  Phase 1 minimises the sum of
artificials added only on rows whose logical starts outside its bounds.
"""
from __future__ import annotations

import logging
import math

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .lp import LinearProgram, SolveOptions, SolveResult
from .presolve import postsolve, presolve

log = logging.getLogger(__name__)

INF = math.inf
PIVOT_TOL = 1e-9
RESIDUAL_LIMIT = 1e-6

# nonbasic status codes
BASIC, AT_LB, AT_UB, FREE, FIXED = 0, 1, 2, 3, 4


class NumericalBreakdown(RuntimeError):
    def __init__(self, msg, diagnostics=None):
        super().__init__(msg)
        self.diagnostics = diagnostics or {}


def _pow2(v: np.ndarray) -> np.ndarray:
    return np.exp2(np.round(np.log2(v)))


def equilibrate(A: sp.spmatrix, passes: int = 8):
    """Geometric-mean row/column scaling, rounded to powers of two."""
    m, n = A.shape
    r = np.ones(m)
    s = np.ones(n)
    coo = A.tocoo()
    keep = coo.data != 0
    ri, ci, av = coo.row[keep], coo.col[keep], np.abs(coo.data[keep])
    if av.size == 0:
        return r, s
    for _ in range(passes):
        v = av * r[ri] * s[ci]
        hi = np.zeros(m)
        lo = np.full(m, np.inf)
        np.maximum.at(hi, ri, v)
        np.minimum.at(lo, ri, v)
        ok = hi > 0
        r[ok] /= np.sqrt(hi[ok] * lo[ok])
        v = av * r[ri] * s[ci]
        hi = np.zeros(n)
        lo = np.full(n, np.inf)
        np.maximum.at(hi, ci, v)
        np.minimum.at(lo, ci, v)
        ok = hi > 0
        s[ok] /= np.sqrt(hi[ok] * lo[ok])
    return _pow2(r), _pow2(s)


class _Core:
    """One simplex run over a fixed column set (structurals, logicals, artificials)."""

    def __init__(self, M: sp.csc_matrix, b, lo, hi, opts: SolveOptions):
        self.M = M
        self.MT = M.T.tocsr()
        self.b = b
        self.lo = lo
        self.hi = hi
        self.opts = opts
        self.m, self.N = M.shape
        self.iters = 0
        self.lu = None
        self.etas: list[tuple[int, float, np.ndarray, np.ndarray]] = []

    # -- factorization ---------------------------------------------------
    def refactor(self):
        B = self.M[:, self.basis].tocsc()
        try:
            self.lu = spla.splu(B, permc_spec="COLAMD", options=dict(SymmetricMode=False))
        except RuntimeError as exc:
            raise NumericalBreakdown(f"basis factorization failed: {exc}") from exc
        self.etas = []
        self.recompute_xb()

    def recompute_xb(self):
        nb = self.status != BASIC
        rhs = self.b - self.M[:, nb] @ self.x[nb]
        xb = self.lu.solve(rhs)
        if not np.all(np.isfinite(xb)):
            raise NumericalBreakdown("non-finite basic solution after refactorization")
        B = self.M[:, self.basis]
        resid = np.abs(B @ xb - rhs).max() if self.m else 0.0
        scale = 1.0 + (np.abs(rhs).max() if self.m else 0.0)
        if resid > RESIDUAL_LIMIT * scale:
            raise NumericalBreakdown(
                "ill-conditioned basis", {"residual": float(resid), "scale": float(scale)}
            )
        self.x[self.basis] = xb

    def ftran(self, a: np.ndarray) -> np.ndarray:
        v = self.lu.solve(a)
        for r, piv, idx, val in self.etas:
            vr = v[r] / piv
            if vr != 0.0:
                v[idx] -= val * vr
            v[r] = vr
        return v

    def btran(self, cb: np.ndarray) -> np.ndarray:
        w = cb.astype(float).copy()
        for r, piv, idx, val in reversed(self.etas):
            w[r] = (w[r] - w[idx] @ val) / piv
        return self.lu.solve(w, trans="T")

    def push_eta(self, r: int, alpha: np.ndarray) -> None:
        idx = np.flatnonzero(alpha)
        idx = idx[idx != r]
        self.etas.append((r, float(alpha[r]), idx, alpha[idx].copy()))

    # -- main loop -------------------------------------------------------
    def run(self, cost: np.ndarray, phase: int):
        opts = self.opts
        m = self.m
        bland = opts.pivot == "bland"
        devex = opts.pivot == "devex"
        weights = np.ones(self.N)  # reference-framework devex weights
        best = INF
        stall = 0
        fresh = False  # y, d recomputed from scratch since the last pivot
        y = d = None
        while True:
            if self.iters >= opts.max_iters:
                return "iteration_limit", None
            if y is None or not (devex and not bland):
                # devex keeps y and d current through the pivot row instead
                y = self.btran(cost[self.basis]) if m else np.zeros(0)
                d = cost - self.MT @ y if m else cost.copy()
                fresh = True
            st = self.status
            inc = ((st == AT_LB) | (st == FREE)) & (d < -opts.tol_opt)
            dec = ((st == AT_UB) | (st == FREE)) & (d > opts.tol_opt)
            elig = inc | dec
            if not elig.any():
                if fresh:
                    return "optimal", y
                y = None  # confirm with exact duals before stopping
                continue
            fresh = False
            if bland:
                q = int(np.flatnonzero(elig)[0])
            elif devex:
                score = np.where(elig, d * d / weights, -1.0)
                q = int(np.argmax(score))
            else:
                score = np.where(elig, np.abs(d), -1.0)
                q = int(np.argmax(score))
            direction = 1.0 if inc[q] else -1.0
            col = np.zeros(m)
            lo_p, hi_p = self.M.indptr[q], self.M.indptr[q + 1]
            col[self.M.indices[lo_p:hi_p]] = self.M.data[lo_p:hi_p]
            alpha = self.ftran(col) if m else np.zeros(0)

            # ratio test (Harris two-pass unless in Bland mode)
            xb = self.x[self.basis]
            lob = self.lo[self.basis]
            hib = self.hi[self.basis]
            ad = alpha * direction
            theta_flip = self.hi[q] - self.lo[q]
            dec_mask = ad > PIVOT_TOL
            inc_mask = ad < -PIVOT_TOL
            lim_lo = np.full(m, INF)
            lim_hi = np.full(m, INF)
            with np.errstate(divide="ignore", invalid="ignore"):
                fin = dec_mask & np.isfinite(lob)
                lim_lo[fin] = (xb[fin] - lob[fin]) / ad[fin]
                fin = inc_mask & np.isfinite(hib)
                lim_hi[fin] = (hib[fin] - xb[fin]) / (-ad[fin])
            ratio = np.minimum(lim_lo, lim_hi)
            r = -1
            theta = theta_flip
            if m and np.isfinite(ratio).any():
                if bland:
                    tmin = ratio.min()
                    if tmin < theta:
                        ties = np.flatnonzero(ratio <= tmin + 1e-12)
                        r = int(ties[np.argmin(self.basis[ties])])
                        theta = max(tmin, 0.0)
                else:
                    tol = opts.tol_feas
                    with np.errstate(divide="ignore", invalid="ignore"):
                        relax = np.full(m, INF)
                        fin = dec_mask & np.isfinite(lob)
                        relax[fin] = (xb[fin] - lob[fin] + tol) / ad[fin]
                        fin = inc_mask & np.isfinite(hib)
                        relax[fin] = np.minimum(relax[fin], (hib[fin] - xb[fin] + tol) / (-ad[fin]))
                    t1 = relax.min()
                    if t1 < theta:
                        cand = np.flatnonzero(ratio <= t1)
                        r = int(cand[np.argmax(np.abs(alpha[cand]))])
                        theta = max(ratio[r], 0.0)
            if r < 0 and not math.isfinite(theta):
                ray = np.zeros(self.N)
                ray[q] = direction
                ray[self.basis] = -direction * alpha
                return "unbounded", ray

            self.iters += 1
            self.x[q] += direction * theta
            if m:
                self.x[self.basis] -= direction * theta * alpha
            if r < 0:
                self.status[q] = AT_UB if direction > 0 else AT_LB
                self.x[q] = self.hi[q] if direction > 0 else self.lo[q]
            else:
                leave = self.basis[r]
                if ad[r] > 0:
                    self.status[leave] = AT_LB
                    self.x[leave] = self.lo[leave]
                else:
                    self.status[leave] = AT_UB
                    self.x[leave] = self.hi[leave]
                if self.lo[leave] == self.hi[leave]:
                    self.status[leave] = FIXED
                if abs(alpha[r]) < PIVOT_TOL:
                    raise NumericalBreakdown("pivot element too small", {"pivot": float(alpha[r])})
                if devex and not bland:
                    e = np.zeros(m)
                    e[r] = 1.0
                    rho = self.btran(e)
                    row = self.MT @ rho  # pivot row of B^-1 M
                    step = d[q] / alpha[r]
                    y = y + step * rho
                    d = d - step * row
                    ratio_sq = (row / alpha[r]) ** 2
                    wq = weights[q]
                    nb = self.status != BASIC
                    weights[nb] = np.maximum(weights[nb], ratio_sq[nb] * wq)
                    weights[leave] = max(wq / alpha[r] ** 2, 1.0)
                    if weights.max() > 1e8:
                        weights[:] = 1.0
                self.basis[r] = q
                self.status[q] = BASIC
                if d is not None:
                    d[q] = 0.0
                self.push_eta(r, alpha)
                if len(self.etas) >= opts.refactor_every:
                    self.refactor()
                    y = None

            obj = float(cost @ self.x)
            if obj < best - 1e-12 * (1 + abs(best if math.isfinite(best) else 0)):
                best = obj
                stall = 0
                if opts.pivot != "bland":
                    bland = False
            else:
                stall += 1
                if stall > opts.stall_limit and not bland:
                    log.debug("stalling at iteration %d, switching to Bland's rule", self.iters)
                    bland = True


    def run_dual(self, cost: np.ndarray):
        """Dual simplex from a dual feasible basis (min sense).

        Returns ("optimal", y), ("infeasible", farkas), ("stalled", None)
        or ("iteration_limit", None).  "optimal" means every basic variable
        is within its bounds; dual feasibility is rechecked by the caller.
        """
        opts = self.opts
        m = self.m
        bland = opts.pivot == "bland"
        devex = opts.pivot == "devex"
        weights = np.ones(m)  # dual devex reference weights, one per row
        tol_p, tol_d = opts.tol_feas, opts.tol_opt
        y = d = None
        best = -INF
        stall = 0
        while True:
            if self.iters >= opts.max_iters:
                return "iteration_limit", None
            if y is None:
                y = self.btran(cost[self.basis])
                d = cost - self.MT @ y
                d[self.basis] = 0.0
            xb = self.x[self.basis]
            lob = self.lo[self.basis]
            hib = self.hi[self.basis]
            below = lob - xb
            above = xb - hib
            infeas = np.maximum(np.maximum(below, above), 0.0)
            viol = infeas > tol_p * (1.0 + np.abs(np.where(below > above, lob, hib)))
            if not viol.any():
                return "optimal", y
            if bland:
                cand = np.flatnonzero(viol)
                r = int(cand[np.argmin(self.basis[cand])])
            elif devex:
                r = int(np.argmax(np.where(viol, infeas * infeas / weights, -1.0)))
            else:
                r = int(np.argmax(np.where(viol, infeas, -1.0)))
            leave = int(self.basis[r])
            to_lower = below[r] > 0
            target = lob[r] if to_lower else hib[r]

            e = np.zeros(m)
            e[r] = 1.0
            rho = self.btran(e)
            row = self.MT @ rho
            # entering candidates keep every reduced cost of the right sign
            st = self.status
            sgn = -1.0 if to_lower else 1.0  # x_leave moves by -row_j * dx_j
            a = sgn * row
            can_up = ((st == AT_LB) | (st == FREE)) & (a > PIVOT_TOL)
            can_dn = ((st == AT_UB) | (st == FREE)) & (a < -PIVOT_TOL)
            elig = can_up | can_dn
            if not elig.any():
                # row r proves that x_leave cannot reach its bound
                return "infeasible", (-rho if to_lower else rho)
            idx = np.flatnonzero(elig)
            aj = np.abs(a[idx])
            dj = np.abs(d[idx])
            ratio = dj / aj
            if bland:
                tmin = ratio.min()
                ties = idx[ratio <= tmin + 1e-12]
                q = int(ties.min())
            else:
                relax = ((dj + tol_d) / aj).min()
                cand = ratio <= relax
                pick = np.flatnonzero(cand)
                q = int(idx[pick[np.argmax(aj[pick])]])

            col = np.zeros(m)
            lo_p, hi_p = self.M.indptr[q], self.M.indptr[q + 1]
            col[self.M.indices[lo_p:hi_p]] = self.M.data[lo_p:hi_p]
            alpha = self.ftran(col)
            piv = alpha[r]
            if abs(piv) < PIVOT_TOL:
                raise NumericalBreakdown("pivot element too small", {"pivot": float(piv)})
            # primal step: x_leave = target after moving x_q
            dx = (xb[r] - target) / piv
            self.x[q] += dx
            self.x[self.basis] -= dx * alpha
            self.x[leave] = target
            # dual step
            step = d[q] / row[q]
            y = y + step * rho
            d = d - step * row
            d[q] = 0.0
            if devex and not bland:
                wr = weights[r]
                ratio_sq = (alpha / piv) ** 2
                weights = np.maximum(weights, ratio_sq * wr)
                weights[r] = max(wr / piv ** 2, 1.0)
                if weights.max() > 1e8:
                    weights[:] = 1.0
            self.status[leave] = FIXED if self.lo[leave] == self.hi[leave] else (AT_LB if to_lower else AT_UB)
            self.basis[r] = q
            self.status[q] = BASIC
            self.iters += 1
            self.push_eta(r, alpha)
            if len(self.etas) >= opts.refactor_every:
                self.refactor()
                y = None

            obj = float(cost @ self.x)
            if obj > best + 1e-12 * (1 + abs(best if math.isfinite(best) else 0)):
                best = obj
                stall = 0
            else:
                stall += 1
                if stall > opts.stall_limit:
                    return "stalled", None


def _initial_point(lo, hi):
    x = np.zeros_like(lo)
    status = np.full(lo.shape, FREE, dtype=np.int8)
    at_lo = np.isfinite(lo)
    x[at_lo] = lo[at_lo]
    status[at_lo] = AT_LB
    at_hi = ~at_lo & np.isfinite(hi)
    x[at_hi] = hi[at_hi]
    status[at_hi] = AT_UB
    status[np.isfinite(lo) & (lo == hi)] = FIXED
    return x, status


def _try_dual(M, c, b, lo, hi, opts: SolveOptions):
    """Dual simplex from the all-logical basis when it is dual feasible.

    Nonbasic columns sit at the bound their cost sign prefers; a column
    whose preferred bound is infinite makes the start dual infeasible and
    the caller falls back to the primal method.  Returns None in that case
    or when the dual run stalls.
    """
    m, N = M.shape
    n = N - m
    cc = c
    x = np.zeros(N)
    status = np.empty(N, dtype=np.int8)
    for j in range(n):
        if lo[j] == hi[j]:
            x[j], status[j] = lo[j], FIXED
        elif cc[j] > 0 or (cc[j] == 0 and np.isfinite(lo[j])):
            if not np.isfinite(lo[j]):
                return None
            x[j], status[j] = lo[j], AT_LB
        elif cc[j] < 0 or np.isfinite(hi[j]):
            if not np.isfinite(hi[j]):
                return None
            x[j], status[j] = hi[j], AT_UB
        else:
            return None  # free column with zero cost: leave it to the primal method
    core = _Core(M, b, lo, hi, opts)
    core.x = x
    core.status = status
    core.status[n:] = BASIC
    core.basis = np.arange(n, N, dtype=np.int64)
    core.refactor()
    cost = np.concatenate([c, np.zeros(m)])
    st, extra = core.run_dual(cost)
    if st == "stalled":
        log.debug("dual simplex stalled after %d iterations; restarting with the primal method", core.iters)
        return None
    if st == "optimal":
        # clean up any dual infeasibility left by tolerances with primal phase 2
        st, extra = core.run(cost, phase=2)
    return st, core, extra


def _solve_reduced(A: sp.csc_matrix, c, senses, b, lb, ub, opts: SolveOptions):
    """Simplex on an already presolved/scaled problem (min sense).

    Returns status, x, y, d, iterations, basis indices (into x then logicals),
    farkas multipliers or ray.
    """
    m, n = A.shape
    slo = np.array([0.0 if s == "L" else (-INF if s == "G" else 0.0) for s in senses])
    shi = np.array([INF if s == "L" else 0.0 for s in senses])
    lo = np.concatenate([lb, slo])
    hi = np.concatenate([ub, shi])
    M = sp.hstack([A, sp.identity(m, format="csc")], format="csc")
    if m and opts.method in ("auto", "dual"):
        out = _try_dual(M, c, b, lo, hi, opts)
        if out is not None:
            return out
        if opts.method == "dual":
            log.debug("slack basis is not dual feasible; using the primal simplex")
    x, status = _initial_point(lo, hi)
    x[n:] = 0.0
    resid = b - A @ x[:n]
    # logicals take the residual where it fits their bounds; the rest get artificials
    art_rows = []
    art_sign = []
    for i in range(m):
        k = n + i
        v = resid[i]
        if slo[i] - opts.tol_feas <= v <= shi[i] + opts.tol_feas:
            x[k] = v
            status[k] = BASIC
        else:
            bound = slo[i] if v < slo[i] else shi[i]
            x[k] = bound
            status[k] = FIXED if slo[i] == shi[i] else (AT_LB if bound == slo[i] else AT_UB)
            art_rows.append(i)
            art_sign.append(1.0 if v - bound > 0 else -1.0)
    na = len(art_rows)
    if na:
        Art = sp.csc_matrix(
            (np.array(art_sign), (np.array(art_rows), np.arange(na))), shape=(m, na)
        )
        M = sp.hstack([M, Art], format="csc")
    N = n + m + na
    lo = np.concatenate([lo, np.zeros(na)])
    hi = np.concatenate([hi, np.full(na, INF)])
    x = np.concatenate([x, np.zeros(na)])
    status = np.concatenate([status, np.full(na, BASIC, dtype=np.int8)])
    basis = np.empty(m, dtype=np.int64)
    for i in range(m):
        basis[i] = n + i
    for k, i in enumerate(art_rows):
        basis[i] = n + m + k
        x[n + m + k] = abs(resid[i] - x[n + i])

    core = _Core(M, b, lo, hi, opts)
    core.x = x
    core.status = status
    core.basis = basis
    if m:
        core.refactor()

    if na:
        c1 = np.zeros(N)
        c1[n + m:] = 1.0
        st, y1 = core.run(c1, phase=1)
        if st == "iteration_limit":
            return st, core, None
        infeas = float(core.x[n + m:].sum())
        if infeas > opts.tol_feas * (1.0 + np.abs(b).max(initial=0.0)):
            return "infeasible", core, y1
        # artificials are pinned to zero for phase 2
        hi[n + m:] = 0.0
        for k in range(n + m, N):
            if core.status[k] != BASIC:
                core.status[k] = FIXED
                core.x[k] = 0.0
    c2 = np.concatenate([c, np.zeros(m + na)])
    st, y = core.run(c2, phase=2)
    if st == "unbounded":
        return st, core, y
    return st, core, y


def _check_primal(lp: LinearProgram, x: np.ndarray, opts: SolveOptions) -> None:
    act = lp.matrix() @ x
    viol = np.zeros(lp.n_rows)
    for i, s in enumerate(lp.row_sense):
        if s == "L":
            viol[i] = max(act[i] - lp.rhs[i], 0.0)
        elif s == "G":
            viol[i] = max(lp.rhs[i] - act[i], 0.0)
        else:
            viol[i] = abs(act[i] - lp.rhs[i])
    bnd = np.maximum(lp.lb - x, 0.0) + np.maximum(x - lp.ub, 0.0)
    worst = max(viol.max(initial=0.0), bnd.max(initial=0.0))
    limit = 1e-6 * (1.0 + np.abs(lp.rhs).max(initial=0.0))
    if worst > limit:
        raise NumericalBreakdown(
            "optimal basis fails the primal feasibility check",
            {"max_violation": float(worst), "limit": float(limit)},
        )


def solve(lp: LinearProgram, options: SolveOptions | None = None) -> SolveResult:
    opts = options or SolveOptions()
    sign = -1.0 if lp.maximize else 1.0
    c = sign * lp.c
    A = lp.matrix()
    n, m = lp.n_cols, lp.n_rows
    senses = list(lp.row_sense)

    if opts.presolve:
        pre = presolve(A, c, senses, lp.rhs, lp.lb, lp.ub)
        if pre.status != "ok":
            # re-run without presolve to obtain a proper certificate
            nopre = SolveOptions(**{**opts.__dict__, "presolve": False})
            return solve(lp, nopre)
    else:
        pre = None

    if pre is not None:
        Ar, cr, sr, br, lbr, ubr = pre.A, pre.c, pre.senses, pre.b, pre.lb, pre.ub
    else:
        Ar, cr, sr, br, lbr, ubr = A.tocsc(), c, senses, lp.rhs.copy(), lp.lb.copy(), lp.ub.copy()
    mr, nr = Ar.shape

    if opts.scaling and Ar.nnz:
        rs, cs = equilibrate(Ar.tocsc())
    else:
        rs, cs = np.ones(mr), np.ones(nr)
    As = (sp.diags(rs) @ Ar @ sp.diags(cs)).tocsc()
    cscaled = cr * cs
    cnorm = float(_pow2(np.array([np.abs(cscaled).max()]))[0]) if nr and np.abs(cscaled).max() > 0 else 1.0
    cscaled = cscaled / cnorm
    bs = br * rs
    with np.errstate(invalid="ignore"):
        lbs = lbr / cs
        ubs = ubr / cs

    if nr == 0 and mr == 0:
        st, core, extra = "optimal", None, None
    else:
        st, core, extra = _solve_reduced(As, cscaled, sr, bs, lbs, ubs, opts)

    if st in ("infeasible", "unbounded") and pre is not None:
        # certificates are only meaningful in the original space
        return solve(lp, SolveOptions(**{**opts.__dict__, "presolve": False}))
    if core is not None:
        xs = core.x[:nr] * cs
        iters = core.iters
    else:
        xs = np.zeros(nr)
        iters = 0

    if st == "infeasible":
        yf = np.zeros(m)
        rows = pre.rows if pre is not None else np.arange(m)
        yf[rows] = extra * rs
        return SolveResult(
            status="infeasible", objective=math.nan, x=np.full(n, math.nan),
            duals=np.full(m, math.nan), reduced_costs=np.full(n, math.nan),
            iterations=iters, farkas=yf, message="phase 1 ended with positive infeasibility",
            col_names=lp.col_names, row_names=lp.row_names,
        )
    if st == "unbounded":
        ray = np.zeros(n)
        cols = pre.cols if pre is not None else np.arange(n)
        ray[cols] = extra[:nr] * cs
        return SolveResult(
            status="unbounded", objective=-sign * math.inf, x=np.full(n, math.nan),
            duals=np.full(m, math.nan), reduced_costs=np.full(n, math.nan),
            iterations=iters, ray=ray, message="improving ray found",
            col_names=lp.col_names, row_names=lp.row_names,
        )
    if st == "iteration_limit":
        return SolveResult(
            status="iteration_limit", objective=math.nan, x=np.full(n, math.nan),
            duals=np.full(m, math.nan), reduced_costs=np.full(n, math.nan),
            iterations=iters, message=f"stopped after {iters} iterations",
            col_names=lp.col_names, row_names=lp.row_names,
        )

    if core is not None and mr:
        y_s = extra
        d_s = np.concatenate([cscaled, np.zeros(core.N - nr)]) - core.MT @ y_s
    else:
        y_s = np.zeros(mr)
        d_s = cscaled.copy()
    yr = y_s * rs * cnorm
    dr = d_s[:nr] / cs * cnorm
    basic_red = []
    if core is not None:
        for k in sorted(int(v) for v in core.basis):
            if k < nr:
                basic_red.append(("x", k))
            elif k < nr + mr:
                basic_red.append(("s", k - nr))
    if pre is not None:
        x, y, d = postsolve(pre, n, m, xs, yr, dr, c)
        basis = tuple(
            lp.col_names[pre.cols[k]] if kind == "x" else "slack:" + lp.row_names[pre.rows[k]]
            for kind, k in basic_red
        )
    else:
        x, y, d = xs, yr, dr
        basis = tuple(
            lp.col_names[k] if kind == "x" else "slack:" + lp.row_names[k] for kind, k in basic_red
        )
    _check_primal(lp, x, opts)
    # report in the caller's objective sense
    y = sign * y
    d = sign * d
    x = np.where(x == 0.0, 0.0, x)  # drop negative zeros
    return SolveResult(
        status="optimal",
        objective=lp.objective(x),
        x=x,
        duals=y + 0.0,
        reduced_costs=d + 0.0,
        iterations=iters,
        basis=basis,
        message="",
        col_names=lp.col_names,
        row_names=lp.row_names,
    )
