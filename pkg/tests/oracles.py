"""Brute-force reference solvers used only by the tests."""
from __future__ import annotations

import itertools
import math

import numpy as np


def _constraints(A, b, senses, lb, ub):
    """Stack rows and finite bounds as G x (sense) h."""
    m, n = A.shape
    G, h, s, kind = [], [], [], []
    for i in range(m):
        G.append(A[i]); h.append(b[i]); s.append(senses[i]); kind.append(("row", i))
    eye = np.eye(n)
    for j in range(n):
        if np.isfinite(lb[j]):
            G.append(eye[j]); h.append(lb[j]); s.append("G"); kind.append(("lb", j))
        if np.isfinite(ub[j]):
            G.append(eye[j]); h.append(ub[j]); s.append("L"); kind.append(("ub", j))
    return np.array(G, float).reshape(-1, n), np.array(h, float), s, kind


def n_candidates(m: int, n: int, n_bounds: int, n_eq: int = 0) -> int:
    free = m + n_bounds - n_eq
    need = n - n_eq
    return math.comb(free, need) if 0 <= need <= free else 0


def _feasible(G, h, s, X, tol):
    act = X @ G.T  # (k, rows)
    ok = np.ones(len(X), bool)
    for r, sense in enumerate(s):
        scale = tol * (1 + abs(h[r]))
        if sense == "L":
            ok &= act[:, r] <= h[r] + scale
        elif sense == "G":
            ok &= act[:, r] >= h[r] - scale
        else:
            ok &= np.abs(act[:, r] - h[r]) <= scale
    return ok


def vertices(G, h, s, tol=1e-9, chunk=20000):
    """All basic feasible points of {G x (s) h}; yields (point, active index tuple)."""
    k, n = G.shape
    # a maximal independent set of equalities is active at every vertex;
    # dependent equalities are redundant or contradictory and only get checked
    eq = []
    for r in range(k):
        if s[r] == "E" and np.linalg.matrix_rank(G[eq + [r]]) > len(eq):
            eq.append(r)
    ineq = [r for r in range(k) if s[r] != "E"]
    need = n - len(eq)
    combos_iter = (tuple(eq) + c for c in itertools.combinations(ineq, need))
    while True:
        batch = list(itertools.islice(combos_iter, chunk))
        if not batch:
            return
        idx = np.array(batch)
        M = G[idx]
        rhs = h[idx]
        det = np.linalg.det(M)
        good = np.abs(det) > 1e-9
        if not good.any():
            continue
        X = np.linalg.solve(M[good], rhs[good][..., None])[..., 0]
        feas = _feasible(G, h, s, X, tol)
        for x, act in zip(X[feas], idx[good][feas]):
            yield x, tuple(int(a) for a in act)


def brute_force_lp(A, b, c, senses, lb, ub, maximize=False):
    """Exact optimum by vertex enumeration for LPs with finite lower bounds.

    Returns (status, objective, x, row_duals or None).  Duals are reported
    only when the optimal vertex is nondegenerate and unique.
    """
    A = np.asarray(A, float)
    c = np.asarray(c, float)
    m, n = A.shape
    assert np.all(np.isfinite(lb)), "oracle needs a pointed polyhedron"
    sign = -1.0 if maximize else 1.0
    cm = sign * c
    G, h, s, kind = _constraints(A, np.asarray(b, float), senses, lb, ub)
    best, best_x, best_act, n_best = math.inf, None, None, 0
    found = False
    for x, act in vertices(G, h, s):
        found = True
        v = float(cm @ x)
        if v < best - 1e-9 * (1 + abs(best) if np.isfinite(best) else 1):
            best, best_x, best_act, n_best = v, x, act, 1
        elif abs(v - best) <= 1e-9 * (1 + abs(best)):
            n_best += 1
    if not found:
        return "infeasible", None, None, None
    # unbounded iff some recession direction improves: enumerate the normalised cone
    Gr, sr = [], []
    for r in range(len(h)):
        Gr.append(G[r]); sr.append(s[r])
    hr = np.zeros(len(h))
    # every lb is finite so directions are >= 0 and sum(d) = 1 normalises the cone
    norm_row = np.ones(n)
    Gc = np.vstack([np.array(Gr), norm_row])
    hc = np.concatenate([hr, [1.0]])
    sc = list(sr) + ["E"]
    for d, _ in vertices(Gc, hc, sc):
        if float(cm @ d) < -1e-9:
            return "unbounded", None, None, None
    duals = None
    if n_best == 1 and len(best_act) == n:
        act_set = list(best_act)
        # nondegenerate: no other constraint is tight
        tight = np.abs(G @ best_x - h) <= 1e-9 * (1 + np.abs(h))
        if tight.sum() == n:
            lam = np.linalg.solve(G[act_set].T, cm)
            y = np.zeros(m)
            for l, r in zip(lam, act_set):
                if kind[r][0] == "row":
                    y[kind[r][1]] = l
            duals = sign * y
    return "optimal", sign * best, best_x, duals


def random_lp(rng: np.random.Generator, max_rows=10, max_cols=12, max_candidates=20000):
    """Integer-data LP with finite lower bounds, sized so enumeration stays cheap.

    Sizes are drawn uniformly and redrawn while the number of candidate
    active sets exceeds max_candidates.
    """
    while True:
        m = int(rng.integers(1, max_rows + 1))
        n = int(rng.integers(1, max_cols + 1))
        has_ub = rng.random(n) < 0.5
        senses = rng.choice(["L", "G", "E"], size=m, p=[0.6, 0.25, 0.15])
        neq = int((senses == "E").sum())
        if neq <= n and n_candidates(m, n, n + int(has_ub.sum()), neq) <= max_candidates:
            break
    A = rng.integers(-5, 6, size=(m, n)).astype(float)
    A[rng.random((m, n)) < 0.3] = 0
    b = np.where(senses == "L", rng.integers(0, 20, size=m), rng.integers(-4, 6, size=m)).astype(float)
    c = rng.integers(-3, 8, size=n).astype(float)
    lb = np.where(rng.random(n) < 0.8, 0.0, -rng.integers(1, 5, size=n).astype(float))
    ub = np.where(has_ub, lb + rng.integers(1, 10, size=n), np.inf)
    return A, b, c, [str(x) for x in senses], lb, ub, bool(rng.random() < 0.3)
