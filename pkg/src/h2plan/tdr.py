"""Representative-day reduction of hourly series by k-means.

Days are clustered on min-max scaled features of every series at once; each
cluster is represented by its medoid day and weighted by its size.  After
selection every series is rescaled by one factor so that the weighted
annual total is preserved.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

log = logging.getLogger(__name__)

DAYS = 365
HOURS_PER_DAY = 24
DEFAULT_K = 50


@dataclass
class RepresentativePeriod:
    period_id: int
    weight: int  # days per year
    day: int  # 0-based medoid day
    slices: dict[str, np.ndarray]  # series name -> 24 values
    hours: int = HOURS_PER_DAY


@dataclass
class Reduction:
    periods: list[RepresentativePeriod]
    day_map: np.ndarray  # day -> period_id
    scale: dict[str, float]
    sse_history: list[float] = field(default_factory=list)

    @property
    def weights(self) -> np.ndarray:
        return np.array([p.weight for p in self.periods])

    def series(self, name: str) -> np.ndarray:
        """(P, 24) array for one series."""
        return np.stack([p.slices[name] for p in self.periods])

    def expand(self, name: str) -> np.ndarray:
        """8760-hour reconstruction, each day replaced by its representative."""
        rep = self.series(name)
        return rep[self.day_map].reshape(-1)


def _features(bundle: Mapping[str, np.ndarray], names) -> np.ndarray:
    cols = []
    for name in names:
        s = np.asarray(bundle[name], dtype=float)
        lo, hi = s.min(), s.max()
        scaled = (s - lo) / (hi - lo) if hi > lo else np.zeros_like(s)
        cols.append(scaled.reshape(DAYS, HOURS_PER_DAY))
    return np.concatenate(cols, axis=1)


def _sq_dist(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    # elementwise on purpose: no BLAS, so results do not depend on threading
    return ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)


def _init_plus_plus(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = ((X - X[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            # all remaining points coincide with a centre; take lowest unused index
            unused = np.setdiff1d(np.arange(n), chosen)
            idx = int(unused[0])
        else:
            idx = int(np.searchsorted(np.cumsum(d2), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        chosen.append(idx)
        d2 = np.minimum(d2, ((X - X[idx]) ** 2).sum(axis=1))
    return X[chosen].copy()


def kmeans(X: np.ndarray, k: int, seed: int = 0, max_iter: int = 300):
    """Lloyd's algorithm. Returns (labels, centres, sse_history)."""
    n = X.shape[0]
    rng = np.random.default_rng(seed)
    C = _init_plus_plus(X, k, rng)
    labels = None
    history = []
    for _ in range(max_iter):
        D = _sq_dist(X, C)
        new = D.argmin(axis=1)
        history.append(float(D[np.arange(n), new].sum()))
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for j in range(k):
            members = labels == j
            if members.any():
                C[j] = X[members].mean(axis=0)
        # empty clusters: move centre to the point farthest from its own centre
        for j in range(k):
            if not (labels == j).any():
                own = ((X - C[labels]) ** 2).sum(axis=1)
                far = int(np.argmax(own))
                log.debug("empty cluster %d re-seeded from day %d", j, far)
                C[j] = X[far]
    # duplicate days can leave a re-seeded centre tied and empty; force one member
    for j in range(k):
        if not (labels == j).any():
            sizes = np.bincount(labels, minlength=k)
            own = ((X - C[labels]) ** 2).sum(axis=1)
            own[sizes[labels] < 2] = -1.0
            far = int(np.argmax(own))
            labels[far] = j
            C[j] = X[far]
    return labels, C, history


def reduce(bundle: Mapping[str, np.ndarray], k: int = DEFAULT_K, seed: int = 0) -> Reduction:
    names = sorted(bundle)
    for name in names:
        if np.asarray(bundle[name]).shape != (DAYS * HOURS_PER_DAY,):
            raise ValueError(f"series {name!r} must have {DAYS * HOURS_PER_DAY} hourly values")
    if not 1 <= k <= DAYS:
        raise ValueError(f"k must be in [1, {DAYS}]")

    X = _features(bundle, names)
    if k == DAYS:
        labels = np.arange(DAYS)
        C = X.copy()
        history = [0.0]
    else:
        labels, C, history = kmeans(X, k, seed)

    medoids = []
    for j in range(k):
        members = np.flatnonzero(labels == j)
        d = ((X[members] - C[j]) ** 2).sum(axis=1)
        medoids.append((int(members[int(np.argmin(d))]), j))
    medoids.sort()  # chronological period order
    remap = {j: pid for pid, (_, j) in enumerate(medoids)}
    day_map = np.array([remap[j] for j in labels])

    raw = {n: np.asarray(bundle[n], dtype=float).reshape(DAYS, HOURS_PER_DAY) for n in names}
    weights = np.bincount(day_map, minlength=k)
    scale = {}
    for n in names:
        rep_total = sum(weights[pid] * raw[n][day].sum() for pid, (day, _) in enumerate(medoids))
        orig = raw[n].sum()
        # identity reduction: the ratio is 1 up to summation order, keep it exact
        scale[n] = orig / rep_total if rep_total > 0 and k < DAYS else 1.0

    periods = []
    for pid, (day, _) in enumerate(medoids):
        periods.append(
            RepresentativePeriod(
                period_id=pid,
                weight=int(weights[pid]),
                day=day,
                slices={n: raw[n][day] * scale[n] for n in names},
            )
        )
    assert int(weights.sum()) == DAYS
    return Reduction(periods, day_map, scale, history)


def _safe(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in name)


def write_reduction(out_dir, red: Reduction) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [out_dir / "periods.csv", out_dir / "day_map.csv"]
    with open(paths[0], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["period_id", "weight", "medoid_day"])
        for p in red.periods:
            w.writerow([p.period_id, p.weight, p.day])
    with open(paths[1], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["day", "period_id"])
        for d, pid in enumerate(red.day_map):
            w.writerow([d, int(pid)])
    names = sorted(red.periods[0].slices) if red.periods else []
    for name in names:
        p = out_dir / f"slices_{_safe(name)}.csv"
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["period_id", "hour", "value"])
            for per in red.periods:
                for h, v in enumerate(per.slices[name]):
                    w.writerow([per.period_id, h, repr(float(v))])
        paths.append(p)
    return paths
