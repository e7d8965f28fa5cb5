"""Interior-approximation metric on planar scenes and geodesic extraction.

The distance between two points of the closed domain is the limit of exact
shortest-path lengths between interior representatives pushed to clearance
``delta`` from the obstacle set, along a geometrically decreasing offset
schedule.  Two genuinely interior query points skip the schedule: one oracle
call is already exact.  The reported value is the minimum over the converged
tail of the schedule, a finite surrogate for the limit-inferior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NotConvergedError, UnreachableError
from .geometry import Polyline
from .scenes import Scene2D
from .visibility import VisibilityOracle

DEFAULT_TOL = 1e-7


def default_schedule(scene: Scene2D, count: int = 28, factor: float = 0.5) -> list:
    d0 = scene.scale() / 64.0
    return [d0 * factor**m for m in range(count)]


def displace_to_clearance(scene: Scene2D, p, delta: float):
    """Nearest point (among a deterministic direction/radius fan) that sits in
    the ambient with obstacle clearance >= delta.  Ties break toward the
    ambient centroid.  Returns None when no candidate qualifies."""
    p = np.asarray(p, dtype=float).reshape(2)
    if scene.obstacle_clearance(p) >= delta and bool(scene.in_ambient(p)[0]):
        return p
    toward = scene.centroid() - p
    nt = np.linalg.norm(toward)
    toward = toward / nt if nt > 0 else np.array([1.0, 0.0])
    best = None
    best_key = None
    angles = np.linspace(0.0, 2 * math.pi, 48, endpoint=False)
    dirs = np.column_stack([np.cos(angles), np.sin(angles)])
    for mult in (1.0, 1.3, 1.8, 2.5, 3.5, 5.0, 8.0):
        cands = p + delta * mult * dirs
        ok = scene.in_ambient(cands)
        for c in cands[ok]:
            if scene.obstacle_clearance(c) >= delta * 0.999:
                key = (float(np.linalg.norm(c - p)), -float((c - p) @ toward))
                if best_key is None or key < best_key:
                    best, best_key = c, key
        if best is not None:
            return best
    return None


@dataclass
class MetricEstimate:
    """A distance value with its offset schedule and convergence evidence."""

    x: np.ndarray
    y: np.ndarray
    offsets: list = field(default_factory=list)
    lengths: list = field(default_factory=list)
    value: float = math.inf
    converged: bool = False
    tol: float = DEFAULT_TOL
    finest_path: Polyline | None = None
    witnesses: tuple | None = None  # interior representatives at the finest level

    def table(self) -> list:
        return list(zip(self.offsets, self.lengths))


def intrinsic_distance(
    scene: Scene2D,
    x,
    y,
    schedule: list | None = None,
    tol: float = DEFAULT_TOL,
    oracle: VisibilityOracle | None = None,
) -> MetricEstimate:
    """Interior-path distance between two points of the closed domain."""
    x = np.asarray(x, dtype=float).reshape(2)
    y = np.asarray(y, dtype=float).reshape(2)
    if np.linalg.norm(x - y) <= 1e-12:
        return MetricEstimate(x, y, value=0.0, converged=True, tol=tol)
    oracle = oracle or VisibilityOracle(scene)
    if scene.obstacle_clearance(x) > 0 and scene.obstacle_clearance(y) > 0:
        res = oracle.shortest(x, y)
        return MetricEstimate(
            x,
            y,
            offsets=[0.0],
            lengths=[res.length],
            value=res.length,
            converged=True,
            tol=tol,
            finest_path=res.polyline,
            witnesses=(x, y),
        )
    schedule = schedule or default_schedule(scene)
    offsets, lengths = [], []
    finest_path = None
    witnesses = None
    converged_at = None
    for m, delta in enumerate(schedule):
        xm = displace_to_clearance(scene, x, delta)
        ym = displace_to_clearance(scene, y, delta)
        if xm is None or ym is None:
            L = math.inf
        else:
            try:
                res = oracle.shortest(xm, ym)
                L = res.length
                finest_path = res.polyline
                witnesses = (xm, ym)
            except UnreachableError:
                L = math.inf
        offsets.append(delta)
        lengths.append(L)
        if m > 0 and math.isfinite(L) and math.isfinite(lengths[m - 1]):
            if abs(L - lengths[m - 1]) <= tol * max(1.0, abs(L)):
                converged_at = m
                break
    finite = [L for L in lengths if math.isfinite(L)]
    if converged_at is not None:
        value = min(lengths[converged_at - 1 :])
        converged = True
    elif not finite:
        value, converged = math.inf, False
    else:
        value, converged = min(finite), False
    return MetricEstimate(
        x,
        y,
        offsets=offsets,
        lengths=lengths,
        value=value,
        converged=converged,
        tol=tol,
        finest_path=finest_path,
        witnesses=witnesses,
    )


@dataclass
class Geodesic:
    """Shortest curve between two points, parametrized on [0, L] so that the
    parameter difference of two samples equals their distance."""

    path: Polyline
    total: float
    witnesses: tuple | None

    def point_at(self, s: float) -> np.ndarray:
        u = min(max(s / self.total, 0.0), 1.0)
        return self.path.point_at(u * self.path.length)


def geodesic(
    scene: Scene2D,
    x,
    y,
    schedule: list | None = None,
    tol: float = DEFAULT_TOL,
    oracle: VisibilityOracle | None = None,
) -> Geodesic:
    est = intrinsic_distance(scene, x, y, schedule, tol, oracle)
    if not est.converged or not math.isfinite(est.value):
        raise NotConvergedError(
            f"distance between {x} and {y} did not converge (value={est.value})"
        )
    if est.finest_path is None:
        raise NotConvergedError("no admissible path recorded for the geodesic")
    return Geodesic(path=est.finest_path, total=est.value, witnesses=est.witnesses)


def additivity_deviation(
    scene: Scene2D,
    geo: Geodesic,
    grid: int = 10,
    oracle: VisibilityOracle | None = None,
) -> dict:
    """Largest deviation of sampled pair distances from the parameter gap,
    and the largest one-sided excess (distance above the gap)."""
    oracle = oracle or VisibilityOracle(scene)
    ss = np.linspace(0.0, geo.total, grid)
    worst = 0.0
    worst_excess = -math.inf
    for i in range(grid):
        for j in range(i + 1, grid):
            s, t = float(ss[i]), float(ss[j])
            ps, pt = geo.point_at(s), geo.point_at(t)
            if np.linalg.norm(ps - pt) <= 1e-12:
                d = 0.0
            else:
                d = oracle.shortest(ps, pt).length
            worst = max(worst, abs(d - (t - s)))
            worst_excess = max(worst_excess, d - (t - s))
    return {"max_abs_deviation": worst, "max_excess": worst_excess}


def fragment_convergence(
    scene: Scene2D,
    x,
    y,
    schedule: list | None = None,
    tol: float = DEFAULT_TOL,
    grid: int = 5,
    oracle: VisibilityOracle | None = None,
) -> dict:
    """Per-fragment lengths of the offset paths, reparametrized on the common
    interval [0, L]: each fragment's length is (t-s) * L_m / L, so the table
    converges to the parameter gap exactly when the schedule converges.

    Also reports the largest fragment excess over its parameter gap at the
    finest level (the one-sided estimate that survives in the limit).
    """
    est = intrinsic_distance(scene, x, y, schedule, tol, oracle)
    if not math.isfinite(est.value) or est.value <= 0:
        raise NotConvergedError("fragment convergence needs a finite positive distance")
    L = est.value
    ss = np.linspace(0.0, L, grid)
    rows = []
    finite = [(d, Lm) for d, Lm in zip(est.offsets, est.lengths) if math.isfinite(Lm)]
    for delta, Lm in finite:
        ratio = Lm / L
        frag = [(float(t - s), float((t - s) * ratio)) for s in ss for t in ss if t > s]
        max_err = max(abs(f - g) for g, f in frag) if frag else 0.0
        max_excess = max(f - g for g, f in frag) if frag else 0.0
        rows.append(
            {"offset": delta, "length": Lm, "max_err": max_err, "max_excess": max_excess}
        )
    finest = rows[-1] if rows else None
    return {
        "estimate": est,
        "rows": rows,
        "converged": est.converged and finest is not None and finest["max_err"] <= tol * max(1.0, L),
        "max_excess": finest["max_excess"] if finest else math.inf,
    }
