"""Planar reduction of spatial strip-avoiding paths.

A spatial path is rotated into the wedge plane (1-Lipschitz, so the image is
never longer), and every fragment that crosses a strip's trapezium is
rerouted along the trapezium boundary.  Because a short strip-avoiding path
can only meet a trapezium through its two short parallel sides or along a
leg, the boundary walk costs at most 5/2 of the fragment it replaces; a
fragment joining the two opposite legs would certify that the original path
wound through every coil, so it is rejected as a precondition violation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import ConeFrame, Polyline, Trapezium

LEG_SIDES = (0, 2)      # start leg and end leg of Trapezium.sides()
REROUTE_FACTOR = 2.5


def project_path(path, frame: ConeFrame | None = None, step: float = 1e-3) -> np.ndarray:
    """Rotate a spatial polyline into the wedge plane, resampled so the
    curved images of straight segments are followed to within ``step``."""
    frame = frame or ConeFrame()
    poly = path if isinstance(path, Polyline) else Polyline(path)
    pts = poly.resample(step)
    flat = frame.project_many(pts)
    keep = np.concatenate([[True], np.linalg.norm(np.diff(flat, axis=0), axis=1) > 1e-15])
    return flat[keep]


def _segment_quad_clip(p: np.ndarray, q: np.ndarray, trap: Trapezium):
    """Parameter interval [t0, t1] of the part of [p, q] inside the convex
    trapezium, with the sides crossed at entry and exit; None when disjoint."""
    c = trap.corners()
    x, y = c[:, 0], c[:, 1]
    area2 = float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
    sign = 1.0 if area2 >= 0 else -1.0
    t0, t1 = 0.0, 1.0
    side_in, side_out = None, None
    d = q - p
    for i, (a, b) in enumerate(trap.sides()):
        e = b - a
        # signed distance growth along the segment w.r.t. side i
        denom = sign * (e[0] * d[1] - e[1] * d[0])
        num = sign * (e[0] * (p[1] - a[1]) - e[1] * (p[0] - a[0]))
        if abs(denom) < 1e-300:
            if num < 0:
                return None
            continue
        t_hit = -num / denom
        if denom > 0:
            if t_hit > t0:
                t0, side_in = t_hit, i
        else:
            if t_hit < t1:
                t1, side_out = t_hit, i
    if t0 >= t1 - 1e-15:
        return None
    return t0, t1, side_in, side_out


@dataclass
class TrapCrossing:
    trap_index: int
    enter_param: float   # global polyline parameter (vertex index + fraction)
    exit_param: float
    enter_point: np.ndarray
    exit_point: np.ndarray
    enter_side: int | None
    exit_side: int | None
    fragment_length: float


def find_crossing(poly2: np.ndarray, trap: Trapezium, index: int = 0) -> TrapCrossing | None:
    """First entry to last exit of the plane curve w.r.t. one trapezium."""
    first = last = None
    n = len(poly2)
    for i in range(n - 1):
        clip = _segment_quad_clip(poly2[i], poly2[i + 1], trap)
        if clip is None:
            continue
        t0, t1, side_in, side_out = clip
        if first is None:
            first = (i + t0, poly2[i] + t0 * (poly2[i + 1] - poly2[i]), side_in)
        if t1 < 1.0 - 1e-12 or i == n - 2:
            last = (i + t1, poly2[i] + t1 * (poly2[i + 1] - poly2[i]), side_out)
        else:
            last = (i + t1, poly2[i + 1], side_out)
    if first is None or last is None:
        return None
    if first[2] is None or last[2] is None:
        raise DomainError("curve starts or ends inside a trapezium")
    frag_len = _param_length(poly2, first[0], last[0])
    return TrapCrossing(
        trap_index=index,
        enter_param=first[0],
        exit_param=last[0],
        enter_point=first[1],
        exit_point=last[1],
        enter_side=first[2],
        exit_side=last[2],
        fragment_length=frag_len,
    )


def _param_length(poly2: np.ndarray, s: float, t: float) -> float:
    steps = np.linalg.norm(np.diff(poly2, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(steps)])

    def at(u):
        i = int(min(len(steps) - 1, math_floor(u)))
        return cum[i] + (u - i) * steps[i]

    return float(at(t) - at(s))


def math_floor(x: float) -> int:
    return int(np.floor(x))


def _point_at_param(poly2: np.ndarray, u: float) -> np.ndarray:
    i = int(min(len(poly2) - 2, math_floor(u)))
    t = u - i
    return (1 - t) * poly2[i] + t * poly2[i + 1]


@dataclass
class RerouteReport:
    crossing: TrapCrossing
    walk_length: float
    factor: float


def reroute(poly2: np.ndarray, traps: list) -> tuple[np.ndarray, list]:
    """Replace every trapezium-crossing fragment by its shorter boundary walk.

    Raises when a fragment joins the two opposite legs (the original spatial
    path would have had to wind through every coil) or when fragments of
    distinct trapezia overlap.
    """
    crossings = []
    for idx, trap in enumerate(traps):
        cr = find_crossing(poly2, trap, idx)
        if cr is not None:
            crossings.append(cr)
    crossings.sort(key=lambda c: c.enter_param)
    for prev, nxt in zip(crossings[:-1], crossings[1:]):
        if nxt.enter_param < prev.exit_param - 1e-12:
            raise DomainError("interleaved trapezium crossings; cannot reroute")
    out = [poly2[0]]
    reports = []
    cursor = 0.0
    for cr in crossings:
        if set((cr.enter_side, cr.exit_side)) == set(LEG_SIDES):
            raise DomainError(
                "fragment joins the two opposite legs: the spatial path must "
                "have wound through all coils, violating the length bound"
            )
        i0 = math_floor(cursor) + 1
        i1 = math_floor(cr.enter_param) + 1
        out.extend(poly2[i0:i1])
        out.append(cr.enter_point)
        trap = traps[cr.trap_index]
        walk, wlen = trap.perimeter_walk(
            cr.enter_point, cr.enter_side, cr.exit_point, cr.exit_side
        )
        out.extend(walk[1:])
        cursor = cr.exit_param
        factor = wlen / cr.fragment_length if cr.fragment_length > 1e-15 else 1.0
        reports.append(RerouteReport(cr, wlen, factor))
    i0 = math_floor(cursor) + 1
    out.extend(poly2[i0:])
    arr = np.array(out)
    keep = np.concatenate([[True], np.linalg.norm(np.diff(arr, axis=0), axis=1) > 1e-15])
    return arr[keep], reports
