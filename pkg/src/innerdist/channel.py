"""Exact shortest paths through a sampled spiral labyrinth.

The corridor between consecutive coils of an inward Archimedean spiral is a
simply connected ladder of convex quads, so the taut path between the
entrance gate (outermost rung) and the exit gate (innermost rung) is found by
a funnel sweep over the rung/diagonal portal sequence in linear time.  This
replaces the quadratic visibility graph, which is infeasible at hundreds of
coils; agreement between the two is covered by tests on small spirals.

Gate-to-gate distance is computed by iterating perpendicular-foot updates of
the two endpoints (geodesic length in a simply connected polygon is convex
along each gate).  A certified lower bound subtracts both gate lengths, since
the geodesic distance is 1-Lipschitz in each endpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .geometry import Polyline, segment_segment_distance


def spiral_points(rho0: float, eps: float, coils: int, samples_per_coil: int) -> np.ndarray:
    """Inward Archimedean spiral sampled as a chord polyline.

    Polar radius ``rho0 - eps * psi`` for ``psi in [0, 2*pi*coils]``; raises
    if the radius would reach zero.
    """
    if coils < 1:
        raise ParameterError("coil count must be >= 1")
    if samples_per_coil < 64:
        raise ParameterError("need at least 64 samples per coil")
    if eps < 0 or eps * 2 * math.pi * coils >= rho0:
        raise ParameterError("spiral radius would reach zero before the last coil")
    psi = np.linspace(0.0, 2 * math.pi * coils, coils * samples_per_coil + 1)
    rho = rho0 - eps * psi
    return np.column_stack([rho * np.cos(psi), rho * np.sin(psi)])


def spiral_gates(pts: np.ndarray, spc: int):
    """Entrance and exit rungs: first-coil and last-coil radial gaps."""
    n = len(pts)
    k = n - 1 - spc
    g1 = (pts[0].copy(), pts[spc].copy())
    g2 = (pts[k].copy(), pts[n - 1].copy())
    return g1, g2


def spiral_channel_polygon(pts: np.ndarray, spc: int) -> np.ndarray:
    """The corridor between consecutive coils as one simple polygon: outer
    wall, exit gate, inner wall reversed, entrance gate."""
    n = len(pts)
    k = n - 1 - spc
    if k <= 0:
        raise ParameterError("spiral too short to enclose a corridor")
    return np.vstack([pts[: k + 1], pts[spc:n][::-1]])


def _tri2(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _veq(a, b) -> bool:
    return a[0] == b[0] and a[1] == b[1]


def funnel_path(lefts, rights, s, t) -> list:
    """Taut path from ``s`` through the portal sequence to ``t``.

    ``lefts[i]``/``rights[i]`` are the portal endpoints seen from the walking
    direction; consecutive portals must share an endpoint.
    """
    L = [np.asarray(s, dtype=float)] + [np.asarray(p, dtype=float) for p in lefts]
    R = [np.asarray(s, dtype=float)] + [np.asarray(p, dtype=float) for p in rights]
    tt = np.asarray(t, dtype=float)
    L.append(tt)
    R.append(tt)
    path = [np.asarray(s, dtype=float)]
    apex, apex_i = L[0], 0
    pl, li = L[0], 0
    pr, ri = R[0], 0
    i = 1
    n = len(L)
    while i < n:
        l, r = L[i], R[i]
        if _tri2(apex, pr, r) >= 0.0:
            # new right endpoint narrows the funnel, or crosses the left chain
            if _veq(apex, pr) or _tri2(apex, pl, r) < 0.0:
                pr, ri = r, i
            else:
                path.append(pl)
                apex, apex_i = pl, li
                pl, pr, li, ri = apex, apex, apex_i, apex_i
                i = apex_i + 1
                continue
        if _tri2(apex, pl, l) <= 0.0:
            if _veq(apex, pl) or _tri2(apex, pr, l) > 0.0:
                pl, li = l, i
            else:
                path.append(pr)
                apex, apex_i = pr, ri
                pl, pr, li, ri = apex, apex, apex_i, apex_i
                i = apex_i + 1
                continue
        i += 1
    path.append(tt)
    out = [path[0]]
    for p in path[1:]:
        if not _veq(out[-1], p):
            out.append(p)
    return out


def _channel_portals(pts: np.ndarray, spc: int):
    """Alternating rung/diagonal portals strictly between the two gates.

    The spiral winds counterclockwise inward, so the inner wall (one coil
    ahead) is always on the walker's left.
    """
    n = len(pts)
    k = n - 1 - spc
    lefts, rights = [], []
    for m in range(k - 1):
        # diagonal of quad m, then the next rung
        lefts.append(pts[m + spc])
        rights.append(pts[m + 1])
        lefts.append(pts[m + 1 + spc])
        rights.append(pts[m + 1])
    lefts.append(pts[k - 1 + spc])
    rights.append(pts[k])
    return lefts, rights


def _foot(p: np.ndarray, gate) -> np.ndarray:
    a, b = gate
    d = b - a
    t = float(np.clip((p - a) @ d / max(d @ d, 1e-300), 0.0, 1.0))
    return a + t * d


def _path_length(path) -> float:
    arr = np.asarray(path)
    return float(np.sum(np.linalg.norm(np.diff(arr, axis=0), axis=1)))


@dataclass
class GateDistance:
    measured: float
    lower_bound: float
    entry: np.ndarray
    exit: np.ndarray
    path: Polyline | None


def gate_to_gate(pts: np.ndarray, spc: int, iters: int = 10) -> GateDistance:
    """Shortest connection between the entrance and exit gates that avoids the
    sampled spiral."""
    n = len(pts)
    k = n - 1 - spc
    if k <= 0:
        z = pts[0]
        return GateDistance(0.0, 0.0, z, z, None)
    g1, g2 = spiral_gates(pts, spc)
    if k == spc:
        # single-coil corridor: the gates share the rung between them
        z = pts[spc]
        return GateDistance(0.0, 0.0, z, z, None)
    lefts, rights = _channel_portals(pts, spc)
    s = 0.5 * (g1[0] + g1[1])
    t = 0.5 * (g2[0] + g2[1])
    path = None
    length = math.inf
    for _ in range(iters):
        path = funnel_path(lefts, rights, s, t)
        length = _path_length(path)
        if len(path) == 2:
            d, ps, qs = segment_segment_distance(g1[0], g1[1], g2[0], g2[1])
            gate_len = float(np.linalg.norm(g1[1] - g1[0]) + np.linalg.norm(g2[1] - g2[0]))
            return GateDistance(d, max(0.0, d - gate_len), ps, qs, Polyline([ps, qs]))
        s2 = _foot(path[1], g1)
        t2 = _foot(path[-2], g2)
        if np.linalg.norm(s2 - s) + np.linalg.norm(t2 - t) < 1e-13:
            s, t = s2, t2
            break
        s, t = s2, t2
    path = funnel_path(lefts, rights, s, t)
    length = _path_length(path)
    gate_len = float(np.linalg.norm(g1[1] - g1[0]) + np.linalg.norm(g2[1] - g2[0]))
    return GateDistance(
        measured=length,
        lower_bound=max(0.0, length - gate_len),
        entry=s,
        exit=t,
        path=Polyline(path) if len(path) >= 2 else None,
    )


def chord_shortfall(samples_per_coil: int) -> float:
    """Relative length deficit of a chord-sampled circle vs. the arc."""
    h = math.pi / samples_per_coil
    return 1.0 - math.sin(h) / h
