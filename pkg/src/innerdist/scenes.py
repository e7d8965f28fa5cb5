"""Planar scene model: an ambient simple polygon, disjoint open segment
obstacles and an optional open-disk obstacle at the apex.

Obstacle segments may extend beyond the ambient polygon (the generated
families protrude past the wedge on purpose); only the part reachable from
inside matters for blocking.  All queries treat the ambient as closed and the
obstacles as open: grazing an obstacle endpoint or sliding along the ambient
boundary is admissible, crossing an obstacle's relative interior is not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .geometry import segment_point_distance

EPS = 1e-12


@dataclass(frozen=True)
class Disk:
    center: tuple
    radius: float

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise ParameterError("disk radius must be positive")

    def center_array(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)


def polygon_is_ccw(poly: np.ndarray) -> bool:
    x, y = poly[:, 0], poly[:, 1]
    return float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)) > 0


def polygon_edges(poly: np.ndarray):
    return poly, np.roll(poly, -1, axis=0)


def points_in_polygon(pts: np.ndarray, poly: np.ndarray, eps: float = 1e-9) -> np.ndarray:
    """Closed-polygon membership: boundary points count as inside."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    a, b = polygon_edges(poly)
    on = np.zeros(len(pts), dtype=bool)
    for i in range(len(poly)):
        on |= segment_point_distance(pts, a[i], b[i]) <= eps
    x, y = pts[:, 0][:, None], pts[:, 1][:, None]
    x1, y1 = a[:, 0][None, :], a[:, 1][None, :]
    x2, y2 = b[:, 0][None, :], b[:, 1][None, :]
    cond = (y1 > y) != (y2 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
    crossing = cond & (x < xi)
    inside = np.sum(crossing, axis=1) % 2 == 1
    return inside | on


def polygon_is_convex(poly: np.ndarray, eps: float = 1e-12) -> bool:
    a = poly
    b = np.roll(poly, -1, axis=0)
    c = np.roll(poly, -2, axis=0)
    cross = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    return bool(np.all(cross >= -eps) or np.all(cross <= eps))


def _proper_cross_mask(p: np.ndarray, q: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Strict transversal-crossing mask for edge batch (E,) x segment batch (S,).

    Touching an endpoint or running collinearly does not count: the free
    space is closed along obstacle endpoints and the ambient boundary.
    """
    px, py = p[:, 0][:, None], p[:, 1][:, None]
    qx, qy = q[:, 0][:, None], q[:, 1][:, None]
    ax, ay = a[:, 0][None, :], a[:, 1][None, :]
    bx, by = b[:, 0][None, :], b[:, 1][None, :]
    d1 = (qx - px) * (ay - py) - (qy - py) * (ax - px)
    d2 = (qx - px) * (by - py) - (qy - py) * (bx - px)
    d3 = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    d4 = (bx - ax) * (qy - ay) - (by - ay) * (qx - ax)
    scale_e = np.maximum(np.abs(qx - px) + np.abs(qy - py), 1e-30)
    scale_s = np.maximum(np.abs(bx - ax) + np.abs(by - ay), 1e-30)
    t1 = EPS * scale_e * (np.abs(ax) + np.abs(ay) + np.abs(px) + np.abs(py) + 1.0)
    t2 = EPS * scale_s * (np.abs(ax) + np.abs(ay) + np.abs(px) + np.abs(py) + 1.0)
    opp_e = (d1 < -t1) & (d2 > t1) | (d1 > t1) & (d2 < -t1)
    opp_s = (d3 < -t2) & (d4 > t2) | (d3 > t2) & (d4 < -t2)
    return opp_e & opp_s


def segments_properly_disjoint(segs: np.ndarray, allow_shared_endpoints: bool = True) -> bool:
    """True when no two segments cross transversally.  With shared endpoints
    allowed, chained families (for instance a comb boundary) still pass."""
    m = len(segs)
    if m < 2:
        return True
    p, q = segs[:, 0], segs[:, 1]
    cross = _proper_cross_mask(p, q, p, q)
    np.fill_diagonal(cross, False)
    if np.any(cross):
        return False
    if allow_shared_endpoints:
        return True
    ends = segs.reshape(-1, 2)
    for i in range(m):
        d0 = segment_point_distance(ends, p[i], q[i])
        own = np.zeros(len(ends), dtype=bool)
        own[2 * i : 2 * i + 2] = True
        if np.any(d0[~own] <= EPS):
            return False
    return True


@dataclass
class Scene2D:
    """Ambient polygon plus obstacles; the computational stand-in for a
    planar domain whose boundary carries the obstacle set."""

    ambient: np.ndarray
    obstacles: np.ndarray = field(default_factory=lambda: np.zeros((0, 2, 2)))
    disk: Disk | None = None
    name: str = ""

    def __post_init__(self) -> None:
        self.ambient = np.asarray(self.ambient, dtype=float)
        if self.ambient.ndim != 2 or self.ambient.shape[0] < 3 or self.ambient.shape[1] != 2:
            raise ParameterError("ambient must be an (n>=3, 2) polygon")
        if not polygon_is_ccw(self.ambient):
            self.ambient = self.ambient[::-1].copy()
        self.obstacles = np.asarray(self.obstacles, dtype=float).reshape(-1, 2, 2)
        if len(self.obstacles) and not segments_properly_disjoint(self.obstacles):
            raise ParameterError("obstacle segments must not cross each other")
        # The pairwise-visibility oracle cannot express a wall that turns at a
        # shared endpoint; chained boundaries must be modeled as the ambient
        # polygon instead (see the comb generator).
        if len(self.obstacles) and not segments_properly_disjoint(
            self.obstacles, allow_shared_endpoints=False
        ):
            raise ParameterError(
                "obstacle segments must have pairwise disjoint closures; "
                "model chained walls via the ambient polygon"
            )
        self._convex = polygon_is_convex(self.ambient)

    # -- basic metrics -----------------------------------------------------

    def bbox(self) -> np.ndarray:
        return np.array([self.ambient.min(axis=0), self.ambient.max(axis=0)])

    def diameter(self) -> float:
        lo, hi = self.bbox()
        return float(np.linalg.norm(hi - lo))

    def centroid(self) -> np.ndarray:
        return self.ambient.mean(axis=0)

    @property
    def ambient_convex(self) -> bool:
        return self._convex

    # -- membership and clearance ------------------------------------------

    def in_ambient(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        ok = points_in_polygon(pts, self.ambient)
        if self.disk is not None:
            d = np.linalg.norm(pts - self.disk.center_array(), axis=1)
            ok &= d >= self.disk.radius - 1e-12
        return ok

    def obstacle_clearance(self, p) -> float:
        """Distance from a point to the obstacle set (segments and disk).

        The ambient boundary is not an obstacle: the free space is closed and
        paths may run along it.
        """
        p = np.atleast_2d(np.asarray(p, dtype=float))
        best = math.inf
        for a, b in self.obstacles:
            best = min(best, float(segment_point_distance(p, a, b)[0]))
        if self.disk is not None:
            best = min(
                best,
                float(np.linalg.norm(p[0] - self.disk.center_array()) - self.disk.radius),
            )
        return best

    def scale(self) -> float:
        lo, hi = self.bbox()
        return float(max(hi - lo))
