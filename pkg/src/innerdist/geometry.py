"""Planar and spatial primitives: points, polylines, polar frames, the
rotation-into-plane projection for cones, and trapezium geometry.

Everything here is plain float64 and pure; robustness tolerances live in the
shortest-path oracles, not in these primitives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegeneratePointError, DomainError, ParameterError

WEDGE_ANGLE = math.pi / 6
"""Opening angle between the two unit rays spanning every wedge scene."""


def _require_finite(*vals: float) -> None:
    for v in vals:
        if not math.isfinite(v):
            raise ParameterError(f"coordinate {v!r} is not finite")


@dataclass(frozen=True)
class Point2:
    """Immutable planar point with finite coordinates."""

    x: float
    y: float

    def __post_init__(self) -> None:
        _require_finite(self.x, self.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)


@dataclass(frozen=True)
class Point3:
    """Immutable spatial point with finite coordinates."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        _require_finite(self.x, self.y, self.z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class PolarPoint:
    """Polar coordinates within a declared angular frame: radius >= 0 and an
    angle in radians measured from the frame's zero ray."""

    r: float
    phi: float

    def __post_init__(self) -> None:
        _require_finite(self.r, self.phi)
        if self.r < 0:
            raise ParameterError(f"polar radius must be >= 0, got {self.r}")


def as_xy(p) -> np.ndarray:
    """Accept Point2, tuples or arrays and return a (2,) float array."""
    if isinstance(p, Point2):
        return p.as_array()
    a = np.asarray(p, dtype=float)
    if a.shape != (2,):
        raise ParameterError(f"expected a planar point, got shape {a.shape}")
    return a


def as_xyz(p) -> np.ndarray:
    if isinstance(p, Point3):
        return p.as_array()
    a = np.asarray(p, dtype=float)
    if a.shape != (3,):
        raise ParameterError(f"expected a spatial point, got shape {a.shape}")
    return a


class WedgeFrame:
    """Polar frame of the planar wedge with apex at the origin.

    The zero ray points toward ``(1, 0)`` and angles increase toward the
    second unit ray at ``WEDGE_ANGLE``; all generated scenes live in this
    frame.
    """

    span = WEDGE_ANGLE

    @staticmethod
    def ray_a() -> np.ndarray:
        return np.array([1.0, 0.0])

    @staticmethod
    def ray_d() -> np.ndarray:
        return np.array([math.cos(WEDGE_ANGLE), math.sin(WEDGE_ANGLE)])

    @classmethod
    def triangle(cls, scale: float = 1.0) -> np.ndarray:
        """Vertices of the dilated wedge triangle, counterclockwise."""
        return np.array([[0.0, 0.0], scale * cls.ray_a(), scale * cls.ray_d()])

    @classmethod
    def to_polar(cls, p) -> PolarPoint:
        """Polar coordinates of ``p``; raises on the apex itself."""
        a = as_xy(p)
        r = float(np.hypot(a[0], a[1]))
        if r == 0.0:
            raise DegeneratePointError("polar coordinates undefined at the apex")
        return PolarPoint(r, float(math.atan2(a[1], a[0])))

    @classmethod
    def from_polar(cls, pp: PolarPoint) -> np.ndarray:
        return np.array([pp.r * math.cos(pp.phi), pp.r * math.sin(pp.phi)])


@dataclass(frozen=True)
class ConeFrame:
    """Rotation frame of the cone obtained by spinning the wedge around its
    zero ray.  The apex sits at the origin and the axis is the +x direction;
    the half-angle equals the wedge angle."""

    half_angle: float = WEDGE_ANGLE

    def axis(self) -> np.ndarray:
        return np.array([1.0, 0.0, 0.0])

    def angle_from_axis(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        perp = np.hypot(pts[:, 1], pts[:, 2])
        return np.arctan2(perp, pts[:, 0])

    def contains(self, pts: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        """True where points lie in the closed cone (excluding the apex)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        nonzero = np.linalg.norm(pts, axis=1) > 0
        return nonzero & (self.angle_from_axis(pts) <= self.half_angle + tol)

    def project(self, p) -> np.ndarray:
        """Rotate an in-cone point about the axis into the wedge plane.

        Preserves the norm and the distance to the axis; fixes the wedge
        plane (z = 0, y >= 0) pointwise.
        """
        a = as_xyz(p)
        n = float(np.linalg.norm(a))
        if n == 0.0:
            raise DegeneratePointError("projection undefined at the cone apex")
        if not bool(self.contains(a)[0]):
            raise DomainError(f"point {a.tolist()} lies outside the cone")
        return np.array([a[0], math.hypot(a[1], a[2])])

    def project_many(self, pts: np.ndarray, check: bool = True) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if check and not bool(np.all(self.contains(pts))):
            raise DomainError("some points lie outside the cone")
        return np.column_stack([pts[:, 0], np.hypot(pts[:, 1], pts[:, 2])])


def rotate_about_x(pts: np.ndarray, angle: float) -> np.ndarray:
    """Rotate points about the +x axis; used to build and test cone scenes."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    c, s = math.cos(angle), math.sin(angle)
    out = pts.copy()
    out[:, 1] = c * pts[:, 1] - s * pts[:, 2]
    out[:, 2] = s * pts[:, 1] + c * pts[:, 2]
    return out


class Polyline:
    """Finite path through >= 2 vertices with its chord-sum length and a
    monotone arc-length parametrization."""

    def __init__(self, vertices) -> None:
        arr = np.asarray(vertices, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 2 or arr.shape[1] not in (2, 3):
            raise ParameterError(f"polyline needs an (n>=2, 2|3) array, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ParameterError("polyline vertices must be finite")
        steps = np.linalg.norm(np.diff(arr, axis=0), axis=1)
        if np.any(steps == 0.0):
            raise ParameterError("consecutive polyline vertices must be distinct")
        self.vertices = arr
        self._steps = steps

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @cached_property
    def cumulative(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self._steps)])

    @property
    def length(self) -> float:
        return float(self.cumulative[-1])

    def point_at(self, s: float) -> np.ndarray:
        """Point at arc length ``s`` (clamped to the parameter range)."""
        cum = self.cumulative
        s = min(max(s, 0.0), cum[-1])
        i = int(np.searchsorted(cum, s, side="right") - 1)
        i = min(i, len(self._steps) - 1)
        t = (s - cum[i]) / self._steps[i]
        return (1 - t) * self.vertices[i] + t * self.vertices[i + 1]

    def concat(self, other: "Polyline") -> "Polyline":
        """Join two polylines whose endpoints chain."""
        if self.dim != other.dim:
            raise ParameterError("cannot concatenate polylines of mixed dimension")
        if not np.allclose(self.vertices[-1], other.vertices[0], atol=1e-12):
            raise ParameterError("polylines do not chain at a common endpoint")
        return Polyline(np.vstack([self.vertices, other.vertices[1:]]))

    def resample(self, spacing: float) -> np.ndarray:
        """Vertices plus intermediate samples so no step exceeds ``spacing``."""
        if spacing <= 0:
            raise ParameterError("resample spacing must be positive")
        chunks = []
        for i, step in enumerate(self._steps):
            n = max(1, int(math.ceil(step / spacing)))
            t = np.linspace(0.0, 1.0, n, endpoint=False)[:, None]
            chunks.append((1 - t) * self.vertices[i] + t * self.vertices[i + 1])
        chunks.append(self.vertices[-1:])
        return np.vstack(chunks)


def polyline_length(p) -> float:
    """Chord-sum length of a polyline or an (n, d) vertex array."""
    if isinstance(p, Polyline):
        return p.length
    return Polyline(p).length


def segment_point_distance(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances from points to the closed segment [a, b], vectorized."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    a = np.asarray(a, dtype=float)
    d = np.asarray(b, dtype=float) - a
    denom = float(d @ d)
    if denom == 0.0:
        return np.linalg.norm(pts - a, axis=1)
    t = np.clip((pts - a) @ d / denom, 0.0, 1.0)
    proj = a + t[:, None] * d
    return np.linalg.norm(pts - proj, axis=1)


def segment_segment_distance(p1, q1, p2, q2):
    """Distance between two planar segments and the realizing points."""
    p1, q1, p2, q2 = (np.asarray(v, dtype=float) for v in (p1, q1, p2, q2))
    best = (math.inf, None, None)
    n = 17
    ts = np.linspace(0.0, 1.0, n)
    pts1 = p1 + ts[:, None] * (q1 - p1)
    pts2 = p2 + ts[:, None] * (q2 - p2)
    d12 = segment_point_distance(pts1, p2, q2)
    i = int(np.argmin(d12))
    if d12[i] < best[0]:
        t = np.clip((pts1[i] - p2) @ (q2 - p2) / max((q2 - p2) @ (q2 - p2), 1e-300), 0, 1)
        best = (float(d12[i]), pts1[i], p2 + t * (q2 - p2))
    d21 = segment_point_distance(pts2, p1, q1)
    j = int(np.argmin(d21))
    if d21[j] < best[0]:
        t = np.clip((pts2[j] - p1) @ (q1 - p1) / max((q1 - p1) @ (q1 - p1), 1e-300), 0, 1)
        best = (float(d21[j]), p1 + t * (q1 - p1), pts2[j])
    return best


@dataclass(frozen=True)
class Trapezium:
    """Planar trapezium traced by a strip's projection into the wedge plane.

    Corners in cyclic order: ``inner_start`` (start ray, inner radius),
    ``outer_start`` (start ray, outer), ``outer_end`` (end ray, outer),
    ``inner_end`` (end ray, inner).  The inner and outer sides joining the
    rays are parallel and perpendicular to the wedge's zero ray.
    """

    inner_start: tuple
    outer_start: tuple
    outer_end: tuple
    inner_end: tuple

    def corners(self) -> np.ndarray:
        return np.array(
            [self.inner_start, self.outer_start, self.outer_end, self.inner_end],
            dtype=float,
        )

    def sides(self):
        """Cyclic side list: start leg, outer side, end leg, inner side."""
        c = self.corners()
        return [(c[0], c[1]), (c[1], c[2]), (c[2], c[3]), (c[3], c[0])]

    def side_lengths(self) -> np.ndarray:
        return np.array([np.linalg.norm(b - a) for a, b in self.sides()])

    def interior_angle(self, i: int) -> float:
        c = self.corners()
        u = c[(i - 1) % 4] - c[i]
        v = c[(i + 1) % 4] - c[i]
        cosang = float(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)))
        return math.acos(min(1.0, max(-1.0, cosang)))

    def acute_corner_indices(self):
        return [i for i in range(4) if self.interior_angle(i) < math.pi / 2 - 1e-12]

    def contains(self, pts: np.ndarray, tol: float = 0.0) -> np.ndarray:
        """Membership in the closed trapezium (convex; either orientation)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        c = self.corners()
        x = c[:, 0]
        y = c[:, 1]
        area2 = float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
        sign = 1.0 if area2 >= 0 else -1.0
        inside = np.ones(len(pts), dtype=bool)
        for a, b in self.sides():
            cross = (b[0] - a[0]) * (pts[:, 1] - a[1]) - (b[1] - a[1]) * (pts[:, 0] - a[0])
            inside &= sign * cross >= -tol
        return inside

    def perimeter_position(self, p, side: int) -> float:
        """Arc-length position of a boundary point measured from corner 0."""
        cum = np.concatenate([[0.0], np.cumsum(self.side_lengths())])
        a, _ = self.sides()[side]
        return float(cum[side] + np.linalg.norm(np.asarray(p, dtype=float) - a))

    def perimeter_walk(self, p, side_p: int, q, side_q: int):
        """Shorter boundary route from ``p`` on ``side_p`` to ``q`` on
        ``side_q``; returns (vertex list, length)."""
        c = self.corners()
        cum = np.concatenate([[0.0], np.cumsum(self.side_lengths())])
        total = float(cum[-1])
        sp = self.perimeter_position(p, side_p)
        sq = self.perimeter_position(q, side_q)
        fwd = (sq - sp) % total
        bwd = total - fwd
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        if fwd <= bwd:
            verts = [p]
            for t in range(1, 5):
                idx = side_p + t
                pos = cum[idx] if idx <= 4 else cum[idx - 4] + total
                if sp + 1e-15 < pos < sp + fwd - 1e-12:
                    verts.append(c[idx % 4])
            verts.append(q)
            length = fwd
        else:
            verts = [p]
            for t in range(0, 4):
                idx = side_p - t
                pos = cum[idx] if idx >= 0 else cum[idx + 4] - total
                if sp - bwd + 1e-12 < pos < sp - 1e-15:
                    verts.append(c[idx % 4])
            verts.append(q)
            length = bwd
        out = [verts[0]]
        for v in verts[1:]:
            if np.linalg.norm(v - out[-1]) > 1e-15:
                out.append(v)
        return out, float(length)
