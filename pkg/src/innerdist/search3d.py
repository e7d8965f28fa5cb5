"""Spatial scene with strip obstacles and the upper-bound path search.

The search is explicitly an upper-bound tool: multi-start vertex descent with
a clearance constraint against a conservative proxy of the strip surfaces
(dense surface samples in a KD-tree, so a sample-clearance threshold of
``clear + 1.25*h`` certifies true clearance ``clear``).  It is never used to
establish lower bounds; those come from the planar reduction.  Fixed seeds
make every search reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import ParameterError
from .geometry import WEDGE_ANGLE, Polyline, WedgeFrame
from .scenes import points_in_polygon

ENDPOINT_A = np.array([1.0, 0.0, 0.0])
ENDPOINT_D = np.array([math.cos(WEDGE_ANGLE), math.sin(WEDGE_ANGLE), 0.0])


@dataclass
class Scene3D:
    """Truncated cone minus an origin ball, with winding strip obstacles."""

    strips: list
    ball_radius: float
    cone_scale: float = 4.0
    half_angle: float = WEDGE_ANGLE
    proxy_resolution: float = 0.05
    _tree: object = field(default=None, repr=False)

    def endpoints(self):
        return ENDPOINT_A.copy(), ENDPOINT_D.copy()

    # -- ambient -------------------------------------------------------------

    def in_ambient(self, pts: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        rad = np.linalg.norm(pts, axis=1)
        perp = np.hypot(pts[:, 1], pts[:, 2])
        ang = np.arctan2(perp, pts[:, 0])
        ok = (rad >= self.ball_radius - tol) & (ang <= self.half_angle + tol)
        proj = np.column_stack([pts[:, 0], perp])
        ok &= points_in_polygon(proj, WedgeFrame.triangle(self.cone_scale), eps=tol)
        return ok

    def clamp_ambient(self, p: np.ndarray) -> np.ndarray:
        """Pull a point into the ambient: cap the axis angle, then scale the
        radius into [ball, cone cap] (the truncated cone is star-shaped from
        the apex, so radial scaling stays inside)."""
        p = np.asarray(p, dtype=float).copy()
        perp = math.hypot(p[1], p[2])
        ang = math.atan2(perp, p[0])
        if ang > self.half_angle:
            r = float(np.linalg.norm(p))
            az = math.atan2(p[2], p[1])
            s, c = math.sin(self.half_angle), math.cos(self.half_angle)
            p = r * np.array([c, s * math.cos(az), s * math.sin(az)])
        r = float(np.linalg.norm(p))
        if r < self.ball_radius:
            p *= (self.ball_radius * 1.0000001) / max(r, 1e-300)
        for _ in range(64):
            proj = np.array([[p[0], math.hypot(p[1], p[2])]])
            if bool(points_in_polygon(proj, WedgeFrame.triangle(self.cone_scale))[0]):
                break
            p *= 0.97
        return p

    # -- strip clearance -------------------------------------------------------

    def _surface_samples(self) -> np.ndarray:
        h = self.proxy_resolution
        chunks = []
        for s in self.strips:
            psi_max = 2 * math.pi * s.coils
            base = 2.0 ** (-s.j)
            n_lam = max(2, int(math.ceil(10.0 * base / h)) + 1)
            for lam in np.linspace(1.0, 11.0, n_lam):
                dpsi = h / max(lam * s.rho0, 1e-12)
                n_psi = max(2, int(math.ceil(psi_max / dpsi)) + 1)
                psi = np.linspace(0.0, psi_max, n_psi)
                rho = s.rho0 - s.eps * psi
                chunks.append(
                    np.column_stack(
                        [
                            np.full(n_psi, lam * s.axial),
                            lam * rho * np.cos(psi),
                            lam * rho * np.sin(psi),
                        ]
                    )
                )
        if not chunks:
            return np.zeros((0, 3))
        return np.vstack(chunks)

    def proxy_tree(self):
        if self._tree is None and self.strips:
            self._tree = cKDTree(self._surface_samples())
        return self._tree

    def proxy_clearance(self, pts: np.ndarray) -> float:
        """Distance to the nearest surface sample (>= true distance, and at
        most ``0.71 * proxy_resolution`` above it)."""
        tree = self.proxy_tree()
        if tree is None:
            return math.inf
        d, _ = tree.query(np.atleast_2d(pts), k=1)
        return float(np.min(d))

    def exact_clearance(self, pts: np.ndarray) -> float:
        """Exact distance from points to the stored quad meshes."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        best = math.inf
        for s in self.strips:
            lo = np.minimum(s.inner.min(axis=0), s.outer.min(axis=0)) - best
            hi = np.maximum(s.inner.max(axis=0), s.outer.max(axis=0)) + best
            if math.isfinite(best):
                sel = np.all((pts >= lo) & (pts <= hi), axis=1)
                if not np.any(sel):
                    continue
                sub = pts[sel]
            else:
                sub = pts
            a, b, c, d = s.quads()
            for tri in ((a, b, c), (a, c, d)):
                dist = _points_to_triangles_min(sub, *tri)
                best = min(best, float(dist))
        return best


def _points_to_triangles_min(pts, t0, t1, t2, chunk: int = 32) -> float:
    """min over points and triangles of the exact point-triangle distance."""
    best = math.inf
    for i in range(0, len(pts), chunk):
        p = pts[i : i + chunk]
        d = _point_triangle_distance(p[:, None, :], t0[None], t1[None], t2[None])
        best = min(best, float(np.min(d)))
    return best


def _point_triangle_distance(p, a, b, c):
    """Exact distances, broadcast over (points, triangles)."""
    ab = b - a
    ac = c - a
    ap = p - a
    d1 = np.einsum("...i,...i->...", ab, ap)
    d2 = np.einsum("...i,...i->...", ac, ap)
    bp = p - b
    d3 = np.einsum("...i,...i->...", ab, bp)
    d4 = np.einsum("...i,...i->...", ac, bp)
    cp = p - c
    d5 = np.einsum("...i,...i->...", ab, cp)
    d6 = np.einsum("...i,...i->...", ac, cp)
    va = d3 * d6 - d5 * d4
    vb = d5 * d2 - d1 * d6
    vc = d1 * d4 - d3 * d2
    denom = np.maximum(va + vb + vc, 1e-300)
    v = np.clip(vb / denom, 0.0, 1.0)
    w = np.clip(vc / denom, 0.0, 1.0)
    # region tests per Ericson; clamp to edges where needed
    closest = a + v[..., None] * ab + w[..., None] * ac
    # vertex/edge regions
    m1 = (d1 <= 0) & (d2 <= 0)
    m2 = (d3 >= 0) & (d4 <= d3)
    m3 = (d6 >= 0) & (d5 <= d6)
    e_ab = np.clip(np.where(d1 - d3 != 0, d1 / np.where(d1 - d3 == 0, 1, d1 - d3), 0), 0, 1)
    m4 = (vc <= 0) & (d1 >= 0) & (d3 <= 0)
    e_ac = np.clip(np.where(d2 - d6 != 0, d2 / np.where(d2 - d6 == 0, 1, d2 - d6), 0), 0, 1)
    m5 = (vb <= 0) & (d2 >= 0) & (d6 <= 0)
    e_bc = np.clip(
        np.where((d4 - d3) + (d5 - d6) != 0, (d4 - d3) / np.where((d4 - d3) + (d5 - d6) == 0, 1.0, (d4 - d3) + (d5 - d6)), 0),
        0,
        1,
    )
    m6 = (va <= 0) & ((d4 - d3) >= 0) & ((d5 - d6) >= 0)
    closest = np.where(m6[..., None], b + e_bc[..., None] * (c - b), closest)
    closest = np.where(m5[..., None], a + e_ac[..., None] * ac, closest)
    closest = np.where(m4[..., None], a + e_ab[..., None] * ab, closest)
    closest = np.where(m3[..., None], c, closest)
    closest = np.where(m2[..., None], b, closest)
    closest = np.where(m1[..., None], a, closest)
    return np.linalg.norm(p - closest, axis=-1)


# ---------------------------------------------------------------------------
# upper-bound search
# ---------------------------------------------------------------------------


@dataclass
class SearchResult:
    best_length: float          # inf when no feasible path was found
    best_path: Polyline | None
    restarts: int
    n_feasible: int
    n_failures: int
    lengths: list


def _resample(pts: np.ndarray, n: int) -> np.ndarray:
    poly = Polyline(pts)
    s = np.linspace(0.0, poly.length, n)
    return np.array([poly.point_at(si) for si in s])


def _segment_samples(pts: np.ndarray, spacing: float) -> np.ndarray:
    return Polyline(pts).resample(spacing)


class _PathProblem:
    def __init__(self, scene: Scene3D, clear: float):
        self.scene = scene
        h = scene.proxy_resolution
        self.spacing = max(h, 1e-3)
        self.threshold = clear + 1.25 * h

    def feasible(self, pts: np.ndarray) -> bool:
        samples = _segment_samples(pts, self.spacing)
        if not bool(np.all(self.scene.in_ambient(samples))):
            return False
        return self.scene.proxy_clearance(samples) >= self.threshold

    def length(self, pts: np.ndarray) -> float:
        return float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))


def _random_waypoint(scene: Scene3D, rng) -> np.ndarray:
    ang = rng.uniform(0.0, scene.half_angle)
    az = rng.normal(0.0, 0.7)
    rad = rng.uniform(scene.ball_radius * 1.5, scene.cone_scale * 0.9)
    p = rad * np.array(
        [math.cos(ang), math.sin(ang) * math.cos(az), math.sin(ang) * math.sin(az)]
    )
    return scene.clamp_ambient(p)


def _repair(problem: _PathProblem, pts: np.ndarray, rng, iters: int = 80):
    scene = problem.scene
    tree = scene.proxy_tree()
    for _ in range(iters):
        if problem.feasible(pts):
            return pts
        if tree is None:
            return None
        moved = pts.copy()
        d, idx = tree.query(pts[1:-1], k=1)
        push = problem.threshold * 1.5 - d
        need = push > 0
        if np.any(need):
            near = tree.data[idx[need]]
            vec = pts[1:-1][need] - near
            norms = np.maximum(np.linalg.norm(vec, axis=1, keepdims=True), 1e-12)
            jitter = rng.normal(scale=0.1 * problem.threshold, size=vec.shape)
            moved[1:-1][need] = pts[1:-1][need] + vec / norms * push[need][:, None] + jitter
        for i in range(1, len(moved) - 1):
            moved[i] = scene.clamp_ambient(moved[i])
        if np.allclose(moved, pts):
            return None
        pts = moved
    return None


def _shorten(problem: _PathProblem, pts: np.ndarray, iters: int):
    scene = problem.scene
    best = problem.length(pts)
    for sweep in range(iters):
        improved = False
        for i in range(1, len(pts) - 1):
            target = 0.5 * (pts[i - 1] + pts[i + 1])
            for step in (1.0, 0.5, 0.25):
                cand = pts.copy()
                cand[i] = scene.clamp_ambient((1 - step) * pts[i] + step * target)
                seg = cand[max(0, i - 1) : i + 2]
                if problem.feasible(seg):
                    newlen = problem.length(cand)
                    if newlen < best - 1e-12:
                        pts, best = cand, newlen
                        improved = True
                        break
        if not improved:
            break
    return pts, best


def upper_bound_search(
    scene: Scene3D,
    a=None,
    b=None,
    restarts: int = 64,
    seed: int = 0,
    n_vertices: int = 33,
    iters: int = 40,
    clear: float = 0.01,
) -> SearchResult:
    """Best feasible polyline found over seeded multi-start local shortening.

    Not guaranteed globally minimal; restarts that cannot be repaired into
    feasibility are counted as failures, not errors.
    """
    if restarts < 1:
        raise ParameterError("need at least one restart")
    a = ENDPOINT_A if a is None else np.asarray(a, dtype=float)
    b = ENDPOINT_D if b is None else np.asarray(b, dtype=float)
    problem = _PathProblem(scene, clear)
    best_len, best_path = math.inf, None
    lengths = []
    n_feasible = n_failures = 0
    for r in range(restarts):
        rng = np.random.default_rng(1_000_003 * seed + r)
        if r == 0:
            init = np.vstack([a, 0.5 * (a + b), b])
        else:
            n_via = int(rng.integers(1, 5))
            vias = [_random_waypoint(scene, rng) for _ in range(n_via)]
            init = np.vstack([a, *vias, b])
        init = _resample(init, n_vertices)
        for i in range(1, len(init) - 1):
            init[i] = scene.clamp_ambient(init[i])
        path = _repair(problem, init, rng)
        if path is None:
            n_failures += 1
            continue
        path, plen = _shorten(problem, path, iters)
        n_feasible += 1
        lengths.append(plen)
        if plen < best_len:
            best_len, best_path = plen, Polyline(path)
    return SearchResult(
        best_length=best_len,
        best_path=best_path,
        restarts=restarts,
        n_feasible=n_feasible,
        n_failures=n_failures,
        lengths=sorted(lengths),
    )
