"""Exact planar shortest paths among segment obstacles.

The oracle is a visibility graph over obstacle endpoints, ambient polygon
vertices, disk tangent points and the two query points, searched with
Dijkstra.  Free space is the closed ambient polygon minus open obstacle
segments and the open disk; an edge is admissible when it crosses no obstacle
transversally, does not dip into the disk and stays inside the ambient.
Ties in the search are broken by node index, so results are deterministic.

A dense 8-connected grid oracle is provided as an independent cross-check; it
overestimates by at most the usual 8-connectivity distortion (~8.24 %) plus
snapping slack.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnreachableError
from .geometry import Polyline, segment_point_distance
from .scenes import EPS, Scene2D, _proper_cross_mask, points_in_polygon

GRID_DISTORTION = math.cos(math.pi / 8) + (math.sqrt(2) - 1) * math.sin(math.pi / 8)
"""Worst-case 8-connected/Euclidean length ratio (attained at 22.5 deg)."""


@dataclass
class PathResult:
    length: float
    polyline: Polyline | None
    node_indices: list


def _key(p: np.ndarray) -> tuple:
    return (round(float(p[0]), 12), round(float(p[1]), 12))


def _point_to_segments(c: np.ndarray, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Distance from one point to each segment of a batch."""
    d = Q - P
    denom = np.maximum(np.einsum("ij,ij->i", d, d), 1e-300)
    t = np.clip(np.einsum("ij,ij->i", c[None, :] - P, d) / denom, 0.0, 1.0)
    proj = P + t[:, None] * d
    return np.linalg.norm(proj - c[None, :], axis=1)


class VisibilityOracle:
    """Shortest-path oracle for one immutable scene.

    Static geometry (obstacle endpoints, polygon vertices, their pairwise
    visibility) is computed once; each query only adds its two endpoints.
    """

    def __init__(self, scene: Scene2D) -> None:
        self.scene = scene
        self._tol = 1e-9 * max(scene.scale(), 1.0)
        pts = [scene.ambient]
        if len(scene.obstacles):
            ends = scene.obstacles.reshape(-1, 2)
            keep = scene.in_ambient(ends)
            pts.append(ends[keep])
        static = np.vstack(pts)
        # deduplicate while preserving order
        seen: dict[tuple, int] = {}
        rows = []
        for p in static:
            k = _key(p)
            if k not in seen:
                seen[k] = len(rows)
                rows.append(p)
        self._static = np.array(rows)
        self._static_keys = seen
        if scene.disk is not None:
            self._static = np.vstack([self._static, self._static_tangents()])
        self._static_adj: list[list[tuple[int, float]]] | None = None

    # -- disk helpers --------------------------------------------------------

    def _tangents_from(self, p: np.ndarray) -> np.ndarray:
        disk = self.scene.disk
        c, r = disk.center_array(), disk.radius
        d = p - c
        dd = float(np.linalg.norm(d))
        if dd <= r + self._tol:
            return np.zeros((0, 2))
        alpha = math.acos(min(1.0, r / dd))
        base = math.atan2(d[1], d[0])
        ang = np.array([base + alpha, base - alpha])
        return c + r * np.column_stack([np.cos(ang), np.sin(ang)])

    def _static_tangents(self) -> np.ndarray:
        out = [np.zeros((0, 2))]
        for p in self._static:
            out.append(self._tangents_from(p))
        return np.vstack(out)

    def _circle_node_ids(self, nodes: np.ndarray) -> np.ndarray:
        disk = self.scene.disk
        if disk is None:
            return np.zeros(0, dtype=int)
        d = np.linalg.norm(nodes - disk.center_array(), axis=1)
        return np.nonzero(np.abs(d - disk.radius) <= self._tol)[0]

    # -- edge validation -----------------------------------------------------

    def _edges_valid(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        ok = np.ones(len(P), dtype=bool)
        nz = np.linalg.norm(Q - P, axis=1) > EPS
        ok &= nz
        obs = self.scene.obstacles
        if len(obs) and np.any(ok):
            cross = _proper_cross_mask(P[ok], Q[ok], obs[:, 0], obs[:, 1])
            sub = ~np.any(cross, axis=1)
            idx = np.nonzero(ok)[0]
            ok[idx[~sub]] = False
        disk = self.scene.disk
        if disk is not None and np.any(ok):
            idx = np.nonzero(ok)[0]
            d = _point_to_segments(disk.center_array(), P[idx], Q[idx])
            ok[idx[d < disk.radius - self._tol]] = False
        if not self.scene.ambient_convex and np.any(ok):
            idx = np.nonzero(ok)[0]
            a = self.scene.ambient
            b = np.roll(a, -1, axis=0)
            cross = _proper_cross_mask(P[idx], Q[idx], a, b)
            bad = np.any(cross, axis=1)
            ok[idx[bad]] = False
            idx = np.nonzero(ok)[0]
            for i in idx:
                if not self._edge_inside_polygon(P[i], Q[i]):
                    ok[i] = False
        return ok

    def _edge_inside_polygon(self, p: np.ndarray, q: np.ndarray) -> bool:
        """Detailed containment for edges in a nonconvex ambient: between any
        two boundary touches the open edge stays on one side, so testing the
        midpoint of every touch interval is exact."""
        poly = self.scene.ambient
        d = q - p
        L2 = float(d @ d)
        ts = [0.0, 1.0]
        dist = segment_point_distance(poly, p, q)
        for v in poly[dist <= self._tol]:
            ts.append(float(np.clip((v - p) @ d / L2, 0.0, 1.0)))
        ts = sorted(set(round(t, 15) for t in ts))
        mids = [(a + b) / 2 for a, b in zip(ts[:-1], ts[1:]) if b - a > 1e-12]
        if not mids:
            return True
        pts = p[None, :] + np.array(mids)[:, None] * d[None, :]
        return bool(np.all(points_in_polygon(pts, poly, eps=self._tol)))

    # -- graph construction ----------------------------------------------------

    def _build_static_adj(self) -> list[list[tuple[int, float]]]:
        # arc edges along the disk are query-dependent (query tangent points
        # subdivide the circle), so they are added per query, never here
        n = len(self._static)
        iu, ju = np.triu_indices(n, k=1)
        P, Q = self._static[iu], self._static[ju]
        ok = self._edges_valid(P, Q)
        w = np.linalg.norm(Q - P, axis=1)
        adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for i, j, valid, weight in zip(iu, ju, ok, w):
            if valid:
                adj[i].append((int(j), float(weight)))
                adj[j].append((int(i), float(weight)))
        return adj

    def _add_arc_edges(self, adj, nodes) -> None:
        disk = self.scene.disk
        if disk is None:
            return
        ids = self._circle_node_ids(nodes)
        if len(ids) < 2:
            return
        c, r = disk.center_array(), disk.radius
        ang = np.arctan2(nodes[ids, 1] - c[1], nodes[ids, 0] - c[0])
        order = np.argsort(ang, kind="stable")
        ids, ang = ids[order], ang[order]
        for m in range(len(ids)):
            i, j = int(ids[m]), int(ids[(m + 1) % len(ids)])
            if i == j:
                continue
            dth = float(ang[(m + 1) % len(ids)] - ang[m]) if m + 1 < len(ids) else float(
                ang[0] + 2 * math.pi - ang[m]
            )
            if dth <= EPS:
                continue
            if self._arc_clear(float(ang[m]), dth):
                w = r * dth
                adj[i].append((j, w))
                adj[j].append((i, w))

    def _arc_clear(self, theta0: float, dtheta: float) -> bool:
        disk = self.scene.disk
        c, r = disk.center_array(), disk.radius
        n = max(4, int(math.ceil(dtheta / 0.05)))
        th = theta0 + np.linspace(0.0, dtheta, n + 1)
        pts = c + r * np.column_stack([np.cos(th), np.sin(th)])
        if not bool(np.all(points_in_polygon(pts, self.scene.ambient, eps=self._tol))):
            return False
        obs = self.scene.obstacles
        if len(obs):
            cross = _proper_cross_mask(pts[:-1], pts[1:], obs[:, 0], obs[:, 1])
            if np.any(cross):
                return False
        return True

    # -- queries ---------------------------------------------------------------

    def _validate_query_point(self, p: np.ndarray, label: str) -> None:
        if not bool(self.scene.in_ambient(p)[0]):
            raise DomainError(f"query point {label}={p.tolist()} outside the ambient domain")
        for a, b in self.scene.obstacles:
            d = float(segment_point_distance(p[None, :], a, b)[0])
            if d <= EPS * 10:
                near_end = min(np.linalg.norm(p - a), np.linalg.norm(p - b)) <= self._tol
                if not near_end:
                    raise DomainError(
                        f"query point {label} lies on an obstacle's relative interior"
                    )

    def shortest(self, a, b) -> PathResult:
        a = np.asarray(a, dtype=float).reshape(2)
        b = np.asarray(b, dtype=float).reshape(2)
        self._validate_query_point(a, "a")
        self._validate_query_point(b, "b")
        if np.linalg.norm(b - a) <= EPS:
            return PathResult(0.0, None, [])
        if self._static_adj is None:
            self._static_adj = self._build_static_adj()

        extra = [a, b]
        if self.scene.disk is not None:
            extra.extend(self._tangents_from(a))
            extra.extend(self._tangents_from(b))
        extra = np.array(extra)
        nodes = np.vstack([self._static, extra])
        ns = len(self._static)
        adj = [list(nbrs) for nbrs in self._static_adj]
        adj.extend([] for _ in range(len(extra)))
        # edges between new nodes and everything
        new_ids = list(range(ns, ns + len(extra)))
        pairs_i, pairs_j = [], []
        for j in new_ids:
            for i in range(j):
                pairs_i.append(i)
                pairs_j.append(j)
        P = nodes[np.array(pairs_i)]
        Q = nodes[np.array(pairs_j)]
        ok = self._edges_valid(P, Q)
        w = np.linalg.norm(Q - P, axis=1)
        for i, j, valid, weight in zip(pairs_i, pairs_j, ok, w):
            if valid:
                adj[i].append((int(j), float(weight)))
                adj[j].append((int(i), float(weight)))
        if self.scene.disk is not None:
            self._add_arc_edges(adj, nodes)

        src, dst = ns, ns + 1
        dist, pred = _dijkstra(adj, src, dst)
        if not math.isfinite(dist[dst]):
            raise UnreachableError("query points are not connected in the scene")
        seq = [dst]
        while seq[-1] != src:
            seq.append(pred[seq[-1]])
        seq.reverse()
        poly = self._trace_polyline(nodes, seq)
        return PathResult(float(dist[dst]), poly, seq)

    def _is_arc_pair(self, nodes, j) -> bool:
        # static arc edges are rebuilt per query; identifying them exactly is
        # cheaper than tracking, because circle nodes are few
        disk = self.scene.disk
        if disk is None:
            return False
        d = float(np.linalg.norm(nodes[j] - disk.center_array()))
        return abs(d - disk.radius) <= self._tol

    def _trace_polyline(self, nodes, seq) -> Polyline:
        disk = self.scene.disk
        pts = [nodes[seq[0]]]
        for u, v in zip(seq[:-1], seq[1:]):
            p, q = nodes[u], nodes[v]
            if disk is not None and self._is_arc_pair(nodes, u) and self._is_arc_pair(nodes, v):
                c, r = disk.center_array(), disk.radius
                t0 = math.atan2(p[1] - c[1], p[0] - c[0])
                t1 = math.atan2(q[1] - c[1], q[0] - c[0])
                dth = (t1 - t0) % (2 * math.pi)
                if dth > math.pi:
                    dth -= 2 * math.pi
                n = max(2, int(math.ceil(abs(dth) / 0.02)))
                th = t0 + np.linspace(0.0, dth, n + 1)[1:]
                pts.extend(c + r * np.column_stack([np.cos(th), np.sin(th)]))
            else:
                pts.append(q)
        arr = np.array(pts)
        keep = np.concatenate(
            [[True], np.linalg.norm(np.diff(arr, axis=0), axis=1) > EPS]
        )
        return Polyline(arr[keep])


def _dijkstra(adj, src, dst=None):
    n = len(adj)
    dist = np.full(n, math.inf)
    pred = np.full(n, -1, dtype=int)
    dist[src] = 0.0
    heap = [(0.0, src)]
    done = np.zeros(n, dtype=bool)
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        if dst is not None and u == dst:
            break
        for v, w in adj[u]:
            nd = d + w
            if nd < dist[v] - 1e-15:
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, v))
    return dist, pred


def shortest_path(scene: Scene2D, a, b) -> PathResult:
    """One-shot convenience wrapper around :class:`VisibilityOracle`."""
    return VisibilityOracle(scene).shortest(a, b)


# -- grid cross-check oracle ----------------------------------------------------


@dataclass
class GridResult:
    length: float
    polyline: Polyline | None
    snap_a: float
    snap_b: float


def grid_shortest(scene: Scene2D, a, b, resolution: float) -> GridResult:
    """Shortest 8-connected lattice path; independent of the visibility oracle.

    Endpoints snap to the nearest free lattice node; the reported snap
    distances let callers budget the comparison.
    """
    if resolution <= 0:
        raise DomainError("grid resolution must be positive")
    a = np.asarray(a, dtype=float).reshape(2)
    b = np.asarray(b, dtype=float).reshape(2)
    lo, hi = scene.bbox()
    lo = lo - resolution
    hi = hi + resolution
    nx = int(math.ceil((hi[0] - lo[0]) / resolution)) + 1
    ny = int(math.ceil((hi[1] - lo[1]) / resolution)) + 1
    xs = lo[0] + resolution * np.arange(nx)
    ys = lo[1] + resolution * np.arange(ny)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    nodes = np.column_stack([X.ravel(), Y.ravel()])
    free = scene.in_ambient(nodes)
    for s, t in scene.obstacles:
        free &= segment_point_distance(nodes, s, t) > 1e-12

    def node_id(ix, iy):
        return ix * ny + iy

    offsets = [(1, 0), (0, 1), (1, 1), (1, -1)]
    adj: list[list[tuple[int, float]]] = [[] for _ in range(len(nodes))]
    amb_a = scene.ambient
    amb_b = np.roll(amb_a, -1, axis=0)
    for dx, dy in offsets:
        ix = np.arange(max(0, -dx), min(nx, nx - dx))
        iy = np.arange(max(0, -dy), min(ny, ny - dy))
        IX, IY = np.meshgrid(ix, iy, indexing="ij")
        u = node_id(IX.ravel(), IY.ravel())
        v = node_id(IX.ravel() + dx, IY.ravel() + dy)
        ok = free[u] & free[v]
        u, v = u[ok], v[ok]
        if not len(u):
            continue
        P, Q = nodes[u], nodes[v]
        valid = np.ones(len(u), dtype=bool)
        if len(scene.obstacles):
            cross = _proper_cross_mask(P, Q, scene.obstacles[:, 0], scene.obstacles[:, 1])
            valid &= ~np.any(cross, axis=1)
        if scene.disk is not None:
            c = scene.disk.center_array()
            mid = 0.5 * (P + Q)
            near = np.minimum(
                np.minimum(np.linalg.norm(P - c, axis=1), np.linalg.norm(Q - c, axis=1)),
                np.linalg.norm(mid - c, axis=1),
            )
            valid &= near >= scene.disk.radius - 1e-12
        if not scene.ambient_convex:
            cross = _proper_cross_mask(P, Q, amb_a, amb_b)
            valid &= ~np.any(cross, axis=1)
            mid = 0.5 * (P + Q)
            valid &= points_in_polygon(mid, amb_a)
        w = float(math.hypot(dx, dy)) * resolution
        for uu, vv in zip(u[valid], v[valid]):
            adj[uu].append((int(vv), w))
            adj[vv].append((int(uu), w))

    def snap(p):
        d = np.linalg.norm(nodes - p, axis=1)
        d[~free] = math.inf
        i = int(np.argmin(d))
        if not math.isfinite(d[i]):
            raise UnreachableError("no free grid node near the query point")
        return i, float(d[i])

    ia, da = snap(a)
    ib, db = snap(b)
    dist, pred = _dijkstra(adj, ia, ib)
    if not math.isfinite(dist[ib]):
        raise UnreachableError("grid query points are not connected")
    seq = [ib]
    while seq[-1] != ia:
        seq.append(int(pred[seq[-1]]))
    seq.reverse()
    poly = Polyline(nodes[seq]) if len(seq) >= 2 else None
    return GridResult(float(dist[ib]), poly, da, db)
