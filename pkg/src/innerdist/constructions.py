"""Generators for the counterexample geometries.

Two families of scenes are produced here:

* the planar comb domain, an infinite chain of teeth accumulating at the
  origin, truncated at ``n_levels`` and modeled as one simple channel polygon
  (slit obstacles in a box would let boundary-grazing paths run along the
  floor through the tooth valleys, which a pairwise visibility graph cannot
  forbid, so the channel polygon is the faithful stand-in);

* the wedge segment family ``floor((2*pi)**j)`` rays per level with radii
  ``[2**-j, 11 * 2**-j]``, the spiral strips obtained by winding each segment
  around the wedge axis, and their projected trapezia.

Coil counts come from a certified labyrinth search (double then bisect); the
spiral pitch is chosen per strip so that the direction bands of distinct
strips stay disjoint, which guarantees the strips themselves are disjoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import channel
from .errors import ParameterError
from .geometry import WEDGE_ANGLE, Polyline, Trapezium, WedgeFrame
from .scenes import Disk, Scene2D

DEFAULT_SAMPLES_PER_COIL = 64
DEFAULT_COIL_MARGIN = 0.05
LABYRINTH_BOUND = 10.0
SHRINK_CAP = 0.125  # total radius shrink <= rho0/8, comfortably below rho0/4


# ---------------------------------------------------------------------------
# comb domain
# ---------------------------------------------------------------------------


@dataclass
class CombDomain:
    """Truncated comb: four indexed segment families plus the fixed segment.

    Family ranges at truncation ``n``: diagonals and both upper families use
    indices ``1..n``; the vertical teeth use ``2..n+1`` so the lower chain
    closes at the deepest valley.  Consecutive chain segments share
    endpoints; no two segments cross.
    """

    n_levels: int
    diagonals: np.ndarray       # (1/n, 1/n) -> (1/(n+1), 0)
    teeth: np.ndarray           # (1/n, 1/n) -> (1/n, 0)
    upper_steep: np.ndarray     # (1/n, 2/n) -> (4/(4n+3), 2/(4n+3))
    upper_shallow: np.ndarray   # (1/(n+1), 2/(n+1)) -> (4/(4n+3), 2/(4n+3))
    fixed: np.ndarray           # (1, 2) -> (1, 1)

    def all_segments(self) -> np.ndarray:
        return np.vstack(
            [
                self.diagonals,
                self.teeth,
                self.upper_steep,
                self.upper_shallow,
                self.fixed[None, :, :],
            ]
        )


def generate_comb(n_levels: int) -> CombDomain:
    if n_levels < 1:
        raise ParameterError("comb truncation must be >= 1")
    n = np.arange(1, n_levels + 1, dtype=float)
    diag = np.stack(
        [
            np.column_stack([1.0 / n, 1.0 / n]),
            np.column_stack([1.0 / (n + 1), np.zeros_like(n)]),
        ],
        axis=1,
    )
    nt = np.arange(2, n_levels + 2, dtype=float)
    teeth = np.stack(
        [
            np.column_stack([1.0 / nt, 1.0 / nt]),
            np.column_stack([1.0 / nt, np.zeros_like(nt)]),
        ],
        axis=1,
    )
    dip = np.column_stack([4.0 / (4 * n + 3), 2.0 / (4 * n + 3)])
    steep = np.stack([np.column_stack([1.0 / n, 2.0 / n]), dip], axis=1)
    shallow = np.stack(
        [np.column_stack([1.0 / (n + 1), 2.0 / (n + 1)]), dip], axis=1
    )
    fixed = np.array([[1.0, 2.0], [1.0, 1.0]])
    return CombDomain(n_levels, diag, teeth, steep, shallow, fixed)


def comb_channel_polygon(n_levels: int) -> np.ndarray:
    """The comb interior as one simple polygon (the corridor between the
    lower sawtooth and the upper zigzag, closed across the deepest tooth)."""
    comb = generate_comb(n_levels)
    n = n_levels
    verts = [(1.0, 1.0)]
    for m in range(1, n + 1):
        verts.append((1.0 / (m + 1), 0.0))
        if m < n:
            verts.append((1.0 / (m + 1), 1.0 / (m + 1)))
    # walk up the deepest tooth, then close to the deepest upper dip
    verts.append((1.0 / (n + 1), 1.0 / (n + 1)))
    verts.append((4.0 / (4 * n + 3), 2.0 / (4 * n + 3)))
    for m in range(n, 1, -1):
        verts.append((1.0 / m, 2.0 / m))
        verts.append((4.0 / (4 * (m - 1) + 3), 2.0 / (4 * (m - 1) + 3)))
    verts.append((1.0, 2.0))
    poly = np.array(verts)
    assert len(poly) == 4 * n + 1
    _ = comb  # generated for its invariants; the polygon edges are the same segments
    return poly


def comb_scene(n_levels: int) -> Scene2D:
    return Scene2D(ambient=comb_channel_polygon(n_levels), name=f"comb-{n_levels}")


def comb_probe_point(n_levels: int) -> np.ndarray:
    """Interior point in the deepest pinch of the truncated comb, halfway
    between the lowest diagonal and the deepest upper dip."""
    n = n_levels
    return np.array([4.0 / (4 * n + 3), 1.5 / (4 * n + 3)])


COMB_EXIT = np.array([1.0, 1.0])


# ---------------------------------------------------------------------------
# wedge segment family
# ---------------------------------------------------------------------------


def rays_per_level(j: int) -> int:
    return int(math.floor((2 * math.pi) ** j))


@dataclass
class SegmentFamily:
    """Indexed radial blockers: level ``j`` has ``floor((2*pi)**j)`` segments
    on rays ``phi = k * (2*pi)**-j * pi/6`` with radii ``[2**-j, 11*2**-j]``."""

    levels: int
    segments: dict = field(default_factory=dict)  # (j, k) -> (2, 2) array

    def angle(self, j: int, k: int) -> float:
        return k * (2 * math.pi) ** (-j) * (math.pi / 6)

    def all_segments(self) -> np.ndarray:
        return np.array([self.segments[key] for key in sorted(self.segments)])

    def keys(self):
        return sorted(self.segments)

    def ray_tangents(self) -> list:
        """tan(phi) of every ray, ascending; used for pitch selection."""
        return sorted(math.tan(self.angle(j, k)) for j, k in self.segments)


def generate_family(levels: int) -> SegmentFamily:
    if levels < 1:
        raise ParameterError("family truncation must be >= 1")
    fam = SegmentFamily(levels)
    for j in range(1, levels + 1):
        r_in = 2.0 ** (-j)
        for k in range(1, rays_per_level(j) + 1):
            phi = fam.angle(j, k)
            u = np.array([math.cos(phi), math.sin(phi)])
            fam.segments[(j, k)] = np.array([r_in * u, 11.0 * r_in * u])
    return fam


DISK_FACTOR = 1.25
"""Origin disk radius as a multiple of the deepest level's inner radius.

A disk of exactly ``2**-J`` touches the deepest segment endpoints, and under
the grazing semantics of the oracle a path could slip through the contact
points; covering them strictly seals the truncation while staying far below
the next level's dip radius (any factor < 5.5 models the untruncated tail).
"""


def family_scene(levels: int) -> Scene2D:
    """Wedge triangle (scale 4) with the truncated family and the origin disk
    standing in for the untruncated tail."""
    fam = generate_family(levels)
    return Scene2D(
        ambient=WedgeFrame.triangle(4.0),
        obstacles=fam.all_segments(),
        disk=Disk((0.0, 0.0), DISK_FACTOR * 2.0 ** (-levels)),
        name=f"family-{levels}",
    )


def layer_radii(j: int) -> tuple:
    return 4.0 * 2.0 ** (-j), 8.0 * 2.0 ** (-j)


# ---------------------------------------------------------------------------
# spirals and strips
# ---------------------------------------------------------------------------


def choose_pitch(rho0: float, coils: int, shrink: float = SHRINK_CAP) -> float:
    """Spiral pitch parameter so the total radius shrink is ``shrink*rho0``.

    The default cap gives ``rho0 / (16*pi*coils)``; strip generation passes a
    smaller shrink whenever a neighbouring ray sits close below.
    """
    if coils < 1:
        raise ParameterError("coil count must be >= 1")
    if not 0 < shrink <= 0.25:
        raise ParameterError("shrink must lie in (0, 0.25]")
    return shrink * rho0 / (2 * math.pi * coils)


def shrink_for_ray(tan_phi: float, all_tangents) -> float:
    """Largest safe radius-shrink fraction for the strip on ray ``tan_phi``.

    The strip sweeps the direction band ``[(1-s)*tan_phi, tan_phi]``; keeping
    half the gap to the next ray below makes all bands, hence all strips and
    trapezia, pairwise disjoint.
    """
    below = [t for t in all_tangents if t < tan_phi * (1 - 1e-12)]
    if not below:
        return SHRINK_CAP
    return min(SHRINK_CAP, 0.5 * (1.0 - max(below) / tan_phi))


def generate_spiral(
    j: int,
    k: int,
    coils: int,
    eps: float,
    samples_per_coil: int = DEFAULT_SAMPLES_PER_COIL,
) -> Polyline:
    """In-plane spiral polyline for strip ``(j, k)`` in its own transverse
    plane, starting at the segment's inner endpoint."""
    fam = SegmentFamily(j)
    phi = fam.angle(j, k)
    rho0 = 2.0 ** (-j) * math.sin(phi)
    return Polyline(channel.spiral_points(rho0, eps, coils, samples_per_coil))


@dataclass
class SpiralStrip:
    """One winding ribbon: the radial segment swept along its spiral."""

    j: int
    k: int
    coils: int
    eps: float
    shrink: float
    phi: float
    rho0: float
    axial: float
    samples_per_coil: int
    plane_pts: np.ndarray  # (n, 2) spiral in the transverse plane
    inner: np.ndarray      # (n, 3) inner edge, |x| ~ 2**-j
    outer: np.ndarray      # (n, 3) outer edge = 11 * inner

    def tan_band(self) -> tuple:
        t = math.tan(self.phi)
        return ((1.0 - self.shrink) * t, t)

    def trapezium(self) -> Trapezium:
        sh = self.shrink * self.rho0
        a, r = self.axial, self.rho0
        return Trapezium(
            inner_start=(a, r),
            outer_start=(11 * a, 11 * r),
            outer_end=(11 * a, 11 * (r - sh)),
            inner_end=(a, r - sh),
        )

    def quads(self):
        """Consecutive segment positions stitched into quad corners."""
        return self.inner[:-1], self.inner[1:], self.outer[1:], self.outer[:-1]


def build_strip(
    j: int,
    k: int,
    coils: int,
    shrink: float,
    samples_per_coil: int = DEFAULT_SAMPLES_PER_COIL,
) -> SpiralStrip:
    fam = SegmentFamily(j)
    phi = fam.angle(j, k)
    r = 2.0 ** (-j)
    rho0 = r * math.sin(phi)
    axial = r * math.cos(phi)
    eps = choose_pitch(rho0, coils, shrink)
    pts = channel.spiral_points(rho0, eps, coils, samples_per_coil)
    inner = np.column_stack([np.full(len(pts), axial), pts[:, 0], pts[:, 1]])
    outer = 11.0 * inner
    return SpiralStrip(
        j=j,
        k=k,
        coils=coils,
        eps=eps,
        shrink=shrink,
        phi=phi,
        rho0=rho0,
        axial=axial,
        samples_per_coil=samples_per_coil,
        plane_pts=pts,
        inner=inner,
        outer=outer,
    )


def certified_labyrinth_length(
    rho0: float,
    coils: int,
    shrink: float,
    samples_per_coil: int = DEFAULT_SAMPLES_PER_COIL,
    iters: int = 1,
) -> float:
    """Certified lower bound on any through-path of the labyrinth: funnel
    length minus both gate lengths, minus the chord-sampling budget.

    One endpoint pass suffices for certification (optimizing the endpoints
    along the gates changes the length by less than the subtracted gate
    lengths); the verifier re-runs with full endpoint iteration.
    """
    eps = choose_pitch(rho0, coils, shrink)
    pts = channel.spiral_points(rho0, eps, coils, samples_per_coil)
    gd = channel.gate_to_gate(pts, samples_per_coil, iters=iters)
    return gd.lower_bound * (1.0 - channel.chord_shortfall(samples_per_coil))


def choose_coil_count(
    rho0: float,
    shrink: float,
    margin: float = DEFAULT_COIL_MARGIN,
    samples_per_coil: int = DEFAULT_SAMPLES_PER_COIL,
    target: float = LABYRINTH_BOUND,
) -> int:
    """Smallest coil count whose certified through-path length reaches
    ``target*(1+margin)``: doubling search then integer bisection."""
    if margin <= 0:
        raise ParameterError("margin must be positive")
    need = target * (1.0 + margin)

    @lru_cache(maxsize=None)
    def certified(m: int) -> float:
        return certified_labyrinth_length(rho0, m, shrink, samples_per_coil)

    # the through-path hugs the inner coil walls, so its length is close to
    # 2*pi*rho_mean*(coils-1); seed the bracket there and fall back to doubling
    est = 1 + int(need / (2 * math.pi * rho0 * (1.0 - 0.5 * shrink)))
    lo, hi = None, None
    if est >= 3:
        lo0, hi0 = max(2, int(0.8 * est)), int(1.3 * est) + 2
        if certified(lo0) < need <= certified(hi0):
            lo, hi = lo0, hi0
    if lo is None:
        m = 2
        while certified(m) < need:
            m *= 2
            if m > 1 << 22:
                raise ParameterError("labyrinth bound unreachable; check parameters")
        lo, hi = m // 2, m
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if certified(mid) >= need:
            hi = mid
        else:
            lo = mid
    return hi


def generate_strips(
    levels: int,
    margin: float = DEFAULT_COIL_MARGIN,
    samples_per_coil: int = DEFAULT_SAMPLES_PER_COIL,
):
    """All strips for ``j <= levels``; returns (strips, family).

    Per strip the coil count is certified against the labyrinth bound and the
    pitch keeps direction bands disjoint.
    """
    fam = generate_family(levels)
    tangents = fam.ray_tangents()
    strips = []
    for j, k in fam.keys():
        phi = fam.angle(j, k)
        rho0 = 2.0 ** (-j) * math.sin(phi)
        shrink = shrink_for_ray(math.tan(phi), tangents)
        coils = choose_coil_count(rho0, shrink, margin, samples_per_coil)
        strips.append(build_strip(j, k, coils, shrink, samples_per_coil))
    return strips, fam


def strips_disjoint(strips) -> bool:
    """Direction bands are nested inside disjoint ray gaps, so pairwise
    disjointness reduces to non-overlap of the (tan lo, tan hi) intervals."""
    bands = sorted(s.tan_band() for s in strips)
    return all(hi < bands[i + 1][0] for i, (lo, hi) in enumerate(bands[:-1]))


def strips_scene(
    levels: int,
    margin: float = DEFAULT_COIL_MARGIN,
    samples_per_coil: int = DEFAULT_SAMPLES_PER_COIL,
):
    """Spatial scene with all strips for ``j <= levels``: the truncated cone
    minus the origin ball that seals the untruncated tail."""
    from .search3d import Scene3D

    strips, fam = generate_strips(levels, margin, samples_per_coil)
    scene = Scene3D(strips=strips, ball_radius=DISK_FACTOR * 2.0 ** (-levels))
    return scene, fam
