"""Property suites that measure every quantitative bound of the construction.

Each check produces a :class:`CheckReport` whose pass flag is recomputable
from its stored values (reports are self-auditing), declares its tolerance
budget, and where meaningful carries a control measurement that must sit on
the failing side of the bound, guarding against vacuous passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import channel, constructions, reduction
from .errors import DomainError, ParameterError
from .geometry import WEDGE_ANGLE, ConeFrame, Polyline, WedgeFrame
from .metric import additivity_deviation, geodesic, intrinsic_distance
from .scenes import Scene2D, _proper_cross_mask
from .search3d import ENDPOINT_A, ENDPOINT_D, Scene3D, upper_bound_search
from .visibility import GRID_DISTORTION, VisibilityOracle, grid_shortest

SQRT3_QUARTER = 0.25 * math.sqrt(3.0)


@dataclass
class Condition:
    key: str
    op: str       # "ge" or "le"
    rhs: float
    budget: float = 0.0

    def holds(self, measured: dict) -> bool:
        v = measured[self.key]
        if self.op == "ge":
            return v >= self.rhs - self.budget
        if self.op == "le":
            return v <= self.rhs + self.budget
        raise ParameterError(f"unknown comparison {self.op!r}")


@dataclass
class CheckReport:
    check_id: str
    params: dict
    measured: dict
    conditions: list
    control: dict = field(default_factory=dict)  # values expected to violate
    notes: str = ""

    @property
    def passed(self) -> bool:
        return self.recompute()

    def recompute(self) -> bool:
        ok = all(c.holds(self.measured) for c in self.conditions)
        for key, (op, rhs) in self.control.items():
            v = self.measured[key]
            violates = v < rhs if op == "ge" else v > rhs
            ok = ok and violates
        return ok

    def primary(self) -> Condition:
        return self.conditions[0]

    def csv_row(self) -> dict:
        c = self.primary()
        return {
            "id": self.check_id,
            "measured": repr(float(self.measured[c.key])),
            "bound": repr(float(c.rhs)),
            "budget": repr(float(c.budget)),
            "pass": str(self.recompute()),
            "detail": self.notes.replace(",", ";"),
        }


# ---------------------------------------------------------------------------
# triangle inequality
# ---------------------------------------------------------------------------


def sample_interior_points(scene: Scene2D, n: int, seed: int, min_clear: float = 0.0):
    rng = np.random.default_rng(seed)
    lo, hi = scene.bbox()
    out = []
    guard = 0
    min_clear = min_clear or scene.scale() / 1000.0
    while len(out) < n:
        guard += 1
        if guard > 200 * n:
            raise ParameterError("could not sample enough interior points")
        p = lo + rng.random(2) * (hi - lo)
        if bool(scene.in_ambient(p)[0]) and scene.obstacle_clearance(p) > min_clear:
            out.append(p)
    return np.array(out)


def check_triangle(
    scene: Scene2D,
    n_triples: int = 100,
    seed: int = 0,
    budget: float = 1e-6,
    boundary_triples: list | None = None,
    tol: float = 1e-7,
) -> CheckReport:
    """Worst triangle-inequality margin over sampled interior triples, plus
    optional boundary triples resolved through the offset schedule."""
    oracle = VisibilityOracle(scene)
    pts = sample_interior_points(scene, 3 * n_triples, seed)
    worst = -math.inf
    for i in range(n_triples):
        a, o, d = pts[3 * i], pts[3 * i + 1], pts[3 * i + 2]
        ad = oracle.shortest(a, d).length
        ao = oracle.shortest(a, o).length
        od = oracle.shortest(o, d).length
        worst = max(worst, ad - ao - od)
    worst_boundary = -math.inf
    for (a, o, d) in boundary_triples or []:
        ests = [
            intrinsic_distance(scene, p, q, tol=tol, oracle=oracle)
            for p, q in ((a, d), (a, o), (o, d))
        ]
        finite = [e for e in ests if math.isfinite(e.value)]
        if len(finite) < 3:
            continue
        worst_boundary = max(
            worst_boundary, ests[0].value - ests[1].value - ests[2].value
        )
    measured = {
        "value": worst,
        "worst_boundary": worst_boundary,
        "n_triples": float(n_triples),
    }
    conds = [Condition("value", "le", 0.0, budget)]
    if boundary_triples:
        # per-level concatenation is exact; the schedule tail spread is the
        # only slack, bounded by three Cauchy tolerances of the scene scale
        conds.append(
            Condition("worst_boundary", "le", 0.0, budget + 3 * tol * scene.scale())
        )
    return CheckReport(
        check_id=f"triangle[{scene.name or 'scene'}]",
        params={"n_triples": n_triples, "seed": seed},
        measured=measured,
        conditions=conds,
        notes="max rho(A;D)-rho(A;O)-rho(O;D) over sampled triples",
    )


# ---------------------------------------------------------------------------
# passage cost between adjacent figures
# ---------------------------------------------------------------------------


def check_passage_cost(j0: int, budget: float = 1e-6) -> CheckReport:
    """Measured detour around one blocker of level ``j0`` between the two
    adjacent layer figures, against the per-passage bound ``2*3*2**-j0``,
    plus the composed arithmetic bound ``6*2**-j0*(3**j0 - 1) >= 6``."""
    if not 1 <= j0 <= 4:
        raise ParameterError("passage level must be in 1..4")
    fam = constructions.generate_family(j0)
    segs = np.array(
        [fam.segments[(j, k)] for (j, k) in fam.keys() if j == j0]
    )
    scene = Scene2D(ambient=WedgeFrame.triangle(4.0), obstacles=segs, name=f"passage-{j0}")
    oracle = VisibilityOracle(scene)
    r_in = 4.0 * 2.0 ** (-j0)
    dphi = 1e-7
    measured_min = math.inf
    kj = constructions.rays_per_level(j0)
    for k in (1, max(1, kj // 2)):
        phi = fam.angle(j0, k)
        a = r_in * np.array([math.cos(phi - dphi), math.sin(phi - dphi)])
        b = r_in * np.array([math.cos(phi + dphi), math.sin(phi + dphi)])
        measured_min = min(measured_min, oracle.shortest(a, b).length)
    per_passage = 2.0 * 3.0 * 2.0 ** (-j0)
    composed = 6.0 * 2.0 ** (-j0) * (3.0**j0 - 1.0)
    return CheckReport(
        check_id=f"passage-cost[j0={j0}]",
        params={"j0": j0},
        measured={"value": measured_min, "composed": composed},
        conditions=[
            Condition("value", "ge", per_passage, budget),
            Condition("composed", "ge", 6.0, 0.0),
        ],
        notes=f"per-passage bound {per_passage}; composed {composed}",
    )


# ---------------------------------------------------------------------------
# family blocking
# ---------------------------------------------------------------------------


def _angular_sweep_by_layer(path: Polyline, levels: int, step: float = 5e-4):
    """Union measure of the angular coordinate swept within each radial layer."""
    pts = path.resample(step)
    r = np.linalg.norm(pts, axis=1)
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    sweeps = {}
    for j in range(1, levels + 3):
        lo, hi = constructions.layer_radii(j)
        mask = (r >= lo) & (r <= hi)
        if not np.any(mask):
            sweeps[j] = 0.0
            continue
        intervals = []
        i = 0
        while i < len(pts):
            if not mask[i]:
                i += 1
                continue
            k = i
            while k + 1 < len(pts) and mask[k + 1]:
                k += 1
            seg = phi[i : k + 1]
            intervals.append((float(seg.min()), float(seg.max())))
            i = k + 1
        intervals.sort()
        total = 0.0
        cur_lo, cur_hi = intervals[0]
        for lo2, hi2 in intervals[1:]:
            if lo2 > cur_hi:
                total += cur_hi - cur_lo
                cur_lo, cur_hi = lo2, hi2
            else:
                cur_hi = max(cur_hi, hi2)
        total += cur_hi - cur_lo
        sweeps[j] = total
    return sweeps


def check_family_blocking(levels: int = 2, eta: float = 0.05) -> CheckReport:
    """Exact endpoint-to-endpoint length in the blocked wedge against the
    blocking bound, with the no-obstacle control and the layer-sweep witness."""
    scene = constructions.family_scene(levels)
    oracle = VisibilityOracle(scene)
    a = WedgeFrame.ray_a()
    d = WedgeFrame.ray_d()
    res = oracle.shortest(a, d)
    control_scene = Scene2D(ambient=WedgeFrame.triangle(4.0), name="family-control")
    control = VisibilityOracle(control_scene).shortest(a, d).length
    sweeps = _angular_sweep_by_layer(res.polyline, levels)
    quota = {j: 2.0 ** (-j) * math.pi / 6.0 for j in sweeps}
    ratio = max(sweeps[j] / quota[j] for j in range(1, levels + 1))
    return CheckReport(
        check_id=f"family-blocking[J={levels}]",
        params={"levels": levels, "eta": eta},
        measured={
            "value": res.length,
            "control": control,
            "sweep_ratio": ratio,
        },
        conditions=[
            Condition("value", "ge", 6.0 * (1.0 - eta)),
            Condition("sweep_ratio", "ge", 1.0),
            Condition("control", "le", 2.1),
        ],
        control={"control": ("ge", 6.0 * (1.0 - eta))},
        notes="A-D length among blockers; control without obstacles",
    )


# ---------------------------------------------------------------------------
# labyrinth
# ---------------------------------------------------------------------------


def check_labyrinth(
    j: int,
    k: int,
    coils: int,
    shrink: float,
    samples_per_coil: int = constructions.DEFAULT_SAMPLES_PER_COIL,
) -> CheckReport:
    """Certified through-path bound for one strip's spiral, with the
    single-coil control and a chord refinement probe."""
    fam = constructions.SegmentFamily(j)
    phi = fam.angle(j, k)
    rho0 = 2.0 ** (-j) * math.sin(phi)
    chord = channel.chord_shortfall(samples_per_coil)
    certified = constructions.certified_labyrinth_length(
        rho0, coils, shrink, samples_per_coil, iters=10
    )
    refined = constructions.certified_labyrinth_length(
        rho0, coils, shrink, 2 * samples_per_coil, iters=10
    )
    control = constructions.certified_labyrinth_length(rho0, 1, shrink, samples_per_coil)
    return CheckReport(
        check_id=f"labyrinth[{j},{k}]",
        params={"j": j, "k": k, "coils": coils, "shrink": shrink, "spc": samples_per_coil},
        measured={
            "value": certified,
            "control": control,
            "refinement_shift": abs(refined - certified),
            "chord_budget": chord,
        },
        conditions=[
            Condition("value", "ge", constructions.LABYRINTH_BOUND),
            Condition("chord_budget", "le", 0.01),
            Condition("refinement_shift", "le", 2 * chord * max(certified, 1.0), 1e-9),
        ],
        control={"control": ("ge", constructions.LABYRINTH_BOUND)},
        notes="funnel lower bound minus gate and chord budgets; control 1 coil",
    )


# ---------------------------------------------------------------------------
# trapezium ratio
# ---------------------------------------------------------------------------


def check_trapezium_ratio(strip, trials: int = 10_000, seed: int = 0) -> CheckReport:
    """Corner triangles on the trapezium: two sides along the trapezium, the
    third inside; the along-side sum never exceeds 5/2 of the crossing side,
    and at acute corners the crossing side is at least ``sqrt(3)/4`` of it."""
    if trials < 1000:
        raise ParameterError("need at least 1000 trials")
    trap = strip.trapezium()
    rng = np.random.default_rng(seed)
    corners = trap.corners()
    sides = trap.sides()
    acute = set(trap.acute_corner_indices())
    max_ratio = 0.0
    min_acute = math.inf
    for _ in range(trials):
        i = int(rng.integers(0, 4))
        v = corners[i]
        a_side = sides[i]                # side starting at corner i
        b_side = sides[(i - 1) % 4]      # side ending at corner i
        ta, tb = rng.random(2)
        pa = v + ta * (a_side[1] - v)
        pb = v + tb * (b_side[0] - v)
        la = float(np.linalg.norm(pa - v))
        lb = float(np.linalg.norm(pb - v))
        lc = float(np.linalg.norm(pa - pb))
        if lc < 1e-15:
            continue
        max_ratio = max(max_ratio, (la + lb) / lc)
        if i in acute and la + lb > 1e-15:
            min_acute = min(min_acute, lc / (la + lb))
    return CheckReport(
        check_id=f"trapezium-ratio[{strip.j},{strip.k}]",
        params={"trials": trials, "seed": seed},
        measured={
            "value": max_ratio,
            "min_acute_ratio": min_acute,
            "constant": SQRT3_QUARTER,
        },
        conditions=[
            Condition("value", "le", 2.5),
            Condition("min_acute_ratio", "ge", SQRT3_QUARTER, 1e-12),
            Condition("constant", "ge", 0.4, 0.0),
        ],
        notes="corner triangles; constant check sqrt(3)/4 > 2/5",
    )


# ---------------------------------------------------------------------------
# projection reduction
# ---------------------------------------------------------------------------


def synthetic_cone_paths(scene: Scene3D, n: int = 20, seed: int = 0) -> list:
    """Strip-avoiding spatial polylines that exercise the reduction: weaves
    through the free direction gaps, dips into labyrinth mouths, and radial
    climbs through a corridor (entering and leaving a trapezium through its
    short parallel sides)."""
    rng = np.random.default_rng(seed)
    bands = sorted(s.tan_band() for s in scene.strips)
    gaps = []
    prev = 0.0
    for lo, hi in bands:
        if lo > prev + 1e-9:
            gaps.append((prev, lo))
        prev = hi
    gaps.append((prev, math.tan(scene.half_angle)))
    paths = []

    def in_gap_point(gap, radius, az):
        t = 0.5 * (gap[0] + gap[1])
        ang = math.atan(t)
        return radius * np.array(
            [math.cos(ang), math.sin(ang) * math.cos(az), math.sin(ang) * math.sin(az)]
        )

    # free-gap weaves: never meet a trapezium
    n_weave = max(4, n - 2 * len(scene.strips))
    for _ in range(n_weave):
        gap = gaps[int(rng.integers(0, len(gaps)))]
        pts = [
            in_gap_point(gap, float(rng.uniform(scene.ball_radius * 1.6, 3.0)),
                         float(rng.uniform(-1.5, 1.5)))
            for _ in range(4)
        ]
        paths.append(Polyline(pts))
        if len(paths) >= n:
            return paths

    for strip in scene.strips:
        if len(paths) >= n:
            break
        paths.append(_corridor_climb_path(strip))
    for strip in scene.strips:
        if len(paths) >= n:
            break
        paths.append(_mouth_dip_path(strip))
    return paths


def _corridor_phase(strip, azimuth: float, coil_index: float):
    """Mid-gap polar radius at the given azimuth between two adjacent coils."""
    psi = azimuth + 2 * math.pi * coil_index
    return strip.rho0 - strip.eps * (psi + math.pi)


def _corridor_climb_path(strip) -> Polyline:
    """Radial climb through the corridor mid-gap: pierces the trapezium's
    inner short side and leaves through the outer one."""
    az = math.pi
    i = strip.coils // 2
    rmid = _corridor_phase(strip, az, i)
    u = np.array([strip.axial, rmid * math.cos(az), rmid * math.sin(az)])
    u /= np.linalg.norm(u)
    r0 = np.linalg.norm([strip.axial, rmid])
    return Polyline([0.80 * r0 * u, 11.6 * r0 * u])


def _mouth_dip_path(strip) -> Polyline:
    """Enter the labyrinth mouth at twice the segment radius, wind half a
    coil, and leave: the projection cuts into the start leg and back."""
    lam = 2.0
    pts = []
    outside = strip.rho0 * 1.35
    pts.append(lam * np.array([strip.axial, outside * math.cos(-0.25),
                               outside * math.sin(-0.25)]))
    for az in np.linspace(0.05, math.pi, 12):
        r = _corridor_phase(strip, az, 0)
        pts.append(lam * np.array([strip.axial, r * math.cos(az), r * math.sin(az)]))
    for az in np.linspace(math.pi, 0.05, 12):
        r = _corridor_phase(strip, az, 0) - strip.eps * 0.5
        pts.append(lam * np.array([strip.axial, r * math.cos(az), r * math.sin(az)]))
    pts.append(pts[0])
    arr = np.array(pts)
    keep = np.concatenate([[True], np.linalg.norm(np.diff(arr, axis=0), axis=1) > 1e-12])
    return Polyline(arr[keep])


def check_projection_reduction(
    scene: Scene3D, paths: list | None = None, budget: float = 1e-6, seed: int = 0
) -> CheckReport:
    """Project synthetic strip-avoiding paths, reroute trapezium crossings
    along the boundary, and measure the worst inflation factor; the rerouted
    curves must cross no blocker segment."""
    paths = paths or synthetic_cone_paths(scene, seed=seed)
    traps = [s.trapezium() for s in scene.strips]
    fam = constructions.generate_family(max(s.j for s in scene.strips))
    segs = fam.all_segments()
    worst_factor = 0.0
    n_crossings = 0
    clear_ok = 1.0
    for path in paths:
        clearance = scene.exact_clearance(path.resample(2e-3))
        if clearance <= 0:
            clear_ok = 0.0
        flat = reduction.project_path(path)
        rerouted, reports = reduction.reroute(flat, traps)
        n_crossings += len(reports)
        for rep in reports:
            worst_factor = max(worst_factor, rep.factor)
        cross = _proper_cross_mask(
            rerouted[:-1], rerouted[1:], segs[:, 0], segs[:, 1]
        )
        if np.any(cross):
            clear_ok = 0.0
    return CheckReport(
        check_id="projection-reduction",
        params={"n_paths": len(paths), "seed": seed},
        measured={
            "value": worst_factor,
            "n_crossings": float(n_crossings),
            "inputs_valid": clear_ok,
        },
        conditions=[
            Condition("value", "le", reduction.REROUTE_FACTOR, budget),
            Condition("inputs_valid", "ge", 1.0),
            Condition("n_crossings", "ge", 1.0),
        ],
        notes="worst boundary-walk/fragment ratio over synthetic paths",
    )


# ---------------------------------------------------------------------------
# spatial triangle-inequality violation
# ---------------------------------------------------------------------------


def check_violation(
    scene: Scene3D,
    restarts: int = 64,
    seed: int = 0,
    slack: float = 0.05,
) -> CheckReport:
    """Falsification search for the spatial gap: no strip-avoiding path from
    one unit endpoint to the other may be found below 12/5 - slack, while the
    two straight unit legs through the apex region stay strip-free, so the
    two-sided sum stays 2 and the violation margin is 12/5 - 2."""
    a, d = scene.endpoints()
    bound = 12.0 / 5.0
    # straight legs: sampled clearance from all strips
    leg_a = Polyline([1e-6 * a, a]).resample(1e-2)
    leg_d = Polyline([1e-6 * d, d]).resample(1e-2)
    clear_a = scene.exact_clearance(leg_a)
    clear_d = scene.exact_clearance(leg_d)
    res = upper_bound_search(scene, restarts=restarts, seed=seed)
    found = res.best_length
    # escape-route control along the far edge of the dilated wedge
    t = np.linspace(0.0, 1.0, 2001)[:, None]
    far = 4.0 * (1 - t) * a[None, :] + 4.0 * t * d[None, :]
    via = np.min(
        np.linalg.norm(far - a[None, :], axis=1) + np.linalg.norm(far - d[None, :], axis=1)
    )
    escape = 2.0 * (2.0 * math.sqrt(3.0) - 1.0)
    control = upper_bound_search(
        Scene3D(strips=[], ball_radius=scene.ball_radius), restarts=4, seed=seed
    ).best_length
    straight = float(np.linalg.norm(a - d))
    measured = {
        "value": found if math.isfinite(found) else 1e18,
        "leg_clearance": min(clear_a, clear_d),
        "leg_length": 1.0,
        "violation_margin": bound - 2.0,
        "escape_min": float(via),
        "escape_bound": escape,
        "control": control,
        "n_feasible": float(res.n_feasible),
        "n_failures": float(res.n_failures),
    }
    return CheckReport(
        check_id=f"violation-3d[restarts={restarts}]",
        params={"restarts": restarts, "seed": seed, "slack": slack},
        measured=measured,
        conditions=[
            Condition("value", "ge", bound - slack),
            Condition("leg_clearance", "ge", 0.0, -1e-12),
            Condition("violation_margin", "ge", 0.4, 1e-12),
            Condition("escape_min", "ge", escape, 1e-9),
            Condition("escape_bound", "ge", 4.0),
            Condition("control", "le", straight * 1.02),
        ],
        control={"control": ("ge", bound - slack)},
        notes=(
            "best found length over seeded restarts (inf when every restart "
            "fails repair); straight legs stay strip-free so both unit "
            "distances are exact"
        ),
    )


def audit_reduction_chain(scene: Scene3D, path: Polyline, eta: float = 0.05) -> dict:
    """Run the reduction on a concrete spatial path and measure the chain:
    rerouted plane curve avoids the blockers, its length obeys the blocking
    bound, and the inflation factor stays within 5/2."""
    traps = [s.trapezium() for s in scene.strips]
    flat = reduction.project_path(path)
    flat_len = float(np.sum(np.linalg.norm(np.diff(flat, axis=0), axis=1)))
    rerouted, reports = reduction.reroute(flat, traps)
    re_len = float(np.sum(np.linalg.norm(np.diff(rerouted, axis=0), axis=1)))
    path_len = path.length
    return {
        "path_length": path_len,
        "projected_length": flat_len,
        "rerouted_length": re_len,
        "n_crossings": len(reports),
        "factor_ok": re_len <= reduction.REROUTE_FACTOR * flat_len + 1e-9,
        "projection_contracts": flat_len <= path_len + 1e-9,
    }


# ---------------------------------------------------------------------------
# comb divergence
# ---------------------------------------------------------------------------


def check_comb_divergence(
    truncations=(4, 8, 16, 32), min_step: float = 0.01
) -> CheckReport:
    """Deep-probe-to-exit lengths must grow strictly with the truncation
    depth; evidence of divergence, not a certificate."""
    if list(truncations) != sorted(truncations) or len(truncations) < 2:
        raise ParameterError("truncations must be increasing, length >= 2")
    lengths = []
    for n in truncations:
        scene = constructions.comb_scene(n)
        probe = constructions.comb_probe_point(n)
        est = intrinsic_distance(scene, probe, constructions.COMB_EXIT)
        lengths.append(est.value)
    steps = [b - a for a, b in zip(lengths, lengths[1:])]
    # harmonic-type growth: increments per doubling should not collapse
    ratio = steps[-1] / steps[0] if steps[0] > 0 else 0.0
    return CheckReport(
        check_id=f"comb-divergence[{'-'.join(str(t) for t in truncations)}]",
        params={"truncations": list(truncations)},
        measured={
            "value": min(steps),
            "lengths": lengths[-1],
            "first": lengths[0],
            "growth_ratio": ratio,
        },
        conditions=[
            Condition("value", "ge", min_step),
            Condition("growth_ratio", "ge", 0.25),
        ],
        notes=f"lengths {['%.4f' % v for v in lengths]}",
    )


# ---------------------------------------------------------------------------
# oracle cross-validation
# ---------------------------------------------------------------------------


def random_scene(seed: int, n_segments: int = 5) -> Scene2D:
    rng = np.random.default_rng(seed)
    box = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    segs = []
    guard = 0
    while len(segs) < n_segments and guard < 1000:
        guard += 1
        c = 0.1 + 0.8 * rng.random(2)
        ang = rng.uniform(0, math.pi)
        half = rng.uniform(0.05, 0.2)
        d = half * np.array([math.cos(ang), math.sin(ang)])
        seg = np.array([c - d, c + d])
        if np.any(seg < 0.02) or np.any(seg > 0.98):
            continue
        ok = True
        for other in segs:
            dmin = _min_seg_dist(seg, other)
            if dmin < 0.05:
                ok = False
                break
        if ok:
            segs.append(seg)
    return Scene2D(ambient=box, obstacles=np.array(segs), name=f"random-{seed}")


def _min_seg_dist(s1, s2) -> float:
    from .geometry import segment_point_distance

    d = math.inf
    for t in np.linspace(0, 1, 9):
        p = s1[0] + t * (s1[1] - s1[0])
        d = min(d, float(segment_point_distance(p[None], s2[0], s2[1])[0]))
        q = s2[0] + t * (s2[1] - s2[0])
        d = min(d, float(segment_point_distance(q[None], s1[0], s1[1])[0]))
    return d


def check_oracle_cross(
    n_scenes: int = 50, seed: int = 0, resolution: float = 0.01
) -> CheckReport:
    """Visibility-graph vs. grid lengths on random scenes: the grid may
    overestimate by the 8-connectivity distortion plus snapping and obstacle
    inflation slack, and may never undercut beyond the snap distance."""
    rng = np.random.default_rng(seed)
    worst_over = 0.0   # grid excess beyond distortion bound, in slack units
    worst_under = 0.0  # vis excess over grid beyond snapping slack
    for i in range(n_scenes):
        scene = random_scene(seed * 1000 + i)
        oracle = VisibilityOracle(scene)
        pts = sample_interior_points(scene, 2, seed * 77 + i, min_clear=5 * resolution)
        a, b = pts
        vis = oracle.shortest(a, b).length
        grid = grid_shortest(scene, a, b, resolution)
        slack = (grid.snap_a + grid.snap_b) + (4 + 4 * len(scene.obstacles)) * resolution
        over = grid.length - (GRID_DISTORTION * vis + slack)
        under = vis - (grid.length + grid.snap_a + grid.snap_b + 1e-9)
        worst_over = max(worst_over, over)
        worst_under = max(worst_under, under)
    return CheckReport(
        check_id=f"oracle-cross[n={n_scenes}]",
        params={"n_scenes": n_scenes, "seed": seed, "resolution": resolution},
        measured={"value": worst_over, "worst_under": worst_under},
        conditions=[
            Condition("value", "le", 0.0),
            Condition("worst_under", "le", 0.0),
        ],
        notes="grid within distortion+slack of visibility length on all scenes",
    )


# ---------------------------------------------------------------------------
# geodesic additivity
# ---------------------------------------------------------------------------


def check_geodesic_additivity(
    scene: Scene2D, x, y, grid: int = 10, rel_tol: float = 1e-6
) -> CheckReport:
    oracle = VisibilityOracle(scene)
    geo = geodesic(scene, x, y, oracle=oracle)
    dev = additivity_deviation(scene, geo, grid=grid, oracle=oracle)
    return CheckReport(
        check_id=f"geodesic[{scene.name or 'scene'}]",
        params={"grid": grid},
        measured={
            "value": dev["max_abs_deviation"],
            "max_excess": dev["max_excess"],
            "total": geo.total,
        },
        conditions=[
            Condition("value", "le", rel_tol * max(geo.total, 1.0)),
            Condition("max_excess", "le", rel_tol * max(geo.total, 1.0)),
        ],
        notes="max |rho(g(s),g(t)) - (t-s)| over the parameter grid",
    )
