"""Dihedral-symmetric rings: generating-edge solving, ring completion by
reflections, the tilt curve, and the centro-dihedral family.

All constructions are expressed in the canonical frame: axis along
(1,1,1) through the ring center, reflection planes x=y, y=z, x=z. The
barycenters of a dihedral ring of circumradius ``rho`` then sit at the
six reference directions, and the ring completion maps are coordinate
permutations, which keeps shared coordinates of contact vertices exactly
equal.

A ring is generated from one tetrahedron (T2-): its two contact vertices
lie on the circles where the circumspheres of adjacent tetrahedra meet
the reflection planes. The position of the first contact on its circle
is the angle ``phi``; the second contact follows from the edge-length
constraint up to a discrete choice. Reconstructing the full tetrahedron
from barycenter plus two vertices leaves a final two-fold orientation
choice; both discrete choices are fixed at the reference placement and
carried by continuity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .framework import (CONTACT_NAMES, EDGE, PeriodicPlacement,
                        PeriodLattice, RING_ORDER, SQRT2, RING_CENTER,
                        SixRing, STRUCTURAL_MARKS, ideal_sodalite,
                        validate_placement)
from .geom import Tetrahedron, circumradius_regular
from .symmetry import central_symmetry_residual, d3_residual

__all__ = [
    "D3Frame",
    "D3RingParams",
    "ContactCircle",
    "GeneratingEdgeFamily",
    "TiltPoint",
    "TiltTrace",
    "contact_circles",
    "solve_generating_edge",
    "build_d3_ring",
    "d3_placement",
    "ring_phi",
    "periodicity_residual",
    "mirror_d3_ring",
    "trace_tilt_curve",
    "tilt_tangent",
    "detect_tetrahedrite",
    "build_centro_d3_ring",
    "IDEAL_PHI",
    "MAX_FEASIBLE_RHO",
]

_HALF = EDGE / 2.0
_CIRCUMRADIUS = circumradius_regular(EDGE)
_CIRCUMRADIUS2 = _CIRCUMRADIUS ** 2

# hexagon circumradius beyond which adjacent circumspheres no longer meet
MAX_FEASIBLE_RHO = 2.0 * _CIRCUMRADIUS

# the reference contact P12 sits diametrically opposite the circle basis
# direction e1 = (1,1,0)/sqrt(2)
IDEAL_PHI = math.pi

_PLANE_NORMALS = {
    (1, 2): np.array([1.0, -1.0, 0.0]) / SQRT2,
    (2, 3): np.array([0.0, 1.0, -1.0]) / SQRT2,
    (1, 3): np.array([1.0, 0.0, -1.0]) / SQRT2,
}

# barycenter directions by ring position, as signed plane normals
_DIR_KEYS = (((2, 3), -1), ((1, 2), +1), ((1, 3), +1),
             ((2, 3), +1), ((1, 2), -1), ((1, 3), -1))

# contact name -> plane index pair
_CONTACT_PLANE = {"P13": (1, 3), "Q13": (1, 3), "P12": (1, 2),
                  "Q12": (1, 2), "P23": (2, 3), "Q23": (2, 3)}

# vertex index permutations completing the ring from the T2- tetrahedron
_COMPLETION_PERMS = (
    (1, 2, 0),  # T1-  cyclic x->z->y->x applied twice
    (0, 2, 1),  # T3+  swap y,z
    (0, 1, 2),  # T2-  identity
    (1, 0, 2),  # T1+  swap x,y
    (2, 0, 1),  # T3-  cyclic x->y->z->x
    (2, 1, 0),  # T2+  swap x,z
)

# relabeling under the half turn about the T2 diameter; vertex order flips
# P and Q roles, so indices remap by [2, 3, 0, 1]
_MIRROR_LABEL = {"T1-": "T3-", "T3-": "T1-", "T3+": "T1+", "T1+": "T3+",
                 "T2-": "T2-", "T2+": "T2+"}
_MIRROR_INDEX_MAP = [2, 3, 0, 1]

_POS = {str(lab): k for k, lab in enumerate(RING_ORDER)}

_DIR_T2M = _PLANE_NORMALS[(1, 3)]  # barycenter direction of T2-


@dataclass(frozen=True, eq=False)
class D3Frame:
    """Common axis, center, and the three reflection-plane normals.

    Every plane contains the axis; consecutive planes meet at dihedral
    angles of pi/3 or 2*pi/3.
    """

    axis: np.ndarray
    center: np.ndarray
    plane_normals: dict

    def __post_init__(self):
        for n in self.plane_normals.values():
            if abs(float(n @ self.axis)) > 1e-9:
                raise ValueError("every reflection plane must contain the axis")
        ns = list(self.plane_normals.values())
        for i in range(3):
            cosang = abs(float(ns[i] @ ns[(i + 1) % 3]))
            if abs(cosang - 0.5) > 1e-9:
                raise ValueError("plane normals must meet at 60 or 120 degrees")

    @classmethod
    def canonical(cls) -> "D3Frame":
        return cls(np.ones(3) / math.sqrt(3.0), RING_CENTER.copy(),
                   dict(_PLANE_NORMALS))

    def barycenter_direction(self, position: int) -> np.ndarray:
        key, sign = _DIR_KEYS[position]
        return sign * self.plane_normals[key]

    def barycenter(self, position: int, rho: float) -> np.ndarray:
        return self.center + rho * self.barycenter_direction(position)


@dataclass(frozen=True, eq=False)
class ContactCircle:
    """Circle of possible positions for one contact vertex.

    The circumspheres of the two adjacent tetrahedra intersect in a
    circle lying in the perpendicular bisector plane of their barycenter
    pair, which is the corresponding reflection plane.
    """

    name: str
    center: np.ndarray
    radius: float
    plane_normal: np.ndarray
    positions: tuple[int, int]


def contact_circles(frame: D3Frame, rho: float) -> list[ContactCircle]:
    """The six contact circles at hexagon circumradius ``rho``.

    Returns an empty list when the circumspheres are disjoint, i.e. for
    rho above twice the tetrahedron circumradius.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    r2 = _CIRCUMRADIUS2 - rho * rho / 4.0
    if r2 < 0.0:
        return []
    radius = math.sqrt(r2)
    out = []
    for k, name in enumerate(CONTACT_NAMES):
        a, b = k, (k + 1) % 6
        center = 0.5 * (frame.barycenter(a, rho) + frame.barycenter(b, rho))
        out.append(ContactCircle(name, center, radius,
                                 frame.plane_normals[_CONTACT_PLANE[name]], (a, b)))
    return out


def _p_circle_center(rho: float) -> tuple[float, float]:
    """Center of the P12 circle as (shared x=y component, z component)."""
    c0 = RING_CENTER[0]
    return c0 + rho / (2.0 * SQRT2), c0 - rho / SQRT2


def _p_contact(rho: float, phi: float) -> np.ndarray | None:
    """Point at angle phi on the P12 circle; exact x=y by construction."""
    r2 = _CIRCUMRADIUS2 - rho * rho / 4.0
    if r2 < 0.0:
        return None
    r = math.sqrt(r2)
    mh, mz = _p_circle_center(rho)
    h = mh + r * math.cos(phi) / SQRT2
    return np.array([h, h, mz + r * math.sin(phi)])


def _q_contact(rho: float, p: np.ndarray, q_branch: int) -> np.ndarray | None:
    """Point on the Q23 circle at tetrahedron-edge distance from ``p``.

    Solves the line-circle system in the plane y=z in closed form; the
    two roots are told apart by ``q_branch``. Returns None when the
    sphere around ``p`` misses the circle.
    """
    c0 = RING_CENTER[0]
    mq = np.array([c0 + rho / SQRT2, c0 - rho / (2.0 * SQRT2),
                   c0 - rho / (2.0 * SQRT2)])
    r2 = _CIRCUMRADIUS2 - rho * rho / 4.0
    if r2 < 0.0:
        return None
    e1 = np.array([0.0, 1.0, 1.0]) / SQRT2
    rel = p - mq
    u = float(e1 @ rel)
    w = float(rel[0])
    gam = (float(rel @ rel) + r2 - EDGE * EDGE) / 2.0
    nn = u * u + w * w
    disc = r2 * nn - gam * gam
    if disc < 0.0 or nn < 1e-300:
        return None
    t = math.sqrt(disc)
    alpha = (gam * u + q_branch * w * t) / nn
    beta = (gam * w - q_branch * u * t) / nn
    h = mq[1] + alpha / SQRT2
    return np.array([mq[0] + beta, h, h])


def _reconstruct_generator(p: np.ndarray, q: np.ndarray, b: np.ndarray,
                           orient: int) -> Tetrahedron:
    """Regular tetrahedron from two vertices and the barycenter.

    The opposite edge midpoint and direction are forced; ``orient``
    resolves which end is the v1 (period-source) vertex.
    """
    if abs(np.linalg.norm(q - p) - EDGE) > 1e-9:
        raise ValueError("assigned contact vertices are not at edge distance")
    m02 = 0.5 * (p + q)
    m13 = 2.0 * b - m02
    d = np.cross(q - p, m13 - m02)
    dn = np.linalg.norm(d)
    if dn < 1e-12:
        raise ValueError("degenerate generator data: collinear edge and axis")
    d = d / dn
    return Tetrahedron(np.array([p, m13 + orient * _HALF * d, q,
                                 m13 - orient * _HALF * d]))


@dataclass(frozen=True)
class D3RingParams:
    """Hexagon circumradius, contact angle, and the two discrete choices."""

    rho: float
    phi: float
    q_branch: int = -1   # root selector for the second contact
    orient: int = +1     # v1/v3 assignment in the generator reconstruction

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if self.q_branch not in (1, -1) or self.orient not in (1, -1):
            raise ValueError("branch selectors must be +1 or -1")


@dataclass(frozen=True)
class GeneratingEdgeFamily:
    """One-parameter family of generating-edge placements at fixed rho.

    ``phi_interval`` is the feasible angle interval containing the
    reference angle (or the longest feasible arc if the reference is
    infeasible); None when no angle admits an edge, in which case
    ``edge`` always raises.
    """

    rho: float
    q_branch: int
    phi_interval: tuple[float, float] | None

    @property
    def is_empty(self) -> bool:
        return self.phi_interval is None

    def edge(self, phi: float) -> tuple[np.ndarray, np.ndarray]:
        p = _p_contact(self.rho, phi)
        q = None if p is None else _q_contact(self.rho, p, self.q_branch)
        if q is None:
            raise ValueError(f"no generating edge at phi={phi}")
        return p, q


def solve_generating_edge(frame: D3Frame, rho: float,
                          q_branch: int = -1) -> GeneratingEdgeFamily:
    """Feasible angles for placing an edge across two adjacent circles."""
    if not contact_circles(frame, rho):
        return GeneratingEdgeFamily(rho, q_branch, None)

    def feasible(phi: float) -> bool:
        p = _p_contact(rho, phi)
        return p is not None and _q_contact(rho, p, q_branch) is not None

    n = 1440
    grid = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    mask = np.array([feasible(g) for g in grid])
    if not mask.any():
        return GeneratingEdgeFamily(rho, q_branch, None)
    if mask.all():
        return GeneratingEdgeFamily(rho, q_branch, (0.0, 2.0 * np.pi))

    # contiguous feasible runs on the circle, wrap-aware
    runs = []
    start = None
    ext = np.concatenate([mask, mask])
    i = int(np.argmin(mask))  # start scanning at an infeasible point
    for j in range(i, i + n):
        if ext[j] and start is None:
            start = j
        if not ext[j] and start is not None:
            runs.append((start, j - 1))
            start = None
    if start is not None:
        runs.append((start, i + n - 1))

    def contains(run, phi):
        span_lo = grid[run[0] % n]
        width = (run[1] - run[0]) * (2.0 * np.pi / n)
        return (phi - span_lo) % (2.0 * np.pi) <= width

    chosen = next((r for r in runs if contains(r, IDEAL_PHI)),
                  max(runs, key=lambda r: r[1] - r[0]))

    def refine(lo_idx: int, direction: int) -> float:
        """Bisect the feasibility boundary just outside grid index lo_idx."""
        inside = grid[lo_idx % n] + (2.0 * np.pi) * (lo_idx // n)
        outside = inside - direction * (2.0 * np.pi / n)
        for _ in range(60):
            mid = 0.5 * (inside + outside)
            if feasible(mid % (2.0 * np.pi)):
                inside = mid
            else:
                outside = mid
        return inside

    lo = refine(chosen[0], +1)
    hi = refine(chosen[1], -1)
    return GeneratingEdgeFamily(rho, q_branch, (lo, hi))


def build_d3_ring(params: D3RingParams) -> SixRing:
    """Six-ring generated from one tetrahedron and completed by reflections.

    All six contacts coincide exactly by construction: the completion
    maps are coordinate permutations and the generating contacts carry
    exactly equal coordinates in their reflection planes.
    """
    p = _p_contact(params.rho, params.phi)
    q = None if p is None else _q_contact(params.rho, p, params.q_branch)
    if q is None:
        raise ValueError(
            f"infeasible dihedral parameters rho={params.rho}, phi={params.phi}")
    frame = D3Frame.canonical()
    t2m = _reconstruct_generator(p, q, frame.barycenter(2, params.rho), params.orient)
    return SixRing([Tetrahedron(t2m.verts[:, list(perm)])
                    for perm in _COMPLETION_PERMS])


def _placement_from_ring(ring: SixRing) -> PeriodicPlacement:
    """Attach the lattice read off the realized period marks."""
    acc: dict[int, list[np.ndarray]] = {0: [], 1: [], 2: []}
    for m in STRUCTURAL_MARKS:
        src = ring.tetra(m.source[0]).verts[m.source[1]]
        tgt = ring.tetra(m.target[0]).verts[m.target[1]]
        k = next(i for i in range(3) if m.coeffs[i] != 0)
        acc[k].append(tgt - src)
    gens = np.array([(acc[k][0] + acc[k][1]) / 2.0 for k in range(3)])
    return PeriodicPlacement(ring, PeriodLattice(gens), STRUCTURAL_MARKS)


def d3_placement(params: D3RingParams) -> PeriodicPlacement:
    return _placement_from_ring(build_d3_ring(params))


def ring_phi(ring: SixRing, rho: float | None = None) -> float:
    """Angle of the ring's P12 contact on its circle, in [0, 2*pi)."""
    if rho is None:
        center = ring.barycenters().mean(axis=0)
        rho = float(np.linalg.norm(ring.barycenters()[0] - center))
    p = ring.contact_position("P12")
    mh, mz = _p_circle_center(rho)
    x = float((p[0] - mh) * SQRT2)
    y = float(p[2] - mz)
    return math.atan2(y, x) % (2.0 * math.pi)


def periodicity_residual(ring: SixRing) -> float:
    """Component of the T2- to T1- period along the x=y plane normal.

    Zero exactly when that period is parallel to its reflection plane;
    for a dihedral ring this single condition makes all three period
    pairs equal.
    """
    v = ring.tetrahedra[_POS["T1-"]].verts[3] - ring.tetrahedra[_POS["T2-"]].verts[1]
    return float(v @ _PLANE_NORMALS[(1, 2)])


def mirror_d3_ring(ring: SixRing) -> SixRing:
    """Image of a dihedral ring under the half turn about the T2 diameter.

    The half turn normalizes the dihedral frame, so the image is again a
    dihedral ring in the canonical frame; labels and vertex roles are
    remapped accordingly. The periodicity residual changes sign under
    this map.
    """
    axis = _PLANE_NORMALS[(1, 3)]
    center = RING_CENTER

    def half_turn(v):
        rel = v - center
        return center + 2.0 * float(rel @ axis) * axis - rel

    tets: list[Tetrahedron | None] = [None] * 6
    for lab_str, pos in _POS.items():
        img = np.array([half_turn(v) for v in ring.tetrahedra[pos].verts])
        tets[_POS[_MIRROR_LABEL[lab_str]]] = Tetrahedron(img[_MIRROR_INDEX_MAP])
    return SixRing(tets)


def detect_tetrahedrite(p: PeriodicPlacement, tol: float) -> bool:
    """Dihedral symmetry present while central symmetry is clearly broken."""
    if d3_residual(p.ring).value >= tol:
        return False
    return central_symmetry_residual(p.ring).value > 10.0 * tol


# ---------------------------------------------------------------------------
# root finding along the curve


def _tilt_residual(rho: float, phi: float, q_branch: int, orient: int) -> float | None:
    p = _p_contact(rho, phi)
    if p is None:
        return None
    q = _q_contact(rho, p, q_branch)
    if q is None:
        return None
    frame_b = RING_CENTER + rho * _DIR_T2M
    m02 = 0.5 * (p + q)
    m13 = 2.0 * frame_b - m02
    d = np.cross(q - p, m13 - m02)
    d = d / np.linalg.norm(d)
    t2m = np.array([p, m13 + orient * _HALF * d, q, m13 - orient * _HALF * d])
    t1m = t2m[:, (1, 2, 0)]
    return float((t1m[3] - t2m[1]) @ _PLANE_NORMALS[(1, 2)])


def _bisect_refine(f, lo: float, hi: float, flo: float, fhi: float,
                   phi_tol: float = 1e-12) -> float:
    """Bracketed root: bisection with secant refinement inside the bracket."""
    for _ in range(200):
        if hi - lo <= phi_tol:
            break
        mid = 0.5 * (lo + hi)
        if fhi != flo:
            sec = lo - flo * (hi - lo) / (fhi - flo)
            if lo + 0.1 * (hi - lo) < sec < hi - 0.1 * (hi - lo):
                mid = sec
        fm = f(mid)
        if fm is None:
            return 0.5 * (lo + hi)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def _scan_root(f, lo: float, hi: float, n: int) -> float | None:
    grid = np.linspace(lo, hi, n)
    vals = [f(g) for g in grid]
    for i in range(n - 1):
        a, b = vals[i], vals[i + 1]
        if a is None or b is None:
            continue
        if a == 0.0:
            return float(grid[i])
        if a * b < 0.0:
            return _bisect_refine(f, float(grid[i]), float(grid[i + 1]), a, b)
    return None


def _first_step_root(f, side: int) -> float | None:
    """Hunt the first sign change on a geometric ladder away from the start.

    Near the reference point the curve folds in rho, so the first root
    sits at an angle offset of order sqrt(rho step); the ladder covers
    offsets from 1e-7 to 1.5 without assuming that scale.
    """
    offsets = np.geomspace(1e-7, 1.5, 120)
    prev_phi, prev_val = None, None
    for off in offsets:
        phi = IDEAL_PHI + side * off
        val = f(phi)
        if val is None:
            break
        if prev_val is not None and prev_val * val < 0.0:
            lo, hi = sorted((prev_phi, phi))
            flo, fhi = (prev_val, val) if lo == prev_phi else (val, prev_val)
            return _bisect_refine(f, lo, hi, flo, fhi)
        if val == 0.0 and off > 1e-9:
            return phi
        prev_phi, prev_val = phi, val
    return None


# ---------------------------------------------------------------------------
# tilt curve tracing


@dataclass(frozen=True, eq=False)
class TiltPoint:
    placement: PeriodicPlacement
    rho: float
    phi: float


@dataclass
class TiltTrace:
    """Result of one tilt-curve continuation run."""

    direction: int
    step: float
    points: list[TiltPoint] = field(default_factory=list)
    termination: str = ""
    max_step_displacement: float = 0.0

    @property
    def placements(self) -> list[PeriodicPlacement]:
        return [pt.placement for pt in self.points]


def trace_tilt_curve(step: float = 0.005, max_steps: int = 400,
                     direction: int = +1) -> TiltTrace:
    """Continuation of the symmetry-breaking dihedral curve.

    The hexagon radius is stepped down from 1 and the contact angle is
    re-solved at every step by safeguarded bracketing; roots belonging
    to the centrally-symmetric branch are recognized by their vanishing
    central-symmetry residual and skipped. The curve through the
    reference placement folds in rho, and its two arcs are exact mirror
    images under the half turn about the T2 diameter; ``direction``
    selects the arc (+1 has its first contact angle above the reference
    angle). Corrector failure truncates the trace with a diagnostic.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")

    mirrored = direction == +1
    ideal = ideal_sodalite()
    trace = TiltTrace(direction=direction, step=step)
    trace.points.append(TiltPoint(ideal, 1.0, IDEAL_PHI))

    q_branch, orient = -1, +1
    phi_hist = [IDEAL_PHI]
    prev_vec = ideal.ring.distinct_vertices()
    for k in range(1, max_steps + 1):
        rho = 1.0 - k * step
        if rho <= 1e-3:
            trace.termination = "curve endpoint: hexagon radius exhausted"
            break

        def f(phi, _r=rho):
            return _tilt_residual(_r, phi, q_branch, orient)

        if k == 1:
            # the native arc is traced on the low-angle side; the high-angle
            # arc is produced by mirroring afterwards
            phi = _first_step_root(f, side=-1)
        else:
            pred = phi_hist[-1] + (phi_hist[-1] - phi_hist[-2])
            width = max(0.02, 6.0 * abs(phi_hist[-1] - phi_hist[-2]))
            phi = None
            for _ in range(4):
                phi = _scan_root(f, pred - width, pred + width, 241)
                if phi is not None:
                    break
                width *= 3.0
        if phi is None:
            trace.termination = f"corrector failure at rho={rho:.6f}: no bracketed root"
            break
        resid = f(phi)
        if resid is None or abs(resid) > 1e-10:
            trace.termination = f"corrector failure at rho={rho:.6f}: residual not resolved"
            break

        ring = build_d3_ring(D3RingParams(rho, phi, q_branch, orient))
        if central_symmetry_residual(ring).value < 1e-7:
            trace.termination = (f"corrector failure at rho={rho:.6f}: "
                                 "landed on the centrally-symmetric branch")
            break
        placement = _placement_from_ring(ring)
        report = validate_placement(placement, 1e-8)
        if not report.passed:
            trace.termination = (f"validation failure at rho={rho:.6f}: "
                                 f"{report.failures()}")
            break

        vec = ring.distinct_vertices()
        trace.max_step_displacement = max(
            trace.max_step_displacement,
            float(np.linalg.norm(vec - prev_vec, axis=1).max()))
        prev_vec = vec
        trace.points.append(TiltPoint(placement, rho, phi))
        phi_hist.append(phi)
    else:
        trace.termination = "max_steps reached"

    if mirrored:
        out = []
        for pt in trace.points:
            ring = mirror_d3_ring(pt.placement.ring)
            placement = _placement_from_ring(ring)
            out.append(TiltPoint(placement, pt.rho, ring_phi(ring, pt.rho)))
        trace.points = out
    return trace


def tilt_tangent(delta: float = 1e-4) -> np.ndarray:
    """Unit tangent of the tilt curve at the reference placement.

    At the fold the curve tangent is the pure angle derivative at fixed
    hexagon radius; a central difference at +/- delta gives it to second
    order.
    """
    if not (0 < delta <= 1e-2):
        raise ValueError("delta must lie in (0, 1e-2]")
    xp = d3_placement(D3RingParams(1.0, IDEAL_PHI + delta)).variable_vector()
    xm = d3_placement(D3RingParams(1.0, IDEAL_PHI - delta)).variable_vector()
    t = xp - xm
    return t / np.linalg.norm(t)


# ---------------------------------------------------------------------------
# the centrally-symmetric dihedral family


def _half_turn_t2(v: np.ndarray) -> np.ndarray:
    axis = _PLANE_NORMALS[(1, 3)]
    rel = v - RING_CENTER
    return RING_CENTER + 2.0 * float(rel @ axis) * axis - rel


def _centro_condition(rho: float, phi: float) -> float | None:
    """Edge-length defect when the second contact is the half-turn image.

    Choosing the second contact as the half-turn image of the first
    makes the generating tetrahedron symmetric about the hexagon
    diameter, which is exactly the condition for the completed ring to
    be centrally symmetric; the edge-length constraint then pins phi.
    """
    p = _p_contact(rho, phi)
    if p is None:
        return None
    q = _half_turn_t2(p)
    return float((q - p) @ (q - p)) - EDGE * EDGE


def build_centro_d3_ring(rho: float) -> PeriodicPlacement:
    """The placement with both dihedral and central symmetry at radius rho.

    The contact angle is continued from the reference placement in small
    radius increments; infeasible radii raise ValueError.
    """
    if rho <= 0 or rho > MAX_FEASIBLE_RHO:
        raise ValueError(f"rho={rho} outside the feasible range "
                         f"(0, {MAX_FEASIBLE_RHO:.6f}]")
    n_sub = max(2, int(abs(rho - 1.0) / 0.02) + 2)
    phi = IDEAL_PHI
    for r in np.linspace(1.0, rho, n_sub)[1:]:
        def f(phi_, _r=float(r)):
            return _centro_condition(_r, phi_)

        root = None
        width = 0.15
        for _ in range(5):
            root = _scan_root(f, phi - width, phi + width, 121)
            if root is not None:
                break
            width *= 2.5
        if root is None:
            raise ValueError(f"no centrally-symmetric ring at rho={r:.6f}")
        phi = root

    p = _p_contact(rho, phi)
    q_raw = _half_turn_t2(p)
    qh = 0.5 * (q_raw[1] + q_raw[2])
    q = np.array([q_raw[0], qh, qh])
    frame = D3Frame.canonical()
    t2m = _reconstruct_generator(p, q, frame.barycenter(2, rho), +1)
    ring = SixRing([Tetrahedron(t2m.verts[:, list(perm)])
                    for perm in _COMPLETION_PERMS])
    placement = _placement_from_ring(ring)
    central = central_symmetry_residual(ring).value
    if central > 1e-9:
        raise RuntimeError(
            f"centro-dihedral construction failed: central residual {central:.3e}")
    return placement
