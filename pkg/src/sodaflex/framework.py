"""The sodalite-type framework as a 6-ring of regular tetrahedra with
marked periods.

The reference placement wraps 24 congruent regular tetrahedra of edge
2*(sqrt(2)-1) around a cube of half-edge 1 centered at the origin. The
highlighted 6-ring consists of the six tetrahedra whose barycenters lie
at distance 1 from the ring center c = (1,1,1)/sqrt(2); those barycenters
form a planar regular hexagon of edge 1.

Ring bookkeeping
----------------
Tetrahedra are labeled T1-, T3+, T2-, T1+, T3-, T2+ in cyclic ring order.
Within each tetrahedron the vertex order is structural:

    v0  the "P"-type contact vertex (a cube edge midpoint in the
        reference placement),
    v1  free vertex on the v0 side (source of a period mark),
    v2  the "Q"-type contact vertex,
    v3  free vertex on the v2 side (target of a period mark).

Consecutive tetrahedra share v0 with v0 (contacts at even ring steps) or
v2 with v2 (odd steps), walking the contact hexagon P13 Q23 P12 Q13 P23
Q12. Each period mark identifies the v1 of one tetrahedron with the v3
of another, two marks per lattice generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .geom import ConvexCell, PeriodLattice, Tetrahedron, Vec3
from .voronoi import voronoi_cell

__all__ = [
    "SQRT2",
    "HALF_EDGE",
    "EDGE",
    "RING_CENTER",
    "RingLabel",
    "RING_ORDER",
    "CONTACT_NAMES",
    "Contact",
    "PeriodMark",
    "SixRing",
    "PeriodicPlacement",
    "ValidationReport",
    "QuotientGraph",
    "ideal_sodalite",
    "ideal_lattice",
    "validate_placement",
    "detect_period_marks",
    "quotient_graph",
    "sodalite_cage",
    "generate_patch",
]

SQRT2 = math.sqrt(2.0)
HALF_EDGE = SQRT2 - 1.0          # half the tetrahedron edge
EDGE = 2.0 * HALF_EDGE           # tetrahedron edge length
_C0 = SQRT2 / 2.0
RING_CENTER = np.array([_C0, _C0, _C0])
RING_CENTER.setflags(write=False)


@dataclass(frozen=True, order=True)
class RingLabel:
    """A tetrahedron label: lower index in {1,2,3} and upper sign in {+1,-1}."""

    index: int
    sign: int

    def __post_init__(self):
        if self.index not in (1, 2, 3) or self.sign not in (1, -1):
            raise ValueError(f"invalid ring label ({self.index}, {self.sign})")

    def __str__(self) -> str:
        return f"T{self.index}{'+' if self.sign > 0 else '-'}"

    @classmethod
    def parse(cls, s: str) -> "RingLabel":
        if len(s) == 3 and s[0] == "T" and s[1] in "123" and s[2] in "+-":
            return cls(int(s[1]), 1 if s[2] == "+" else -1)
        raise ValueError(f"invalid ring label {s!r}")


RING_ORDER: tuple[RingLabel, ...] = (
    RingLabel(1, -1), RingLabel(3, +1), RingLabel(2, -1),
    RingLabel(1, +1), RingLabel(3, -1), RingLabel(2, +1),
)
RING_POSITION = {lab: k for k, lab in enumerate(RING_ORDER)}
CONTACT_NAMES = ("P13", "Q23", "P12", "Q13", "P23", "Q12")

# contact k joins ring positions k and k+1 at vertex index 0 (even k) or 2 (odd k)
_CONTACT_INDEX = tuple(0 if k % 2 == 0 else 2 for k in range(6))

# period marks: (source position, target position, generator index);
# every mark runs from the source's v1 to the target's v3
_MARK_TABLE = (
    (5, 1, 0),  # T2+ -> T3+  generator 1
    (4, 2, 0),  # T3- -> T2-
    (0, 4, 1),  # T1- -> T3-  generator 2
    (1, 3, 1),  # T3+ -> T1+
    (2, 0, 2),  # T2- -> T1-  generator 3
    (3, 5, 2),  # T1+ -> T2+
)

# coordinate permutation (as a vertex index map v -> v[perm]) taking the
# reference tetrahedron at ring position 0 to each ring position
_RING_COORD_PERMS = (
    (0, 1, 2),  # T1-  identity
    (2, 1, 0),  # T3+  swap x,z
    (2, 0, 1),  # T2-  cyclic x->y->z->x
    (0, 2, 1),  # T1+  swap y,z
    (1, 2, 0),  # T3-  cyclic x->z->y->x
    (1, 0, 2),  # T2+  swap x,y
)

_BASE_VERTS = np.array([
    [1.0, 0.0, 1.0],
    [1.0, 0.0, 2.0 * SQRT2 - 1.0],
    [HALF_EDGE, HALF_EDGE, SQRT2],
    [HALF_EDGE, -HALF_EDGE, SQRT2],
])

_IDEAL_GENERATORS = SQRT2 * np.array([
    [1.0, -1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
])

# (tetra, vertex) slot -> distinct vertex id, taking each contact once
_SLOT_TO_ID: dict[tuple[int, int], int] = {}
_ID_TO_SLOT: list[tuple[int, int]] = []
_contact_id: dict[int, int] = {}
for _t in range(6):
    for _i in range(4):
        _key = None
        for _k in range(6):
            _idx = _CONTACT_INDEX[_k]
            if (_t, _i) in ((_k, _idx), ((_k + 1) % 6, _idx)):
                _key = _k
                break
        if _key is not None and _key in _contact_id:
            _SLOT_TO_ID[(_t, _i)] = _contact_id[_key]
            continue
        _SLOT_TO_ID[(_t, _i)] = len(_ID_TO_SLOT)
        _ID_TO_SLOT.append((_t, _i))
        if _key is not None:
            _contact_id[_key] = _SLOT_TO_ID[(_t, _i)]
N_DISTINCT_VERTICES = len(_ID_TO_SLOT)  # 18

RING_EDGES_BY_ID: tuple[tuple[int, int], ...] = tuple(
    (_SLOT_TO_ID[(t, i)], _SLOT_TO_ID[(t, j)])
    for t in range(6) for i, j in combinations(range(4), 2)
)


@dataclass(frozen=True, eq=False)
class Contact:
    """A shared vertex between consecutive ring tetrahedra."""

    name: str
    label_a: RingLabel
    index_a: int
    label_b: RingLabel
    index_b: int
    position: np.ndarray

    def __post_init__(self):
        p = np.array(self.position, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "position", p)


@dataclass(frozen=True)
class PeriodMark:
    """Identification of two ring vertices by a lattice translation.

    The vertex at ``target`` equals the vertex at ``source`` plus the
    integer combination ``coeffs`` of the lattice generators.
    """

    source: tuple[RingLabel, int]
    target: tuple[RingLabel, int]
    coeffs: tuple[int, int, int]


class SixRing:
    """Six labeled tetrahedra in ring order with their six contacts."""

    def __init__(self, tetrahedra):
        tets = tuple(tetrahedra)
        if len(tets) != 6:
            raise ValueError("a 6-ring needs exactly six tetrahedra")
        self.tetrahedra: tuple[Tetrahedron, ...] = tets
        self.contacts: tuple[Contact, ...] = tuple(
            Contact(
                CONTACT_NAMES[k],
                RING_ORDER[k], _CONTACT_INDEX[k],
                RING_ORDER[(k + 1) % 6], _CONTACT_INDEX[k],
                tets[k].verts[_CONTACT_INDEX[k]],
            )
            for k in range(6)
        )

    def tetra(self, label: RingLabel) -> Tetrahedron:
        return self.tetrahedra[RING_POSITION[label]]

    def barycenters(self) -> np.ndarray:
        return np.array([t.barycenter() for t in self.tetrahedra])

    def contact_position(self, name: str) -> Vec3:
        for c in self.contacts:
            if c.name == name:
                return c.position
        raise KeyError(name)

    def distinct_vertices(self) -> np.ndarray:
        """The 18 distinct ring vertices, first-occurrence slot order."""
        return np.array([self.tetrahedra[t].verts[i] for (t, i) in _ID_TO_SLOT])

    def slot_vertex_id(self, position: int, vertex_index: int) -> int:
        return _SLOT_TO_ID[(position, vertex_index)]

    def map_vertices(self, fn) -> "SixRing":
        return SixRing([t.map_vertices(fn) for t in self.tetrahedra])


def _structural_marks() -> tuple[PeriodMark, ...]:
    marks = []
    for (src, tgt, k) in _MARK_TABLE:
        coeffs = tuple(1 if m == k else 0 for m in range(3))
        marks.append(PeriodMark((RING_ORDER[src], 1), (RING_ORDER[tgt], 3), coeffs))
    return tuple(marks)


STRUCTURAL_MARKS = _structural_marks()


class PeriodicPlacement:
    """A 6-ring, its periodicity lattice, and the vertex identifications."""

    def __init__(self, ring: SixRing, lattice: PeriodLattice,
                 period_marks=STRUCTURAL_MARKS):
        self.ring = ring
        self.lattice = lattice
        self.period_marks: tuple[PeriodMark, ...] = tuple(period_marks)
        self.lattice_degenerate: bool = lattice.is_degenerate()

    def realized_mark_vector(self, mark: PeriodMark) -> Vec3:
        src = self.ring.tetra(mark.source[0]).verts[mark.source[1]]
        tgt = self.ring.tetra(mark.target[0]).verts[mark.target[1]]
        return tgt - src

    def mark_residual(self, mark: PeriodMark) -> float:
        v = self.realized_mark_vector(mark) - self.lattice.combination(mark.coeffs)
        return float(np.linalg.norm(v))

    def variable_vector(self) -> np.ndarray:
        """Distinct ring vertices then lattice generators, flattened (63,)."""
        return np.concatenate([
            self.ring.distinct_vertices().ravel(),
            self.lattice.generators.ravel(),
        ])

    def transformed(self, matrix: np.ndarray | None = None,
                    translation=None) -> "PeriodicPlacement":
        """Apply x -> M x + t to the ring; the lattice maps by M alone."""
        m = np.eye(3) if matrix is None else np.asarray(matrix, dtype=float)
        t = np.zeros(3) if translation is None else np.asarray(translation, dtype=float)
        ring = self.ring.map_vertices(lambda v: m @ v + t)
        lattice = PeriodLattice(self.lattice.generators @ m.T)
        return PeriodicPlacement(ring, lattice, self.period_marks)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the defining checks for a periodic placement.

    Each entry maps a check name to (passed, worst deviation observed).
    """

    tol: float
    checks: dict[str, tuple[bool, float]]

    @property
    def passed(self) -> bool:
        return all(ok for ok, _ in self.checks.values())

    def failures(self) -> list[str]:
        return [name for name, (ok, _) in self.checks.items() if not ok]


def ideal_lattice() -> PeriodLattice:
    return PeriodLattice(_IDEAL_GENERATORS.copy())


def _ideal_ring() -> SixRing:
    tets = [Tetrahedron(_BASE_VERTS[:, list(p)]) for p in _RING_COORD_PERMS]
    return SixRing(tets)


def ideal_sodalite() -> PeriodicPlacement:
    """The maximal-symmetry placement.

    The reference tetrahedron touches the cube at (1, 0, 1); the other
    five ring tetrahedra are its images under coordinate permutations.
    Period marks are detected geometrically and must agree with the
    structural table, which pins the construction down exactly.
    """
    ring = _ideal_ring()
    lattice = ideal_lattice()
    detected = detect_period_marks(ring, lattice)
    if set(detected) != set(STRUCTURAL_MARKS):
        raise AssertionError("detected period marks disagree with ring structure")
    return PeriodicPlacement(ring, lattice, STRUCTURAL_MARKS)


def detect_period_marks(ring: SixRing, lattice: PeriodLattice,
                        tol: float = 1e-9) -> tuple[PeriodMark, ...]:
    """Find all vertex pairs differing by exactly one (positive) generator.

    Raises ValueError unless exactly six marks are found, two per
    generator index.
    """
    slots = [(t, i) for t in range(6) for i in range(4)]
    marks = []
    for (t, i) in slots:
        v = ring.tetrahedra[t].verts[i]
        for k in range(3):
            shifted = v + lattice.generators[k]
            for (u, j) in slots:
                if (u, j) == (t, i):
                    continue
                if np.linalg.norm(shifted - ring.tetrahedra[u].verts[j]) <= tol:
                    coeffs = tuple(1 if m == k else 0 for m in range(3))
                    marks.append(PeriodMark((RING_ORDER[t], i), (RING_ORDER[u], j), coeffs))
    if len(marks) != 6:
        raise ValueError(f"expected 6 period marks, detected {len(marks)}")
    per_gen = [sum(1 for m in marks if m.coeffs[k] != 0) for k in range(3)]
    if per_gen != [2, 2, 2]:
        raise ValueError(f"period marks per generator {per_gen}, expected two each")
    return tuple(marks)


def validate_placement(p: PeriodicPlacement, tol: float) -> ValidationReport:
    """Check the defining conditions of a placement.

    (a) all six tetrahedra regular with the framework edge length,
    (b) all six contacts coincident,
    (c) every period mark satisfied by the lattice,
    (d) each generator used by exactly two marks with equal realized vectors,
    (e) lattice non-degenerate.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    checks: dict[str, tuple[bool, float]] = {}

    worst = max(float(np.abs(t.edge_lengths() - EDGE).max()) for t in p.ring.tetrahedra)
    checks["regular_tetrahedra"] = (worst <= tol, worst)

    worst = 0.0
    for k, c in enumerate(p.ring.contacts):
        a = p.ring.tetra(c.label_a).verts[c.index_a]
        b = p.ring.tetra(c.label_b).verts[c.index_b]
        worst = max(worst, float(np.linalg.norm(a - b)))
    checks["contacts_coincide"] = (worst <= tol, worst)

    worst = max(p.mark_residual(m) for m in p.period_marks)
    checks["period_marks"] = (worst <= tol, worst)

    by_gen: dict[int, list[np.ndarray]] = {0: [], 1: [], 2: []}
    balanced = True
    for m in p.period_marks:
        nz = [k for k in range(3) if m.coeffs[k] != 0]
        if len(nz) == 1 and m.coeffs[nz[0]] == 1:
            by_gen[nz[0]].append(p.realized_mark_vector(m))
        else:
            balanced = False
    worst = 0.0
    for k in range(3):
        if len(by_gen[k]) != 2:
            balanced = False
            continue
        worst = max(worst, float(np.linalg.norm(by_gen[k][0] - by_gen[k][1])))
    checks["period_pairs_equal"] = (balanced and worst <= tol, worst)

    checks["lattice_nondegenerate"] = (not p.lattice.is_degenerate(),
                                       p.lattice.volume())
    return ValidationReport(tol, checks)


@dataclass(frozen=True)
class QuotientGraph:
    """Vertex and edge orbits of the periodic framework.

    Edges carry the integer period vector, in the generator basis, picked
    up between their endpoint orbit representatives.
    """

    n_vertex_orbits: int
    edges: tuple[tuple[int, int, tuple[int, int, int]], ...]

    @property
    def n_edge_orbits(self) -> int:
        return len(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.n_vertex_orbits
        for (a, b, _) in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def is_connected(self) -> bool:
        adj: dict[int, set[int]] = {i: set() for i in range(self.n_vertex_orbits)}
        for (a, b, _) in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        seen = {0}
        stack = [0]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == self.n_vertex_orbits


def quotient_graph(p: PeriodicPlacement, tol: float = 1e-9) -> QuotientGraph:
    """Vertex/edge orbits from the contact and period identifications."""
    report = validate_placement(p, tol)
    if not report.passed:
        raise ValueError(f"placement fails validation: {report.failures()}")

    # union-find over the 18 distinct vertices with integer period offsets
    parent = list(range(N_DISTINCT_VERTICES))
    offset = [np.zeros(3, dtype=int) for _ in range(N_DISTINCT_VERTICES)]

    def find(i: int) -> int:
        if parent[i] == i:
            return i
        root = find(parent[i])
        offset[i] = offset[i] + offset[parent[i]]
        parent[i] = root
        return root

    for m in p.period_marks:
        si = _SLOT_TO_ID[(RING_POSITION[m.source[0]], m.source[1])]
        ti = _SLOT_TO_ID[(RING_POSITION[m.target[0]], m.target[1])]
        rs, rt = find(si), find(ti)
        if rs != rt:
            # position(target) = position(source) + coeffs; keep offsets to roots
            parent[rt] = rs
            offset[rt] = offset[si] + np.asarray(m.coeffs, dtype=int) - offset[ti]
    for i in range(N_DISTINCT_VERTICES):
        find(i)

    roots = sorted({find(i) for i in range(N_DISTINCT_VERTICES)})
    orbit_of = {r: n for n, r in enumerate(roots)}

    edges = []
    for (i, j) in RING_EDGES_BY_ID:
        a, b = orbit_of[find(i)], orbit_of[find(j)]
        period = tuple(int(x) for x in (offset[j] - offset[i]))
        if (b, a) < (a, b):
            a, b = b, a
            period = tuple(-x for x in period)
        edges.append((a, b, period))
    return QuotientGraph(len(roots), tuple(edges))


def sodalite_cage(p: PeriodicPlacement) -> tuple[list[Tetrahedron], ConvexCell]:
    """The 24 tetrahedra around one cell, plus the cell of their barycenters.

    Every vertex of the Voronoi cell of the lattice equals exactly one
    ring barycenter shifted by a lattice vector; the corresponding
    translated ring tetrahedra wrap around the cell.
    """
    report = validate_placement(p, 1e-8)
    if not report.passed:
        raise ValueError(f"placement fails validation: {report.failures()}")
    cell = voronoi_cell(p.lattice)
    ring_b = p.ring.barycenters()
    inv = np.linalg.inv(p.lattice.generators)
    tets = []
    for w in cell.vertices:
        hit = None
        for i in range(6):
            coeffs = (w - ring_b[i]) @ inv
            rounded = np.round(coeffs)
            if np.abs(coeffs - rounded).max() < 1e-6:
                shift = rounded @ p.lattice.generators
                if np.linalg.norm(ring_b[i] + shift - w) < 1e-8:
                    hit = p.ring.tetrahedra[i].translated(shift)
                    break
        if hit is None:
            raise ValueError("cell vertex is not a lattice translate of a ring barycenter")
        tets.append(hit)
    return tets, cell


def generate_patch(p: PeriodicPlacement, shells: int) -> list[Tetrahedron]:
    """Ring tetrahedra translated by all lattice combinations in [-shells, shells]^3."""
    if shells < 0:
        raise ValueError("shells must be >= 0")
    out = []
    for coeffs in product(range(-shells, shells + 1), repeat=3):
        shift = p.lattice.combination(coeffs)
        for t in p.ring.tetrahedra:
            out.append(t.translated(shift))
    return out


def cage_assignment(p: PeriodicPlacement) -> tuple[tuple[int, tuple[int, int, int]], ...]:
    """Structural recipe for the 24 cage tetrahedra around one cell.

    Each entry pairs a ring position with the integer lattice coefficients
    that move its tetrahedron onto a cell vertex. Computed from a placement
    whose cell vertices coincide with translated ring barycenters; the
    assignment then deforms continuously with any placement.
    """
    cell = voronoi_cell(p.lattice)
    ring_b = p.ring.barycenters()
    inv = np.linalg.inv(p.lattice.generators)
    out = []
    for w in cell.vertices:
        hit = None
        for i in range(6):
            coeffs = (w - ring_b[i]) @ inv
            rounded = np.round(coeffs)
            if np.abs(coeffs - rounded).max() < 1e-6:
                shift = rounded @ p.lattice.generators
                if np.linalg.norm(ring_b[i] + shift - w) < 1e-8:
                    hit = (i, tuple(int(c) for c in rounded))
                    break
        if hit is None:
            raise ValueError("cell vertex is not a lattice translate of a ring barycenter")
        out.append(hit)
    return tuple(out)


def cage_barycenter_spectrum(p: PeriodicPlacement, assignment) -> np.ndarray:
    """Sorted pairwise distances of the cage barycenters under ``assignment``."""
    pts = np.array([
        p.ring.tetrahedra[i].barycenter() + p.lattice.combination(coeffs)
        for (i, coeffs) in assignment
    ])
    dists = [np.linalg.norm(pts[i] - pts[j])
             for i, j in combinations(range(len(pts)), 2)]
    return np.sort(np.array(dists))
