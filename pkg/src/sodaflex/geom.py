"""Low-level 3D geometry: rotations, rigid motions, tetrahedra, lattices.

Points and vectors are float64 numpy arrays of shape (3,). The model unit
is the half-edge of the reference cube, so all coordinates are O(1) and
absolute tolerances are meaningful throughout.

Everything constructed here is immutable: arrays are marked read-only at
construction time and all operations are pure, so values can be shared
freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

__all__ = [
    "Vec3",
    "as_vec3",
    "Rotation",
    "RigidMotion",
    "Tetrahedron",
    "PeriodLattice",
    "ConvexCell",
    "is_regular_tetrahedron",
    "barycenter",
    "circumsphere",
    "circumradius_regular",
    "lattice_volume",
]

Vec3 = np.ndarray  # shape (3,), float64

TET_EDGE_PAIRS = tuple(combinations(range(4), 2))


def as_vec3(v) -> Vec3:
    a = np.asarray(v, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {a.shape}")
    return a


def _readonly(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Rotation:
    """A rotation stored as a unit quaternion (w, x, y, z), scalar first.

    The action is right-handed: a quarter turn about e3 maps e1 to e2.
    The quaternion is normalized on construction; a quaternion too far
    from unit norm (or near zero) is rejected.
    """

    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        if q.shape != (4,):
            raise ValueError("quaternion must have 4 components")
        n = float(np.linalg.norm(q))
        if n < 1e-12:
            raise ValueError("zero quaternion does not define a rotation")
        object.__setattr__(self, "q", _readonly(q / n))

    @classmethod
    def identity(cls) -> "Rotation":
        return cls(np.array([1.0, 0.0, 0.0, 0.0]))

    @classmethod
    def from_axis_angle(cls, axis, angle: float) -> "Rotation":
        axis = as_vec3(axis)
        n = float(np.linalg.norm(axis))
        if n < 1e-12:
            raise ValueError("rotation axis must be nonzero")
        half = 0.5 * angle
        return cls(np.concatenate([[math.cos(half)], math.sin(half) * axis / n]))

    @classmethod
    def random(cls, rng: np.random.Generator) -> "Rotation":
        """Uniform random rotation from a normalized 4-component Gaussian."""
        return cls(rng.standard_normal(4))

    @property
    def matrix(self) -> np.ndarray:
        w, x, y, z = self.q
        return np.array([
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ])

    def apply(self, pts: np.ndarray) -> np.ndarray:
        return np.asarray(pts, dtype=float) @ self.matrix.T

    def compose(self, other: "Rotation") -> "Rotation":
        """Rotation equal to applying ``other`` first, then ``self``."""
        w1, x1, y1, z1 = self.q
        w2, x2, y2, z2 = other.q
        return Rotation(np.array([
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ]))

    def inverse(self) -> "Rotation":
        return Rotation(self.q * np.array([1.0, -1.0, -1.0, -1.0]))


@dataclass(frozen=True, eq=False)
class RigidMotion:
    """An orientation-preserving isometry x -> R x + t."""

    rotation: Rotation
    translation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "translation", _readonly(as_vec3(self.translation)))

    @classmethod
    def identity(cls) -> "RigidMotion":
        return cls(Rotation.identity(), np.zeros(3))

    @classmethod
    def random(cls, rng: np.random.Generator, translation_scale: float = 1.0) -> "RigidMotion":
        return cls(Rotation.random(rng), translation_scale * rng.standard_normal(3))

    def apply(self, pts: np.ndarray) -> np.ndarray:
        return self.rotation.apply(pts) + self.translation

    def compose(self, other: "RigidMotion") -> "RigidMotion":
        return RigidMotion(
            self.rotation.compose(other.rotation),
            self.rotation.apply(other.translation) + self.translation,
        )

    def inverse(self) -> "RigidMotion":
        rinv = self.rotation.inverse()
        return RigidMotion(rinv, -rinv.apply(self.translation))


@dataclass(frozen=True, eq=False)
class Tetrahedron:
    """Four labeled vertices, stored as a (4, 3) array."""

    verts: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.verts, dtype=float)
        if v.shape != (4, 3):
            raise ValueError("a tetrahedron needs exactly four 3D vertices")
        object.__setattr__(self, "verts", _readonly(v))

    def barycenter(self) -> Vec3:
        return self.verts.mean(axis=0)

    def edge_lengths(self) -> np.ndarray:
        """The six pairwise vertex distances, in (0,1),(0,2),(0,3),(1,2),(1,3),(2,3) order."""
        return np.array([np.linalg.norm(self.verts[i] - self.verts[j])
                         for i, j in TET_EDGE_PAIRS])

    def signed_volume(self) -> float:
        v = self.verts
        return float(np.linalg.det(v[1:] - v[0])) / 6.0

    def map_vertices(self, fn) -> "Tetrahedron":
        return Tetrahedron(np.array([fn(v) for v in self.verts]))

    def translated(self, u) -> "Tetrahedron":
        return Tetrahedron(self.verts + as_vec3(u))

    def transformed(self, motion: RigidMotion) -> "Tetrahedron":
        return Tetrahedron(motion.apply(self.verts))


def is_regular_tetrahedron(t: Tetrahedron, edge: float, tol: float) -> bool:
    """True iff all six pairwise distances equal ``edge`` within ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return bool(np.all(np.abs(t.edge_lengths() - edge) <= tol))


def barycenter(t: Tetrahedron) -> Vec3:
    return t.barycenter()


def circumradius_regular(edge: float) -> float:
    """Circumradius of a regular tetrahedron with the given edge."""
    return edge * math.sqrt(3.0 / 8.0)


def circumsphere(t: Tetrahedron) -> tuple[Vec3, float]:
    """Center and radius of the sphere through all four vertices.

    Raises ValueError for a (nearly) coplanar vertex set, which has no
    unique circumsphere.
    """
    v = t.verts
    a = 2.0 * (v[1:] - v[0])
    scale = float(np.prod(np.linalg.norm(a, axis=1)))
    if abs(np.linalg.det(a)) <= 1e-12 * max(scale, 1e-300):
        raise ValueError("degenerate tetrahedron: no unique circumsphere")
    b = (v[1:] ** 2).sum(axis=1) - (v[0] ** 2).sum()
    center = np.linalg.solve(a, b)
    radius = float(np.linalg.norm(v[0] - center))
    return center, radius


@dataclass(frozen=True, eq=False)
class PeriodLattice:
    """Three generator vectors of a periodicity lattice, stored as rows."""

    generators: np.ndarray

    DEGENERACY_REL_TOL = 1e-9  # |det| threshold, relative to product of generator norms

    def __post_init__(self):
        g = np.asarray(self.generators, dtype=float)
        if g.shape != (3, 3):
            raise ValueError("a lattice needs exactly three generator rows")
        object.__setattr__(self, "generators", _readonly(g))

    def determinant(self) -> float:
        return float(np.linalg.det(self.generators))

    def volume(self) -> float:
        return abs(self.determinant())

    def is_degenerate(self) -> bool:
        norms = np.linalg.norm(self.generators, axis=1)
        scale = float(np.prod(norms))
        return abs(self.determinant()) < self.DEGENERACY_REL_TOL * max(scale, 1e-300)

    def combination(self, coeffs) -> Vec3:
        """Integer (or real) combination sum_k coeffs[k] * generator_k."""
        return np.asarray(coeffs, dtype=float) @ self.generators


def lattice_volume(lattice: PeriodLattice) -> float:
    return lattice.volume()


@dataclass(frozen=True, eq=False)
class ConvexCell:
    """A convex polyhedron as vertices plus faces in cyclic vertex order.

    Faces are oriented outward. Edges are derived from the face loops.
    """

    vertices: np.ndarray
    faces: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError("vertices must be an (N, 3) array")
        object.__setattr__(self, "vertices", _readonly(v))
        object.__setattr__(self, "faces", tuple(tuple(int(i) for i in f) for f in self.faces))

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        seen = set()
        for f in self.faces:
            m = len(f)
            for k in range(m):
                seen.add(tuple(sorted((f[k], f[(k + 1) % m]))))
        return tuple(sorted(seen))

    def face_sizes(self) -> dict[int, int]:
        sizes: dict[int, int] = {}
        for f in self.faces:
            sizes[len(f)] = sizes.get(len(f), 0) + 1
        return sizes

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.faces)

    def max_face_planarity_error(self) -> float:
        worst = 0.0
        for f in self.faces:
            pts = self.vertices[list(f)]
            ctr = pts.mean(axis=0)
            _, s, vh = np.linalg.svd(pts - ctr)
            normal = vh[2]
            worst = max(worst, float(np.abs((pts - ctr) @ normal).max()))
        return worst

    def volume(self) -> float:
        total = 0.0
        for f in self.faces:
            pts = self.vertices[list(f)]
            for k in range(1, len(f) - 1):
                total += np.dot(pts[0], np.cross(pts[k], pts[k + 1]))
        return abs(total) / 6.0

    def is_centrally_symmetric(self, tol: float, about=None) -> bool:
        ctr = np.zeros(3) if about is None else as_vec3(about)
        for v in self.vertices:
            mirrored = 2.0 * ctr - v
            if np.min(np.linalg.norm(self.vertices - mirrored, axis=1)) > tol:
                return False
        return True
