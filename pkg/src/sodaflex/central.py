"""The six-parameter centrally-symmetric deformation component.

Fix T2+ in place. Rotating T1- about its shared vertex with T2+ (the
contact Q12) and T3- about P23 keeps the chain T1-, T2+, T3- intact for
any pair of rotations, so the chain configurations form SO(3) x SO(3).
Completing the ring by point inversion through the midpoint of P13 and
Q13 restores all six contacts and forces the three period pairs to be
equal vectors, so every parameter pair yields a periodic placement,
degenerate lattices excepted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .framework import (PeriodicPlacement, PeriodLattice, RING_ORDER,
                        SixRing, STRUCTURAL_MARKS, ideal_sodalite)
from .geom import Rotation, Tetrahedron

__all__ = [
    "CentralParams",
    "central_deform",
    "sample_central",
    "central_tangent_basis",
    "LATTICE_DEGENERACY_ABS_TOL",
]

# scale-aware absolute determinant threshold: the reference lattice has
# generators of norm 2*sqrt(2)
LATTICE_DEGENERACY_ABS_TOL = 1e-9 * (2.0 * np.sqrt(2.0)) ** 3

# vertex index correspondence under inversion: the image of [v0,v1,v2,v3]
# of Ti± lists the vertices of Ti∓ in structural order
_INVERSION_INDEX_MAP = [2, 3, 0, 1]

_POS = {str(lab): k for k, lab in enumerate(RING_ORDER)}


@dataclass(frozen=True, eq=False)
class CentralParams:
    """Rotations applied to T1- (about Q12) and to T3- (about P23)."""

    rot_a: Rotation
    rot_b: Rotation

    @classmethod
    def identity(cls) -> "CentralParams":
        return cls(Rotation.identity(), Rotation.identity())

    @classmethod
    def random(cls, rng: np.random.Generator) -> "CentralParams":
        return cls(Rotation.random(rng), Rotation.random(rng))


def _rotate_about(tet: Tetrahedron, rot: Rotation, center: np.ndarray) -> Tetrahedron:
    return Tetrahedron(rot.apply(tet.verts - center) + center)


def central_deform(params: CentralParams,
                   base: PeriodicPlacement | None = None) -> PeriodicPlacement:
    """Build the centrally-symmetric placement for a parameter pair.

    The construction never fails; a dependent set of period vectors is
    recorded on the returned placement as ``lattice_degenerate``.
    """
    if base is None:
        base = ideal_sodalite()
    ring = base.ring
    t2p = ring.tetrahedra[_POS["T2+"]]
    t1m0 = ring.tetrahedra[_POS["T1-"]]
    t3m0 = ring.tetrahedra[_POS["T3-"]]

    t1m = _rotate_about(t1m0, params.rot_a, t1m0.verts[2])  # fixes Q12
    t3m = _rotate_about(t3m0, params.rot_b, t3m0.verts[0])  # fixes P23

    center = 0.5 * (t1m.verts[0] + t3m.verts[2])  # midpoint of P13 and Q13

    def inverted(tet: Tetrahedron) -> Tetrahedron:
        return Tetrahedron((2.0 * center - tet.verts)[_INVERSION_INDEX_MAP])

    t1p = inverted(t1m)
    t3p = inverted(t3m)
    t2m = inverted(t2p)

    new_ring = SixRing([t1m, t3p, t2m, t1p, t3m, t2p])
    generators = _generators_from_marks(new_ring)
    placement = PeriodicPlacement(new_ring, PeriodLattice(generators), STRUCTURAL_MARKS)
    placement.lattice_degenerate = (
        abs(np.linalg.det(generators)) < LATTICE_DEGENERACY_ABS_TOL)
    return placement


def _generators_from_marks(ring: SixRing) -> np.ndarray:
    """Read the three generators off the realized period-mark vectors.

    Each generator is used by two marks whose vectors agree by central
    symmetry; the average is taken to keep the result symmetric.
    """
    acc: dict[int, list[np.ndarray]] = {0: [], 1: [], 2: []}
    for m in STRUCTURAL_MARKS:
        src = ring.tetra(m.source[0]).verts[m.source[1]]
        tgt = ring.tetra(m.target[0]).verts[m.target[1]]
        k = next(i for i in range(3) if m.coeffs[i] != 0)
        acc[k].append(tgt - src)
    return np.array([(acc[k][0] + acc[k][1]) / 2.0 for k in range(3)])


def sample_central(n: int, seed: int) -> list[PeriodicPlacement]:
    """Placements at ``n`` independent uniform rotation pairs.

    Each sample draws from its own RNG substream keyed by (seed, index),
    so the list is reproducible and samples could be generated in any
    order. Degenerate-lattice samples are flagged, not dropped.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    base = ideal_sodalite()
    out = []
    for i in range(n):
        rng = np.random.default_rng([seed, i])
        out.append(central_deform(CentralParams.random(rng), base))
    return out


def central_tangent_basis(h: float = 1e-5) -> np.ndarray:
    """Six deformation velocities at the identity parameters, shape (6, 63).

    Central finite differences of the construction along the one-parameter
    rotation subgroups about e1, e2, e3, first in the T1- slot and then in
    the T3- slot, expressed over the distinct-vertex and generator layout.
    """
    if not (0.0 < h <= 1e-4):
        raise ValueError("h must lie in (0, 1e-4]")
    base = ideal_sodalite()
    rows = []
    for slot in ("a", "b"):
        for axis in np.eye(3):
            def params(angle: float) -> CentralParams:
                rot = Rotation.from_axis_angle(axis, angle)
                if slot == "a":
                    return CentralParams(rot, Rotation.identity())
                return CentralParams(Rotation.identity(), rot)

            xp = central_deform(params(+h), base).variable_vector()
            xm = central_deform(params(-h), base).variable_vector()
            rows.append((xp - xm) / (2.0 * h))
    return np.array(rows)
