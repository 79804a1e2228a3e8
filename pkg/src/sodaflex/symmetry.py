"""The cube point group and numerical symmetry residuals for 6-rings.

The 48 signed coordinate permutations act on placements; the subgroup of
pure coordinate permutations stabilizes the reference ring. Residuals
measure how far a ring is from central symmetry (point inversion) and
from the dihedral symmetry generated by three reflections with a common
axis. Both residuals are max-norm vertex mismatches, so a value reads
directly as a distance in model units.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product

import numpy as np

from .framework import RING_ORDER, RingLabel, SixRing

__all__ = [
    "SignedPermutation",
    "LabelAction",
    "SymmetryResidual",
    "cube_group",
    "ring_label_action",
    "central_symmetry_residual",
    "d3_residual",
    "TRANSPOSITION_PAIRS",
]

# label pairings induced by the three coordinate transpositions; the Pij/Qij
# contacts named by the same index pair span the matching reflection plane
TRANSPOSITION_PAIRS: dict[tuple[int, int], tuple[tuple[str, str], ...]] = {
    (1, 2): (("T1-", "T2+"), ("T3-", "T3+"), ("T2-", "T1+")),
    (2, 3): (("T1-", "T1+"), ("T2-", "T3+"), ("T3-", "T2+")),
    (1, 3): (("T1-", "T3+"), ("T2-", "T2+"), ("T3-", "T1+")),
}


@dataclass(frozen=True)
class SignedPermutation:
    """Coordinate map w[i] = signs[i] * v[perm[i]]."""

    perm: tuple[int, int, int]
    signs: tuple[int, int, int]

    def __post_init__(self):
        if sorted(self.perm) != [0, 1, 2] or any(s not in (1, -1) for s in self.signs):
            raise ValueError("invalid signed permutation")

    def apply(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return pts[..., list(self.perm)] * np.asarray(self.signs, dtype=float)

    @property
    def matrix(self) -> np.ndarray:
        m = np.zeros((3, 3))
        for i in range(3):
            m[i, self.perm[i]] = self.signs[i]
        return m

    def compose(self, other: "SignedPermutation") -> "SignedPermutation":
        """Map equal to applying ``other`` first, then ``self``."""
        perm = tuple(other.perm[self.perm[i]] for i in range(3))
        signs = tuple(self.signs[i] * other.signs[self.perm[i]] for i in range(3))
        return SignedPermutation(perm, signs)

    def inverse(self) -> "SignedPermutation":
        inv = [0, 0, 0]
        for i in range(3):
            inv[self.perm[i]] = i
        signs = tuple(self.signs[inv[j]] for j in range(3))
        return SignedPermutation(tuple(inv), signs)

    def is_identity(self) -> bool:
        return self.perm == (0, 1, 2) and self.signs == (1, 1, 1)


def cube_group() -> list[SignedPermutation]:
    """All 48 signed coordinate permutations, in a fixed deterministic order."""
    return [SignedPermutation(p, s)
            for p in permutations((0, 1, 2))
            for s in product((1, -1), repeat=3)]


@dataclass(frozen=True)
class LabelAction:
    """Induced permutation of ring labels, if the map stabilizes the ring."""

    stabilizes: bool
    mapping: dict[RingLabel, RingLabel] | None


def ring_label_action(g: SignedPermutation, ring: SixRing | None = None,
                      tol: float = 1e-9) -> LabelAction:
    """Label permutation induced by ``g``, matched on transformed barycenters.

    Group elements that move the ring off itself (all elements involving
    sign changes do, since they move the ring center) are flagged rather
    than treated as errors.
    """
    if ring is None:
        from .framework import ideal_sodalite
        ring = ideal_sodalite().ring
    bary = ring.barycenters()
    mapping: dict[RingLabel, RingLabel] = {}
    for k, lab in enumerate(RING_ORDER):
        img = g.apply(bary[k])
        dists = np.linalg.norm(bary - img, axis=1)
        j = int(np.argmin(dists))
        if dists[j] > tol:
            return LabelAction(False, None)
        mapping[lab] = RING_ORDER[j]
    if len(set(mapping.values())) != 6:
        return LabelAction(False, None)
    return LabelAction(True, mapping)


@dataclass(frozen=True, eq=False)
class SymmetryResidual:
    """Max vertex mismatch under the best candidate symmetry."""

    value: float
    witness: dict = field(default_factory=dict)


def _pair_mismatch(ring: SixRing, label_a: RingLabel, label_b: RingLabel,
                   image_fn) -> float:
    """Worst distance from image_fn(vertex of a) to the nearest vertex of b."""
    va = ring.tetra(label_a).verts
    vb = ring.tetra(label_b).verts
    worst = 0.0
    for v in va:
        img = image_fn(v)
        worst = max(worst, float(np.min(np.linalg.norm(vb - img, axis=1))))
    return worst


def central_symmetry_residual(ring: SixRing) -> SymmetryResidual:
    """Mismatch under point inversion through the midpoint of P13 and Q13.

    The candidate center comes from the construction, not from a fit; a
    least-squares center is reported alongside for diagnostics.
    """
    center = 0.5 * (ring.contact_position("P13") + ring.contact_position("Q13"))

    def inv(v):
        return 2.0 * center - v

    worst = 0.0
    matched = []
    for lab in RING_ORDER:
        partner = RingLabel(lab.index, -lab.sign)
        va = ring.tetra(lab).verts
        vb = ring.tetra(partner).verts
        for i, v in enumerate(va):
            img = inv(v)
            j = int(np.argmin(np.linalg.norm(vb - img, axis=1)))
            worst = max(worst, float(np.linalg.norm(vb[j] - img)))
            matched.append(0.5 * (v + vb[j]))
    fitted = np.mean(matched, axis=0)
    return SymmetryResidual(worst, {"center": center, "fitted_center": fitted})


def d3_residual(ring: SixRing) -> SymmetryResidual:
    """Mismatch under the three reflections fitted from the barycenter hexagon.

    The common axis is the best-fit normal of the barycenters; each
    reflection plane contains the axis and the pair of contacts named by
    the corresponding index pair. Non-coplanar barycenters are flagged
    and measured against the best-fit plane.
    """
    bary = ring.barycenters()
    center = bary.mean(axis=0)
    _, _, vh = np.linalg.svd(bary - center)
    axis = vh[2]
    if axis @ np.ones(3) < 0:
        axis = -axis
    coplanarity = float(np.abs((bary - center) @ axis).max())

    worst = 0.0
    normals = {}
    for (i, j), pairs in TRANSPOSITION_PAIRS.items():
        anchor = ring.contact_position(f"P{i}{j}") - center
        n = np.cross(axis, anchor)
        nn = np.linalg.norm(n)
        if nn < 1e-12:
            return SymmetryResidual(float("inf"),
                                    {"flagged": True, "axis": axis, "center": center})
        n = n / nn
        normals[(i, j)] = n

        def reflect(v, n=n):
            return v - 2.0 * ((v - center) @ n) * n

        for (a, b) in pairs:
            la, lb = RingLabel.parse(a), RingLabel.parse(b)
            worst = max(worst, _pair_mismatch(ring, la, lb, reflect))
            worst = max(worst, _pair_mismatch(ring, lb, la, reflect))
    return SymmetryResidual(worst, {
        "axis": axis,
        "center": center,
        "plane_normals": normals,
        "coplanarity": coplanarity,
        "flagged": coplanarity > 1e-9,
    })
