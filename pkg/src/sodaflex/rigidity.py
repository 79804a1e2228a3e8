"""Infinitesimal rigidity of the periodic constraint system.

Variables are the 18 distinct ring vertices followed by the 3 lattice
generators (63 scalars). Constraints are the 36 squared edge lengths,
one per tetrahedron edge, and the 6 vector period identifications (18
scalar equations), 54 equations in all. Squared distances keep every
constraint polynomial and the Jacobian exact.

The naive count 63 - 54 - 6 leaves three degrees of freedom once the six
rigid motions are discounted; the actual kernel at the reference
placement is larger, which is what the explicit deformation families
show. Numerical rank uses a relative singular value cutoff; the full
spectrum is always reported so borderline gaps stay visible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .framework import (EDGE, N_DISTINCT_VERTICES, PeriodicPlacement,
                        RING_EDGES_BY_ID, RING_POSITION, SixRing,
                        _SLOT_TO_ID, validate_placement)

__all__ = [
    "ConstraintSystem",
    "FlexReport",
    "EdgeSystemReport",
    "build_constraint_system",
    "jacobian",
    "trivial_motion_basis",
    "flex_dimension",
    "finite_linkage_dof",
    "edge_system_report",
]

N_VARIABLES = 3 * N_DISTINCT_VERTICES + 9   # 63
N_CONSTRAINTS = len(RING_EDGES_BY_ID) + 18  # 54


@dataclass(frozen=True, eq=False)
class ConstraintSystem:
    """Edge-length plus periodicity constraints anchored at a placement."""

    base: PeriodicPlacement
    edges: tuple[tuple[int, int], ...]
    marks: tuple[tuple[int, int, tuple[int, int, int]], ...]  # (source id, target id, coeffs)
    edge_length: float = EDGE

    @property
    def n_variables(self) -> int:
        return N_VARIABLES

    @property
    def n_constraints(self) -> int:
        return len(self.edges) + 3 * len(self.marks)

    def base_vector(self) -> np.ndarray:
        return self.base.variable_vector()

    def residual(self, x: np.ndarray) -> np.ndarray:
        v = x[:3 * N_DISTINCT_VERTICES].reshape(N_DISTINCT_VERTICES, 3)
        lam = x[3 * N_DISTINCT_VERTICES:].reshape(3, 3)
        out = np.empty(self.n_constraints)
        r = 0
        target = self.edge_length ** 2
        for (i, j) in self.edges:
            d = v[i] - v[j]
            out[r] = d @ d - target
            r += 1
        for (si, ti, coeffs) in self.marks:
            out[r:r + 3] = v[ti] - v[si] - np.asarray(coeffs, dtype=float) @ lam
            r += 3
        return out

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        v = x[:3 * N_DISTINCT_VERTICES].reshape(N_DISTINCT_VERTICES, 3)
        J = np.zeros((self.n_constraints, N_VARIABLES))
        r = 0
        for (i, j) in self.edges:
            d = 2.0 * (v[i] - v[j])
            J[r, 3 * i:3 * i + 3] = d
            J[r, 3 * j:3 * j + 3] = -d
            r += 1
        off = 3 * N_DISTINCT_VERTICES
        for (si, ti, coeffs) in self.marks:
            for m in range(3):
                J[r, 3 * ti + m] = 1.0
                J[r, 3 * si + m] = -1.0
                for k in range(3):
                    J[r, off + 3 * k + m] = -float(coeffs[k])
                r += 1
        return J


def build_constraint_system(p: PeriodicPlacement) -> ConstraintSystem:
    report = validate_placement(p, 1e-6)
    if not report.passed:
        raise ValueError(f"placement fails validation: {report.failures()}")
    marks = []
    for m in p.period_marks:
        si = _SLOT_TO_ID[(RING_POSITION[m.source[0]], m.source[1])]
        ti = _SLOT_TO_ID[(RING_POSITION[m.target[0]], m.target[1])]
        marks.append((si, ti, m.coeffs))
    return ConstraintSystem(p, RING_EDGES_BY_ID, tuple(marks))


def jacobian(cs: ConstraintSystem, x: np.ndarray) -> np.ndarray:
    return cs.jacobian(np.asarray(x, dtype=float))


def trivial_motion_basis(p: PeriodicPlacement) -> np.ndarray:
    """Six rigid-motion velocities, shape (6, 63): translations then rotations.

    Translations move every vertex and leave the lattice alone; the
    infinitesimal rotations act on vertices and generators alike.
    """
    verts = p.ring.distinct_vertices()
    lam = p.lattice.generators
    rows = []
    for k in range(3):
        t = np.zeros(N_VARIABLES)
        t[np.arange(N_DISTINCT_VERTICES) * 3 + k] = 1.0
        rows.append(t)
    for k in range(3):
        w = np.zeros(3)
        w[k] = 1.0
        rows.append(np.concatenate([np.cross(w, verts).ravel(),
                                    np.cross(w, lam).ravel()]))
    return np.array(rows)


@dataclass(frozen=True, eq=False)
class FlexReport:
    """Numerical kernel analysis of the constraint Jacobian."""

    nontrivial_dim: int
    kernel_dim: int
    trivial_dim: int
    singular_values: np.ndarray
    flex_basis: np.ndarray  # (nontrivial_dim, 63), orthonormal, orthogonal to trivial motions
    tol: float
    gap_ratio: float  # smallest retained singular value / largest discarded

    def to_dict(self) -> dict:
        return {
            "nontrivial_dim": self.nontrivial_dim,
            "kernel_dim": self.kernel_dim,
            "trivial_dim": self.trivial_dim,
            "tol": self.tol,
            "gap_ratio": self.gap_ratio,
            "singular_values": [float(s) for s in self.singular_values],
            "flex_basis": [[float(x) for x in row] for row in self.flex_basis],
        }


def _kernel_from_svd(J: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray, int, float]:
    """Null-space basis rows, singular values, rank, and spectral gap ratio."""
    _, s, vh = np.linalg.svd(J, full_matrices=True)
    smax = s[0] if len(s) else 0.0
    rank = int((s > tol * smax).sum())
    discarded = s[rank:] if rank < len(s) else np.array([])
    if rank == 0:
        gap = 0.0
    elif discarded.size == 0 or discarded.max() == 0.0:
        gap = float("inf")
    else:
        gap = float(s[rank - 1] / discarded.max())
    return vh[rank:], s, rank, gap


def flex_dimension(p: PeriodicPlacement, tol: float = 1e-8) -> FlexReport:
    """Kernel of the constraint Jacobian with rigid motions projected out.

    Raises ValueError if the kernel fails to contain the six trivial
    motions, which indicates a misconfigured tolerance rather than a
    rigid placement.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    cs = build_constraint_system(p)
    J = cs.jacobian(cs.base_vector())
    kernel, s, rank, gap = _kernel_from_svd(J, tol)
    kernel_dim = kernel.shape[0]
    if kernel_dim < 6:
        raise ValueError(
            f"kernel dimension {kernel_dim} < 6: trivial motions unresolved, "
            f"check the rank tolerance (spectrum: {s})")

    triv = trivial_motion_basis(p)
    q, _ = np.linalg.qr(triv.T)
    proj = kernel - (kernel @ q) @ q.T
    _, ps, pvh = np.linalg.svd(proj, full_matrices=False)
    n_nontrivial = kernel_dim - 6
    basis = pvh[:n_nontrivial] if n_nontrivial > 0 else np.zeros((0, N_VARIABLES))
    return FlexReport(
        nontrivial_dim=n_nontrivial,
        kernel_dim=kernel_dim,
        trivial_dim=6,
        singular_values=s,
        flex_basis=basis,
        tol=tol,
        gap_ratio=gap,
    )


@dataclass(frozen=True, eq=False)
class EdgeSystemReport:
    """Kernel analysis of a pure edge-length system (no periodicity)."""

    dof: int  # kernel dimension minus the six rigid motions
    kernel_dim: int
    singular_values: np.ndarray
    gap_ratio: float


def edge_system_report(vertices: np.ndarray, edges, tol: float = 1e-8) -> EdgeSystemReport:
    """Degrees of freedom of a bar linkage given as vertices and edges."""
    v = np.asarray(vertices, dtype=float)
    n = len(v)
    J = np.zeros((len(edges), 3 * n))
    for r, (i, j) in enumerate(edges):
        d = 2.0 * (v[i] - v[j])
        J[r, 3 * i:3 * i + 3] = d
        J[r, 3 * j:3 * j + 3] = -d
    kernel, s, rank, gap = _kernel_from_svd(J, tol)
    return EdgeSystemReport(
        dof=kernel.shape[0] - 6,
        kernel_dim=kernel.shape[0],
        singular_values=s,
        gap_ratio=gap,
    )


def finite_linkage_dof(ring: SixRing, tol: float = 1e-8) -> int:
    """Degrees of freedom of the ring with edge constraints only.

    No periodicity, no lattice: 54 vertex coordinates, 36 edge equations,
    rigid motions discounted.
    """
    return edge_system_report(ring.distinct_vertices(), RING_EDGES_BY_ID, tol).dof
