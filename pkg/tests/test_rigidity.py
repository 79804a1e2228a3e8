import numpy as np
import pytest

from sodaflex.central import central_tangent_basis, sample_central
from sodaflex.dihedral import tilt_tangent, trace_tilt_curve
from sodaflex.framework import (PeriodicPlacement, PeriodLattice,
                                ideal_sodalite)
from sodaflex.geom import RigidMotion, Tetrahedron
from sodaflex.rigidity import (build_constraint_system, edge_system_report,
                               finite_linkage_dof, flex_dimension, jacobian,
                               trivial_motion_basis)


@pytest.fixture(scope="module")
def ideal():
    return ideal_sodalite()


@pytest.fixture(scope="module")
def system(ideal):
    return build_constraint_system(ideal)


class TestConstraintSystem:
    def test_counts(self, system):
        assert system.n_variables == 63
        assert system.n_constraints == 54
        assert len(system.edges) == 36
        assert len(system.marks) == 6

    def test_base_residual_small(self, system):
        assert np.abs(system.residual(system.base_vector())).max() < 1e-10

    def test_residual_at_deformed_placements(self):
        for p in sample_central(10, 19):
            cs = build_constraint_system(p)
            assert np.abs(cs.residual(cs.base_vector())).max() < 1e-8

    def test_perturbation_sparsity(self, system):
        x = system.base_vector().copy()
        vid = 3  # a free vertex
        base = system.residual(x)
        x[3 * vid] += 1e-3
        delta = system.residual(x) - base
        touched = set()
        for r, (i, j) in enumerate(system.edges):
            if vid in (i, j):
                touched.add(r)
        row = len(system.edges)
        for (si, ti, _) in system.marks:
            if vid in (si, ti):
                touched.update(range(row, row + 3))
            row += 3
        nonzero = set(np.nonzero(np.abs(delta) > 1e-15)[0])
        assert nonzero
        assert nonzero.issubset(touched)
        edge_rows_touched = {r for r in touched if r < len(system.edges)}
        assert edge_rows_touched.issubset(nonzero)

    def test_invalid_placement_rejected(self, ideal):
        bad = PeriodicPlacement(ideal.ring, PeriodLattice(np.eye(3)),
                                ideal.period_marks)
        with pytest.raises(ValueError):
            build_constraint_system(bad)


class TestJacobian:
    def test_matches_central_differences(self, system):
        x0 = system.base_vector()
        J = jacobian(system, x0)
        for h in (1e-6, 5e-7):
            rng = np.random.default_rng(41)
            cols = rng.choice(63, size=20, replace=False)
            for c in cols:
                e = np.zeros(63)
                e[c] = h
                fd = (system.residual(x0 + e) - system.residual(x0 - e)) / (2 * h)
                assert np.abs(fd - J[:, c]).max() < 1e-6

    def test_periodicity_rows_constant(self, system):
        rng = np.random.default_rng(42)
        x0 = system.base_vector()
        x1 = x0 + 0.1 * rng.standard_normal(63)
        J0 = jacobian(system, x0)[36:]
        J1 = jacobian(system, x1)[36:]
        assert np.array_equal(J0, J1)

    def test_singular_values_invariant_under_rigid_motion(self, ideal, system):
        rng = np.random.default_rng(43)
        s0 = np.linalg.svd(system.jacobian(system.base_vector()), compute_uv=False)
        m = RigidMotion.random(rng)
        moved = ideal.transformed(m.rotation.matrix, m.translation)
        cs = build_constraint_system(moved)
        s1 = np.linalg.svd(cs.jacobian(cs.base_vector()), compute_uv=False)
        assert np.abs(s0 - s1).max() < 1e-9 * s0[0]


class TestTrivialMotions:
    def test_in_kernel_at_reference(self, ideal, system):
        J = system.jacobian(system.base_vector())
        basis = trivial_motion_basis(ideal)
        assert np.abs(J @ basis.T).max() < 1e-10

    def test_in_kernel_at_deformed_placements(self):
        for p in sample_central(5, 23):
            cs = build_constraint_system(p)
            J = cs.jacobian(cs.base_vector())
            basis = trivial_motion_basis(p)
            assert np.abs(J @ basis.T).max() < 1e-7

    def test_rank_six(self, ideal):
        basis = trivial_motion_basis(ideal)
        assert np.linalg.matrix_rank(basis, tol=1e-9) == 6

    def test_translations_have_zero_lattice_components(self, ideal):
        basis = trivial_motion_basis(ideal)
        assert np.abs(basis[:3, 54:]).max() == 0.0


class TestFlexDimension:
    def test_at_least_three_nontrivial(self, ideal):
        report = flex_dimension(ideal, 1e-8)
        assert report.nontrivial_dim >= 3

    def test_naive_count(self, system):
        assert system.n_variables - system.n_constraints - 6 == 3

    def test_stable_over_tolerance_range(self, ideal):
        dims = {flex_dimension(ideal, tol).nontrivial_dim
                for tol in (1e-10, 1e-9, 1e-8, 1e-7, 1e-6)}
        assert len(dims) == 1

    def test_basis_orthonormal_and_orthogonal_to_trivial(self, ideal):
        report = flex_dimension(ideal, 1e-8)
        basis = report.flex_basis
        gram = basis @ basis.T
        assert np.abs(gram - np.eye(len(basis))).max() < 1e-9
        triv = trivial_motion_basis(ideal)
        assert np.abs(basis @ triv.T).max() < 1e-9

    def test_explicit_tangents_span_seven_kernel_directions(self, ideal, system):
        J = system.jacobian(system.base_vector())
        tangents = central_tangent_basis(1e-5)
        unit = tangents / np.linalg.norm(tangents, axis=1, keepdims=True)
        stack = np.vstack([unit, tilt_tangent(1e-4)])
        for row in stack:
            assert np.abs(J @ row).max() < 1e-6
        s = np.linalg.svd(stack, compute_uv=False)
        assert (s > 1e-6 * s[0]).sum() >= 7

    def test_tangent_from_traced_curve_in_kernel(self, system):
        plus = trace_tilt_curve(step=1e-8, max_steps=1, direction=+1)
        minus = trace_tilt_curve(step=1e-8, max_steps=1, direction=-1)
        secant = (plus.points[1].placement.variable_vector()
                  - minus.points[1].placement.variable_vector())
        secant /= np.linalg.norm(secant)
        J = system.jacobian(system.base_vector())
        assert np.abs(J @ secant).max() < 1e-6


class TestFiniteLinkage:
    def test_ring_has_twelve_dof(self, ideal):
        assert finite_linkage_dof(ideal.ring) == 12

    def test_gap_ratio_large(self, ideal):
        from sodaflex.framework import RING_EDGES_BY_ID
        report = edge_system_report(ideal.ring.distinct_vertices(), RING_EDGES_BY_ID)
        assert report.dof == 12
        assert report.gap_ratio > 1e4

    def test_single_tetrahedron_rigid(self, ideal):
        t = ideal.ring.tetrahedra[0]
        edges = [(i, j) for i in range(4) for j in range(i + 1, 4)]
        assert edge_system_report(t.verts, edges).dof == 0

    def test_two_tetrahedra_sharing_vertex(self, ideal):
        a: Tetrahedron = ideal.ring.tetrahedra[0]
        b: Tetrahedron = ideal.ring.tetrahedra[1]  # shares vertex 0 with a
        verts = np.vstack([a.verts, b.verts[1:]])  # 7 distinct vertices
        idx_b = [0, 4, 5, 6]
        edges = [(i, j) for i in range(4) for j in range(i + 1, 4)]
        edges += [(idx_b[i], idx_b[j]) for i in range(4) for j in range(i + 1, 4)]
        report = edge_system_report(verts, edges)
        assert len(verts) * 3 == 21
        assert len(edges) == 12
        assert report.dof == 3
