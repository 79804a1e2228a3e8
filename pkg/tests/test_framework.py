import numpy as np
import pytest

from sodaflex.framework import (SQRT2, PeriodicPlacement, PeriodLattice,
                                RingLabel, SixRing, Tetrahedron,
                                cage_assignment, cage_barycenter_spectrum,
                                detect_period_marks, generate_patch,
                                ideal_sodalite, quotient_graph,
                                sodalite_cage, validate_placement)

A = SQRT2 - 1.0

EXPECTED_REFERENCE_VERTS = np.array([
    [1.0, 0.0, 1.0],
    [1.0, 0.0, 2.0 * SQRT2 - 1.0],
    [A, A, SQRT2],
    [A, -A, SQRT2],
])

EXPECTED_GENERATORS = SQRT2 * np.array([
    [1.0, -1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
])


class TestIdealPlacement:
    def test_reference_tetrahedron_exact(self):
        p = ideal_sodalite()
        t1m = p.ring.tetra(RingLabel(1, -1))
        assert np.abs(t1m.verts - EXPECTED_REFERENCE_VERTS).max() < 1e-12

    def test_lattice_exact(self):
        p = ideal_sodalite()
        assert np.abs(p.lattice.generators - EXPECTED_GENERATORS).max() < 1e-12

    def test_validates(self):
        assert validate_placement(ideal_sodalite(), 1e-9).passed

    def test_bit_reproducible(self):
        a, b = ideal_sodalite(), ideal_sodalite()
        assert np.array_equal(a.variable_vector(), b.variable_vector())

    def test_generator_pair_sums_orthogonal(self):
        g = ideal_sodalite().lattice.generators
        sums = np.array([g[1] + g[2], g[2] + g[0], g[0] + g[1]])
        gram = sums @ sums.T
        assert np.abs(gram - np.diag(np.diag(gram))).max() < 1e-12
        assert np.abs(np.linalg.norm(sums, axis=1) - 2.0 * SQRT2).max() < 1e-12

    def test_pair_sum_sublattice_has_index_two(self):
        p = ideal_sodalite()
        g = p.lattice.generators
        sums = np.array([g[1] + g[2], g[2] + g[0], g[0] + g[1]])
        ratio = PeriodLattice(sums).volume() / p.lattice.volume()
        assert abs(ratio - 2.0) < 1e-12

    def test_ring_barycenters_form_unit_hexagon(self):
        p = ideal_sodalite()
        bary = p.ring.barycenters()
        center = np.array([1.0, 1.0, 1.0]) / SQRT2
        assert np.abs(np.linalg.norm(bary - center, axis=1) - 1.0).max() < 1e-10
        ring_edges = [np.linalg.norm(bary[i] - bary[(i + 1) % 6]) for i in range(6)]
        assert np.abs(np.array(ring_edges) - 1.0).max() < 1e-10
        # planarity
        _, s, _ = np.linalg.svd(bary - bary.mean(axis=0))
        assert s[2] < 1e-12


class TestPeriodMarks:
    def test_detection_finds_six_balanced_marks(self):
        p = ideal_sodalite()
        marks = detect_period_marks(p.ring, p.lattice)
        assert len(marks) == 6
        for k in range(3):
            assert sum(1 for m in marks if m.coeffs[k] == 1) == 2

    def test_three_period_vectors_each_twice(self):
        p = ideal_sodalite()
        vecs = [tuple(np.round(p.realized_mark_vector(m), 9)) for m in p.period_marks]
        uniq = set(vecs)
        assert len(uniq) == 3
        for v in uniq:
            assert vecs.count(v) == 2

    def test_detection_rejects_wrong_lattice(self):
        p = ideal_sodalite()
        with pytest.raises(ValueError):
            detect_period_marks(p.ring, PeriodLattice(np.eye(3)))


class TestValidation:
    def test_perturbed_vertex_fails(self):
        p = ideal_sodalite()
        tets = [Tetrahedron(t.verts.copy()) for t in p.ring.tetrahedra]
        v = tets[0].verts.copy()
        v[1] += np.array([1e-3, 0.0, 0.0])  # free vertex of T1-, used by a period mark
        tets[0] = Tetrahedron(v)
        bad = PeriodicPlacement(SixRing(tets), p.lattice, p.period_marks)
        report = validate_placement(bad, 1e-9)
        assert not report.passed
        assert "regular_tetrahedra" in report.failures()
        assert "period_marks" in report.failures()

    def test_perturbed_contact_fails_contacts(self):
        p = ideal_sodalite()
        tets = [Tetrahedron(t.verts.copy()) for t in p.ring.tetrahedra]
        v = tets[0].verts.copy()
        v[0] += np.array([0.0, 1e-3, 0.0])  # P13 contact slot on one side only
        tets[0] = Tetrahedron(v)
        bad = PeriodicPlacement(SixRing(tets), p.lattice, p.period_marks)
        report = validate_placement(bad, 1e-9)
        assert "contacts_coincide" in report.failures()

    def test_tol_must_be_positive(self):
        with pytest.raises(ValueError):
            validate_placement(ideal_sodalite(), 0.0)


class TestQuotientGraph:
    def test_orbit_counts(self):
        q = quotient_graph(ideal_sodalite())
        assert q.n_vertex_orbits == 12
        assert q.n_edge_orbits == 36

    def test_degree_six_everywhere(self):
        q = quotient_graph(ideal_sodalite())
        assert set(q.degrees()) == {6}

    def test_connected(self):
        assert quotient_graph(ideal_sodalite()).is_connected()

    def test_invariant_under_rigid_motion(self):
        from sodaflex.geom import RigidMotion
        rng = np.random.default_rng(21)
        p = ideal_sodalite()
        m = RigidMotion.random(rng)
        moved = p.transformed(m.rotation.matrix, m.translation)
        q0, q1 = quotient_graph(p), quotient_graph(moved)
        assert q0.n_vertex_orbits == q1.n_vertex_orbits
        assert sorted(q0.edges) == sorted(q1.edges)

    def test_requires_valid_placement(self):
        p = ideal_sodalite()
        bad = PeriodicPlacement(p.ring, PeriodLattice(np.eye(3)), p.period_marks)
        with pytest.raises(ValueError):
            quotient_graph(bad)


class TestSodaliteCage:
    def test_counts_and_hull(self):
        tets, hull = sodalite_cage(ideal_sodalite())
        assert len(tets) == 24
        assert hull.face_sizes() == {4: 6, 6: 8}
        assert len(hull.vertices) == 24

    def test_hull_centrally_symmetric(self):
        _, hull = sodalite_cage(ideal_sodalite())
        assert hull.is_centrally_symmetric(1e-9)

    def test_barycenters_match_hull_vertices(self):
        tets, hull = sodalite_cage(ideal_sodalite())
        bary = np.array([t.barycenter() for t in tets])
        assert np.linalg.norm(bary - hull.vertices, axis=1).max() < 1e-9

    def test_cage_assignment_spectrum(self):
        p = ideal_sodalite()
        slots = cage_assignment(p)
        assert len(slots) == 24
        spec = cage_barycenter_spectrum(p, slots)
        assert len(spec) == 24 * 23 // 2
        assert abs(spec[0] - 1.0) < 1e-9  # nearest barycenters are hexagon neighbors


class TestPatch:
    def test_shells_zero(self):
        p = ideal_sodalite()
        assert len(generate_patch(p, 0)) == 6

    def test_shells_one_count(self):
        assert len(generate_patch(ideal_sodalite(), 1)) == 162

    def test_no_interpenetration_in_reference(self):
        tets = generate_patch(ideal_sodalite(), 1)
        bary = np.array([t.barycenter() for t in tets])
        d = np.linalg.norm(bary[:, None, :] - bary[None, :, :], axis=2)
        d[np.arange(len(bary)), np.arange(len(bary))] = np.inf
        assert d.min() > 1.0 - 1e-9

    def test_negative_shells_rejected(self):
        with pytest.raises(ValueError):
            generate_patch(ideal_sodalite(), -1)
