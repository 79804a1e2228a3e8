import numpy as np

from sodaflex.central import sample_central
from sodaflex.framework import RingLabel, ideal_sodalite, validate_placement
from sodaflex.geom import RigidMotion
from sodaflex.symmetry import (SignedPermutation, central_symmetry_residual,
                               cube_group, d3_residual, ring_label_action)


def label_map(pairs):
    out = {}
    for a, b in pairs:
        out[RingLabel.parse(a)] = RingLabel.parse(b)
        out[RingLabel.parse(b)] = RingLabel.parse(a)
    return out


class TestCubeGroup:
    def test_order(self):
        assert len(cube_group()) == 48

    def test_identity_and_inverses(self):
        group = cube_group()
        assert any(g.is_identity() for g in group)
        for g in group:
            assert g.compose(g.inverse()).is_identity()

    def test_closure(self):
        group = cube_group()
        keys = {(g.perm, g.signs) for g in group}
        rng = np.random.default_rng(31)
        for _ in range(100):
            a, b = rng.integers(0, 48, size=2)
            c = group[a].compose(group[b])
            assert (c.perm, c.signs) in keys

    def test_compose_matches_matrix(self):
        group = cube_group()
        rng = np.random.default_rng(32)
        for _ in range(30):
            a, b = group[rng.integers(0, 48)], group[rng.integers(0, 48)]
            assert np.array_equal(a.compose(b).matrix, a.matrix @ b.matrix)

    def test_transitive_on_cage_barycenters(self):
        from sodaflex.framework import sodalite_cage
        p = ideal_sodalite()
        tets, _ = sodalite_cage(p)
        bary = np.array([t.barycenter() for t in tets])
        seed = bary[0]
        orbit = set()
        for g in cube_group():
            img = g.apply(seed)
            j = int(np.argmin(np.linalg.norm(bary - img, axis=1)))
            assert np.linalg.norm(bary[j] - img) < 1e-12
            orbit.add(j)
        assert len(orbit) == 24

    def test_all_elements_preserve_placement_validity(self):
        p = ideal_sodalite()
        for g in cube_group():
            moved = p.transformed(g.matrix)
            assert validate_placement(moved, 1e-9).passed


class TestRingLabelAction:
    def test_first_two_coordinate_transposition(self):
        g = SignedPermutation((1, 0, 2), (1, 1, 1))
        action = ring_label_action(g)
        assert action.stabilizes
        assert action.mapping == label_map([("T1-", "T2+"), ("T3-", "T3+"),
                                            ("T2-", "T1+")])

    def test_identity(self):
        action = ring_label_action(SignedPermutation((0, 1, 2), (1, 1, 1)))
        assert action.stabilizes
        assert all(k == v for k, v in action.mapping.items())

    def test_cyclic_permutation_cycles_lower_indices(self):
        # coordinate 1 -> 2 -> 3 -> 1 keeps signs and cycles tetrahedron indices
        g = SignedPermutation((2, 0, 1), (1, 1, 1))
        action = ring_label_action(g)
        assert action.stabilizes
        for lab, img in action.mapping.items():
            assert img.sign == lab.sign
            assert img.index == {1: 2, 2: 3, 3: 1}[lab.index]

    def test_sign_changes_do_not_stabilize(self):
        g = SignedPermutation((0, 1, 2), (-1, 1, 1))
        assert not ring_label_action(g).stabilizes

    def test_homomorphism_on_stabilizer(self):
        import itertools
        stab = [SignedPermutation(p, (1, 1, 1))
                for p in itertools.permutations((0, 1, 2))]
        for g in stab:
            for h in stab:
                gh = ring_label_action(g.compose(h)).mapping
                g_then = ring_label_action(g).mapping
                h_first = ring_label_action(h).mapping
                assert gh == {lab: g_then[h_first[lab]] for lab in h_first}


class TestCentralResidual:
    def test_ideal_is_centrally_symmetric(self):
        res = central_symmetry_residual(ideal_sodalite().ring)
        assert res.value < 1e-12

    def test_central_deformations_keep_it(self):
        for p in sample_central(20, 5):
            assert central_symmetry_residual(p.ring).value < 1e-10

    def test_fitted_center_agrees_at_ideal(self):
        res = central_symmetry_residual(ideal_sodalite().ring)
        assert np.linalg.norm(res.witness["center"] - res.witness["fitted_center"]) < 1e-12

    def test_tilt_breaks_it(self):
        from sodaflex.dihedral import trace_tilt_curve
        trace = trace_tilt_curve(step=0.005, max_steps=12, direction=+1)
        values = [central_symmetry_residual(pt.placement.ring).value
                  for pt in trace.points]
        assert values[-1] > 0.01


class TestD3Residual:
    def test_ideal(self):
        assert d3_residual(ideal_sodalite().ring).value < 1e-12

    def test_random_central_deformation_breaks_it(self):
        p = sample_central(1, 7)[0]
        assert d3_residual(p.ring).value > 1e-3

    def test_dihedral_construction_keeps_it(self):
        from sodaflex.dihedral import D3RingParams, IDEAL_PHI, build_d3_ring
        ring = build_d3_ring(D3RingParams(0.97, IDEAL_PHI - 0.6))
        assert d3_residual(ring).value < 1e-9


class TestRigidMotionInvariance:
    def test_residuals_invariant(self):
        rng = np.random.default_rng(33)
        p = sample_central(1, 11)[0]
        c0 = central_symmetry_residual(p.ring).value
        d0 = d3_residual(p.ring).value
        for _ in range(3):
            m = RigidMotion.random(rng)
            ring = p.ring.map_vertices(lambda v: m.apply(v))
            assert abs(central_symmetry_residual(ring).value - c0) < 1e-9
            assert abs(d3_residual(ring).value - d0) < 1e-9
