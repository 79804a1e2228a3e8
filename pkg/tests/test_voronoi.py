import numpy as np
import pytest

from sodaflex.framework import ideal_lattice, ideal_sodalite, sodalite_cage
from sodaflex.geom import PeriodLattice, lattice_volume
from sodaflex.voronoi import voronoi_cell


def brute_force_is_voronoi_vertex(point, lattice, tol=1e-9) -> bool:
    """A Voronoi vertex is equidistant from the origin and >= 3 other
    lattice points, all at the minimal distance."""
    pts = [np.zeros(3)]
    g = lattice.generators
    for a in range(-3, 4):
        for b in range(-3, 4):
            for c in range(-3, 4):
                if (a, b, c) != (0, 0, 0):
                    pts.append(np.array([a, b, c], float) @ g)
    dists = np.sort(np.linalg.norm(np.array(pts) - point, axis=1))
    return dists[3] - dists[0] <= tol


class TestKelvinCell:
    def test_counts(self):
        cell = voronoi_cell(ideal_lattice())
        assert len(cell.vertices) == 24
        assert cell.face_sizes() == {4: 6, 6: 8}
        assert len(cell.edges) == 36

    def test_euler_and_planarity(self):
        cell = voronoi_cell(ideal_lattice())
        assert cell.euler_characteristic() == 2
        assert cell.max_face_planarity_error() < 1e-9

    def test_every_edge_in_two_faces(self):
        cell = voronoi_cell(ideal_lattice())
        count: dict[tuple, int] = {}
        for f in cell.faces:
            m = len(f)
            for k in range(m):
                e = tuple(sorted((f[k], f[(k + 1) % m])))
                count[e] = count.get(e, 0) + 1
        assert set(count.values()) == {2}

    def test_vertices_are_cage_barycenters(self):
        placement = ideal_sodalite()
        cell = voronoi_cell(placement.lattice)
        tets, _ = sodalite_cage(placement)
        bary = np.array([t.barycenter() for t in tets])
        for v in cell.vertices:
            assert np.min(np.linalg.norm(bary - v, axis=1)) < 1e-9
            assert brute_force_is_voronoi_vertex(v, placement.lattice)

    def test_edge_length_is_one(self):
        cell = voronoi_cell(ideal_lattice())
        for (a, b) in cell.edges:
            assert abs(np.linalg.norm(cell.vertices[a] - cell.vertices[b]) - 1.0) < 1e-12

    def test_volume_matches_lattice(self):
        lat = ideal_lattice()
        cell = voronoi_cell(lat)
        assert abs(cell.volume() - lattice_volume(lat)) < 1e-9


class TestOtherLattices:
    def test_cubic_cell(self):
        cell = voronoi_cell(PeriodLattice(2.0 * np.eye(3)))
        assert len(cell.vertices) == 8
        assert cell.face_sizes() == {4: 6}
        assert cell.euler_characteristic() == 2
        assert np.abs(np.abs(cell.vertices) - 1.0).max() < 1e-12

    def test_degenerate_lattice_rejected(self):
        g = np.array([[1.0, 0, 0], [0, 1, 0], [1, 1, 0]])
        with pytest.raises(ValueError):
            voronoi_cell(PeriodLattice(g))

    def test_skewed_lattice_volume(self):
        rng = np.random.default_rng(13)
        for _ in range(5):
            g = np.eye(3) + 0.2 * rng.standard_normal((3, 3))
            lat = PeriodLattice(g)
            cell = voronoi_cell(lat)
            assert cell.euler_characteristic() == 2
            assert abs(cell.volume() - lattice_volume(lat)) < 1e-8

    def test_central_symmetry(self):
        cell = voronoi_cell(ideal_lattice())
        assert cell.is_centrally_symmetric(1e-9)
