"""Sodalite-type periodic tetrahedral framework: construction, deformation
families, and infinitesimal rigidity analysis."""

from .geom import (ConvexCell, PeriodLattice, RigidMotion, Rotation,
                   Tetrahedron, barycenter, circumsphere,
                   is_regular_tetrahedron, lattice_volume)
from .voronoi import voronoi_cell
from .framework import (EDGE, PeriodicPlacement, PeriodMark, RingLabel,
                        SixRing, ValidationReport, generate_patch,
                        ideal_sodalite, quotient_graph, sodalite_cage,
                        validate_placement)
from .symmetry import (SignedPermutation, central_symmetry_residual,
                       cube_group, d3_residual, ring_label_action)
from .central import (CentralParams, central_deform, central_tangent_basis,
                      sample_central)
from .dihedral import (D3Frame, D3RingParams, build_centro_d3_ring,
                       build_d3_ring, contact_circles, detect_tetrahedrite,
                       periodicity_residual, solve_generating_edge,
                       tilt_tangent, trace_tilt_curve)
from .rigidity import (build_constraint_system, finite_linkage_dof,
                       flex_dimension, jacobian, trivial_motion_basis)

__version__ = "0.1.0"
