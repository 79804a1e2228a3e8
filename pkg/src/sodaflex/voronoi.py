"""Voronoi cell of a 3D lattice by successive half-space clipping.

The cell at the origin is the set of points at least as close to the
origin as to every other lattice point p, i.e. the intersection of the
half-spaces x . p <= |p|^2 / 2. Lattice points with integer coordinates
in [-shell, shell]^3 under the generator basis are sufficient for the
near-orthogonal cells arising here; the default shell is 2.

The polyhedron is held as a list of oriented face loops and clipped one
plane at a time. This keeps the construction deterministic and free of
external hull libraries.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .geom import ConvexCell, PeriodLattice

__all__ = ["voronoi_cell"]

_ON_PLANE_TOL = 1e-12
DEDUP_TOL = 1e-9  # absolute, model units


def _cube_faces(w: float) -> list[np.ndarray]:
    """Faces of the cube [-w, w]^3 with outward orientation."""
    quads = [
        [(+1, -1, -1), (+1, +1, -1), (+1, +1, +1), (+1, -1, +1)],  # +x
        [(-1, -1, -1), (-1, -1, +1), (-1, +1, +1), (-1, +1, -1)],  # -x
        [(-1, +1, -1), (-1, +1, +1), (+1, +1, +1), (+1, +1, -1)],  # +y
        [(-1, -1, -1), (+1, -1, -1), (+1, -1, +1), (-1, -1, +1)],  # -y
        [(-1, -1, +1), (+1, -1, +1), (+1, +1, +1), (-1, +1, +1)],  # +z
        [(-1, -1, -1), (-1, +1, -1), (+1, +1, -1), (+1, -1, -1)],  # -z
    ]
    return [w * np.array(q, dtype=float) for q in quads]


def _clip(faces: list[np.ndarray], n: np.ndarray, d: float) -> list[np.ndarray]:
    """Clip a convex face set by the half-space x . n <= d."""
    sides = [poly @ n - d for poly in faces]
    if all((s <= _ON_PLANE_TOL).all() for s in sides):
        return faces

    kept: list[np.ndarray] = []
    cap_pts: list[np.ndarray] = []
    for poly, s in zip(faces, sides):
        if (s <= _ON_PLANE_TOL).all():
            kept.append(poly)
            for k in np.nonzero(np.abs(s) <= _ON_PLANE_TOL)[0]:
                cap_pts.append(poly[k])
            continue
        if (s >= -_ON_PLANE_TOL).all():
            continue  # face entirely outside (or flattened onto the plane)
        out: list[np.ndarray] = []
        m = len(poly)
        for k in range(m):
            p, sp = poly[k], s[k]
            q, sq = poly[(k + 1) % m], s[(k + 1) % m]
            if sp <= _ON_PLANE_TOL:
                out.append(p)
                if abs(sp) <= _ON_PLANE_TOL:
                    cap_pts.append(p)
            if (sp < -_ON_PLANE_TOL and sq > _ON_PLANE_TOL) or (
                    sp > _ON_PLANE_TOL and sq < -_ON_PLANE_TOL):
                t = sp / (sp - sq)
                x = p + t * (q - p)
                out.append(x)
                cap_pts.append(x)
        if len(out) >= 3:
            kept.append(np.array(out))

    cap = _cap_face(cap_pts, n)
    if cap is not None:
        kept.append(cap)
    return kept


def _cap_face(pts: list[np.ndarray], n: np.ndarray) -> np.ndarray | None:
    """Assemble the cross-section face on the clip plane, wound around +n."""
    if len(pts) < 3:
        return None
    uniq: list[np.ndarray] = []
    for p in pts:
        if all(np.linalg.norm(p - q) > 10 * _ON_PLANE_TOL for q in uniq):
            uniq.append(p)
    if len(uniq) < 3:
        return None
    arr = np.array(uniq)
    ctr = arr.mean(axis=0)
    t1 = arr[0] - ctr
    t1n = np.linalg.norm(t1)
    if t1n < 10 * _ON_PLANE_TOL:
        return None
    t1 /= t1n
    t2 = np.cross(n, t1)
    ang = np.arctan2((arr - ctr) @ t2, (arr - ctr) @ t1)
    order = np.argsort(ang)
    face = arr[order]
    # wound CCW around +n by construction; degenerate slivers are dropped
    area2 = np.zeros(3)
    for k in range(1, len(face) - 1):
        area2 += np.cross(face[k] - face[0], face[k + 1] - face[0])
    if np.linalg.norm(area2) < 100 * _ON_PLANE_TOL:
        return None
    return face


def _index_cell(faces: list[np.ndarray], dedup_tol: float) -> ConvexCell:
    """Convert face loops to a ConvexCell with canonical vertex and face order."""
    verts: list[np.ndarray] = []

    def vid(p: np.ndarray) -> int:
        for i, q in enumerate(verts):
            if np.linalg.norm(p - q) <= dedup_tol:
                return i
        verts.append(p)
        return len(verts) - 1

    loops = []
    for poly in faces:
        loop = []
        for p in poly:
            i = vid(p)
            if not loop or loop[-1] != i:
                loop.append(i)
        while len(loop) > 1 and loop[0] == loop[-1]:
            loop.pop()
        if len(set(loop)) >= 3:
            loops.append(loop)

    arr = np.array(verts)
    order = np.lexsort((arr[:, 2], arr[:, 1], arr[:, 0]))
    remap = np.empty(len(verts), dtype=int)
    remap[order] = np.arange(len(verts))
    arr = arr[order]

    canon = []
    for loop in loops:
        loop = [int(remap[i]) for i in loop]
        k = loop.index(min(loop))
        canon.append(tuple(loop[k:] + loop[:k]))
    canon.sort()
    return ConvexCell(arr, tuple(canon))


def voronoi_cell(lattice: PeriodLattice, shell: int = 2,
                 dedup_tol: float = DEDUP_TOL) -> ConvexCell:
    """Voronoi cell of ``lattice`` at the origin.

    Raises ValueError for a degenerate lattice.
    """
    if lattice.is_degenerate():
        raise ValueError("degenerate lattice has no bounded Voronoi cell")
    g = lattice.generators
    width = 1.1 * float(np.linalg.norm(g, axis=1).sum())
    faces = _cube_faces(width)
    points = []
    for c in product(range(-shell, shell + 1), repeat=3):
        if c == (0, 0, 0):
            continue
        points.append(np.asarray(c, dtype=float) @ g)
    # clip by the nearest points first so later planes are mostly no-ops
    points.sort(key=lambda p: float(p @ p))
    for p in points:
        faces = _clip(faces, p, float(p @ p) / 2.0)
        if not faces:
            raise ValueError("half-space intersection collapsed; lattice too skewed")
    return _index_cell(faces, dedup_tol)
