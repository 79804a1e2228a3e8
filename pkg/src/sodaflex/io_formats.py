"""Serialization: placement JSON documents, OBJ geometry, and curve CSV.

JSON numbers use Python's shortest round-trip float representation, so a
document parses back to bitwise-identical doubles. CSV cells are written
with 17 significant digits for the same reason. OBJ output deduplicates
vertices within a caller-supplied tolerance and emits triangles with
outward orientation.
"""

from __future__ import annotations

import json

import numpy as np

from .framework import (PeriodicPlacement, PeriodLattice, PeriodMark,
                        RING_ORDER, RING_POSITION, RingLabel, SixRing,
                        _SLOT_TO_ID)
from .geom import ConvexCell, Tetrahedron

__all__ = [
    "SCHEMA_VERSION",
    "PlacementFormatError",
    "placement_to_document",
    "document_to_placement",
    "write_placement",
    "read_placement",
    "export_obj",
    "cell_to_obj",
    "format_float",
    "CURVE_COLUMNS",
    "write_curve_csv",
]

SCHEMA_VERSION = 1

CURVE_COLUMNS = ("rho", "phi", "lattice_volume", "central_residual",
                 "d3_residual", "periodicity_residual", "tetrahedrite_flag")


class PlacementFormatError(ValueError):
    """Malformed placement document; the message names the offending field."""


def format_float(x: float) -> str:
    """Fixed 17-significant-digit scientific form, enough to round-trip."""
    return f"{x:.16e}"


def placement_to_document(p: PeriodicPlacement) -> dict:
    verts = p.ring.distinct_vertices()
    tetrahedra = []
    for t, lab in enumerate(RING_ORDER):
        tetrahedra.append({
            "label": str(lab),
            "vertices": [_SLOT_TO_ID[(t, i)] for i in range(4)],
        })
    contacts = []
    for c in p.ring.contacts:
        contacts.append({
            "name": c.name,
            "first": [str(c.label_a), c.index_a],
            "second": [str(c.label_b), c.index_b],
            "vertex": _SLOT_TO_ID[(RING_POSITION[c.label_a], c.index_a)],
        })
    marks = []
    for m in p.period_marks:
        marks.append({
            "source": _SLOT_TO_ID[(RING_POSITION[m.source[0]], m.source[1])],
            "target": _SLOT_TO_ID[(RING_POSITION[m.target[0]], m.target[1])],
            "source_slot": [str(m.source[0]), m.source[1]],
            "target_slot": [str(m.target[0]), m.target[1]],
            "coefficients": list(m.coeffs),
        })
    return {
        "schema_version": SCHEMA_VERSION,
        "vertices": [[float(x) for x in v] for v in verts],
        "tetrahedra": tetrahedra,
        "contacts": contacts,
        "lattice": [[float(x) for x in row] for row in p.lattice.generators],
        "period_marks": marks,
    }


def _need(doc: dict, key: str, where: str = "document"):
    if key not in doc:
        raise PlacementFormatError(f"{where}: missing field {key!r}")
    return doc[key]


def document_to_placement(doc: dict) -> PeriodicPlacement:
    """Parse a placement document.

    Structural problems raise PlacementFormatError naming the location;
    geometric inconsistencies are left to validate_placement.
    """
    version = _need(doc, "schema_version")
    if version != SCHEMA_VERSION:
        raise PlacementFormatError(f"unknown schema_version {version!r}")

    raw_verts = _need(doc, "vertices")
    try:
        verts = np.array(raw_verts, dtype=float)
    except (TypeError, ValueError) as exc:
        raise PlacementFormatError(f"vertices: not numeric ({exc})") from None
    if verts.ndim != 2 or verts.shape[1] != 3:
        raise PlacementFormatError(f"vertices: expected Nx3, got {verts.shape}")

    raw_tets = _need(doc, "tetrahedra")
    by_label: dict[str, list[int]] = {}
    for k, rec in enumerate(raw_tets):
        lab = _need(rec, "label", f"tetrahedra[{k}]")
        ids = _need(rec, "vertices", f"tetrahedra[{k}]")
        if len(ids) != 4:
            raise PlacementFormatError(f"tetrahedra[{k}]: needs 4 vertex indices")
        if any(not (0 <= i < len(verts)) for i in ids):
            raise PlacementFormatError(f"tetrahedra[{k}]: vertex index out of range")
        by_label[lab] = [int(i) for i in ids]
    missing = [str(lab) for lab in RING_ORDER if str(lab) not in by_label]
    if missing:
        raise PlacementFormatError(f"tetrahedra: missing labels {missing}")

    tets = [Tetrahedron(verts[by_label[str(lab)]]) for lab in RING_ORDER]
    ring = SixRing(tets)

    raw_lat = _need(doc, "lattice")
    lat = np.array(raw_lat, dtype=float)
    if lat.shape != (3, 3):
        raise PlacementFormatError(f"lattice: expected 3x3, got {lat.shape}")

    raw_marks = _need(doc, "period_marks")
    if len(raw_marks) != 6:
        raise PlacementFormatError(f"period_marks: expected 6, got {len(raw_marks)}")
    marks = []
    for k, rec in enumerate(raw_marks):
        src = _need(rec, "source_slot", f"period_marks[{k}]")
        tgt = _need(rec, "target_slot", f"period_marks[{k}]")
        coeffs = _need(rec, "coefficients", f"period_marks[{k}]")
        if len(coeffs) != 3:
            raise PlacementFormatError(f"period_marks[{k}]: need 3 coefficients")
        if any(c != int(c) for c in coeffs):
            raise PlacementFormatError(f"period_marks[{k}]: coefficients must be integers")
        try:
            marks.append(PeriodMark(
                (RingLabel.parse(src[0]), int(src[1])),
                (RingLabel.parse(tgt[0]), int(tgt[1])),
                tuple(int(c) for c in coeffs),
            ))
        except ValueError as exc:
            raise PlacementFormatError(f"period_marks[{k}]: {exc}") from None
    return PeriodicPlacement(ring, PeriodLattice(lat), tuple(marks))


def write_placement(p: PeriodicPlacement, path) -> None:
    with open(path, "w") as fh:
        json.dump(placement_to_document(p), fh, indent=1)
        fh.write("\n")


def read_placement(path) -> PeriodicPlacement:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise PlacementFormatError(f"invalid JSON: {exc}") from None
    return document_to_placement(doc)


def _dedup_vertices(tetrahedra, tol: float) -> tuple[list[np.ndarray], list[list[int]]]:
    verts: list[np.ndarray] = []
    index_rows = []
    for tet in tetrahedra:
        row = []
        for v in tet.verts:
            hit = None
            if tol > 0:
                for i, w in enumerate(verts):
                    if np.linalg.norm(v - w) <= tol:
                        hit = i
                        break
            if hit is None:
                verts.append(np.array(v))
                hit = len(verts) - 1
            row.append(hit)
        index_rows.append(row)
    return verts, index_rows


_TET_FACES = ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))


def export_obj(tetrahedra, dedup_tol: float) -> str:
    """OBJ text for a list of tetrahedra: deduplicated vertices, 4 triangles
    each, outward orientation, 1-based indices."""
    if dedup_tol < 0:
        raise ValueError("dedup_tol must be >= 0")
    verts, rows = _dedup_vertices(tetrahedra, dedup_tol)
    lines = [f"# tetrahedra: {len(list(rows))}"]
    for v in verts:
        lines.append("v " + " ".join(format_float(float(x)) for x in v))
    for tet, row in zip(tetrahedra, rows):
        ctr = tet.barycenter()
        for (a, b, c) in _TET_FACES:
            pa, pb, pc = tet.verts[a], tet.verts[b], tet.verts[c]
            normal = np.cross(pb - pa, pc - pa)
            i, j, k = row[a], row[b], row[c]
            if normal @ (pa - ctr) < 0:
                j, k = k, j
            lines.append(f"f {i + 1} {j + 1} {k + 1}")
    return "\n".join(lines) + "\n"


def cell_to_obj(cell: ConvexCell) -> str:
    """OBJ text for a convex cell with polygonal faces."""
    lines = [f"# convex cell: {len(cell.vertices)} vertices, {len(cell.faces)} faces"]
    for v in cell.vertices:
        lines.append("v " + " ".join(format_float(float(x)) for x in v))
    for f in cell.faces:
        lines.append("f " + " ".join(str(i + 1) for i in f))
    return "\n".join(lines) + "\n"


def write_curve_csv(rows, path) -> None:
    """Curve rows as CSV with the fixed column set.

    ``rows`` yields mappings with the CURVE_COLUMNS keys; the flag column
    is written as 0/1.
    """
    with open(path, "w") as fh:
        fh.write(",".join(CURVE_COLUMNS) + "\n")
        for row in rows:
            cells = []
            for col in CURVE_COLUMNS:
                val = row[col]
                if col == "tetrahedrite_flag":
                    cells.append(str(int(val)))
                else:
                    cells.append(format_float(float(val)))
            fh.write(",".join(cells) + "\n")
