"""Command-line interface.

Commands are deterministic for fixed flags and seed: repeated runs write
byte-identical files. Any command that validates geometry exits nonzero
on failure unless --allow-invalid is given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .central import sample_central
from .dihedral import (build_centro_d3_ring, detect_tetrahedrite,
                       periodicity_residual, trace_tilt_curve)
from .framework import (cage_assignment, cage_barycenter_spectrum,
                        generate_patch, ideal_lattice, ideal_sodalite,
                        validate_placement)
from .io_formats import (PlacementFormatError, cell_to_obj, export_obj,
                          format_float, read_placement, write_curve_csv,
                          write_placement)
from .rigidity import flex_dimension
from .symmetry import central_symmetry_residual, d3_residual
from .voronoi import voronoi_cell

__all__ = ["main"]


def _fail_validation(report, allow_invalid: bool) -> int:
    for name, (ok, worst) in report.checks.items():
        print(f"  {name}: {'pass' if ok else 'FAIL'} (worst {worst:.3e})")
    if report.passed:
        return 0
    if allow_invalid:
        print("validation failed; continuing (--allow-invalid)")
        return 0
    print("validation failed")
    return 1


def _cmd_ideal(args) -> int:
    p = ideal_sodalite()
    write_placement(p, args.out)
    print(f"wrote {args.out}")
    return _fail_validation(validate_placement(p, 1e-9), args.allow_invalid)


def _cmd_validate(args) -> int:
    p = read_placement(args.placement)
    report = validate_placement(p, args.tol)
    return _fail_validation(report, args.allow_invalid)


def _cmd_sample_central(args) -> int:
    os.makedirs(args.out_dir, exist_ok=True)
    samples = sample_central(args.n, args.seed)
    n_degenerate = 0
    n_invalid = 0
    volumes = []
    for i, p in enumerate(samples):
        write_placement(p, os.path.join(args.out_dir, f"sample_{i:05d}.json"))
        volumes.append(p.lattice.volume())
        if p.lattice_degenerate:
            n_degenerate += 1
        elif not validate_placement(p, 1e-9).passed:
            n_invalid += 1
    print(f"samples: {len(samples)}")
    print(f"degenerate lattices: {n_degenerate}"
          + (f" ({n_degenerate / max(len(samples), 1):.2%})" if samples else ""))
    print(f"validation failures (non-degenerate): {n_invalid}")
    if args.fig and samples:
        from . import plotting
        plotting.save_samples_figure(volumes, args.fig)
        print(f"wrote {args.fig}")
    if n_invalid and not args.allow_invalid:
        return 1
    return 0


def _tilt_rows(trace):
    rows = []
    for pt in trace.points:
        ring = pt.placement.ring
        rows.append({
            "rho": pt.rho,
            "phi": pt.phi,
            "lattice_volume": pt.placement.lattice.volume(),
            "central_residual": central_symmetry_residual(ring).value,
            "d3_residual": d3_residual(ring).value,
            "periodicity_residual": periodicity_residual(ring),
            "tetrahedrite_flag": detect_tetrahedrite(pt.placement, 1e-8),
        })
    return rows


def _cmd_tilt(args) -> int:
    trace = trace_tilt_curve(step=args.step, max_steps=args.max_steps,
                             direction=args.direction)
    rows = _tilt_rows(trace)
    write_curve_csv(rows, args.csv)
    print(f"traced {len(trace.points)} points ({trace.termination})")
    print(f"max vertex displacement per step: {trace.max_step_displacement:.6f}")
    ideal = ideal_sodalite()
    slots = cage_assignment(ideal)
    ref = cage_barycenter_spectrum(ideal, slots)
    last = cage_barycenter_spectrum(trace.points[-1].placement, slots)
    scale = float(last.mean() / ref.mean())
    shape_dev = float(np.abs(last / last.mean() - ref / ref.mean()).max())
    print(f"cage at final point: scale {scale:.6f} of reference, "
          f"shape deviation {shape_dev:.6f}")
    print(f"wrote {args.csv}")
    invalid = 0
    for pt in trace.points:
        if not validate_placement(pt.placement, 1e-8).passed:
            invalid += 1
    if args.obj_every:
        base, _ = os.path.splitext(args.csv)
        for i, pt in enumerate(trace.points):
            if i % args.obj_every == 0:
                path = f"{base}_{i:05d}.obj"
                with open(path, "w") as fh:
                    fh.write(export_obj(list(pt.placement.ring.tetrahedra), 1e-9))
    if args.fig:
        from . import plotting
        plotting.save_tilt_figure(rows, args.fig)
        print(f"wrote {args.fig}")
    if invalid:
        print(f"validation failures along curve: {invalid}")
        if not args.allow_invalid:
            return 1
    return 0


def _cmd_centro_d3(args) -> int:
    try:
        p = build_centro_d3_ring(args.rho)
    except ValueError as exc:
        print(f"error: {exc}")
        return 1
    write_placement(p, args.out)
    print(f"wrote {args.out}")
    print(f"central residual: {central_symmetry_residual(p.ring).value:.3e}")
    print(f"dihedral residual: {d3_residual(p.ring).value:.3e}")
    return _fail_validation(validate_placement(p, 1e-9), args.allow_invalid)


def _cmd_rigidity(args) -> int:
    p = read_placement(args.placement)
    report = validate_placement(p, 1e-6)
    if not report.passed and not args.allow_invalid:
        print(f"placement fails validation: {report.failures()}")
        return 1
    flex = flex_dimension(p, args.tol)
    with open(args.report, "w") as fh:
        json.dump(flex.to_dict(), fh, indent=1)
        fh.write("\n")
    print(f"kernel dimension: {flex.kernel_dim}")
    print(f"nontrivial flexes: {flex.nontrivial_dim}")
    print(f"spectral gap ratio: {flex.gap_ratio:.3e}")
    print(f"wrote {args.report}")
    if args.fig:
        from . import plotting
        plotting.save_spectrum_figure(flex.singular_values, flex.tol, args.fig)
        print(f"wrote {args.fig}")
    return 0


def _cmd_kelvin(args) -> int:
    cell = voronoi_cell(ideal_lattice())
    edges = cell.edges
    lengths = [float(np.linalg.norm(cell.vertices[a] - cell.vertices[b]))
               for a, b in edges]
    with open(args.obj, "w") as fh:
        fh.write(cell_to_obj(cell))
    sizes = cell.face_sizes()
    print(f"cell: {len(cell.vertices)} vertices, {len(edges)} edges, "
          f"{len(cell.faces)} faces {dict(sorted(sizes.items()))}")
    print(f"measured edge length: {format_float(float(np.mean(lengths)))} "
          f"(spread {max(lengths) - min(lengths):.3e})")
    print(f"wrote {args.obj}")
    return 0


def _cmd_export(args) -> int:
    p = read_placement(args.placement)
    report = validate_placement(p, 1e-9)
    code = _fail_validation(report, args.allow_invalid)
    if code:
        return code
    tets = generate_patch(p, args.shells)
    with open(args.obj, "w") as fh:
        fh.write(export_obj(tets, 1e-9))
    print(f"wrote {args.obj} ({len(tets)} tetrahedra)")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sodaflex",
        description="Sodalite-type framework construction, deformation, and rigidity.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_allow_invalid(p):
        p.add_argument("--allow-invalid", action="store_true",
                       help="exit zero even when validation fails")

    p = sub.add_parser("ideal", help="write the reference placement")
    p.add_argument("--out", required=True, metavar="path.json")
    add_allow_invalid(p)
    p.set_defaults(fn=_cmd_ideal)

    p = sub.add_parser("validate", help="check a placement document")
    p.add_argument("placement", metavar="placement.json")
    p.add_argument("--tol", type=float, default=1e-9)
    add_allow_invalid(p)
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("sample-central",
                       help="sample the centrally-symmetric component")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--fig", metavar="path.png", default=None,
                   help="also render a cell volume histogram")
    add_allow_invalid(p)
    p.set_defaults(fn=_cmd_sample_central)

    p = sub.add_parser("tilt", help="trace the symmetry-breaking tilt curve")
    p.add_argument("--step", type=float, default=0.005)
    p.add_argument("--max-steps", type=int, default=400)
    p.add_argument("--direction", type=int, choices=(1, -1), default=1)
    p.add_argument("--csv", required=True, metavar="path.csv")
    p.add_argument("--obj-every", type=int, default=0, metavar="N",
                   help="write a ring OBJ every N accepted points")
    p.add_argument("--fig", metavar="path.png", default=None,
                   help="also render volume and residual curves")
    add_allow_invalid(p)
    p.set_defaults(fn=_cmd_tilt)

    p = sub.add_parser("centro-d3",
                       help="build the doubly-symmetric ring at a given radius")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--out", required=True, metavar="path.json")
    add_allow_invalid(p)
    p.set_defaults(fn=_cmd_centro_d3)

    p = sub.add_parser("rigidity", help="flex analysis of a placement")
    p.add_argument("placement", metavar="placement.json")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--report", required=True, metavar="path.json")
    p.add_argument("--fig", metavar="path.png", default=None,
                   help="also render the singular value spectrum")
    add_allow_invalid(p)
    p.set_defaults(fn=_cmd_rigidity)

    p = sub.add_parser("kelvin", help="Voronoi cell of the reference lattice")
    p.add_argument("--obj", required=True, metavar="path.obj")
    p.set_defaults(fn=_cmd_kelvin)

    p = sub.add_parser("export", help="patch of translated ring tetrahedra")
    p.add_argument("placement", metavar="placement.json")
    p.add_argument("--shells", type=int, default=0)
    p.add_argument("--obj", required=True, metavar="path.obj")
    add_allow_invalid(p)
    p.set_defaults(fn=_cmd_export)

    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except PlacementFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
