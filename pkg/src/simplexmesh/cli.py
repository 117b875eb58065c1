"""Command-line interface: ``simplexmesh <command> ...``."""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bench
from .connectivity import euler_characteristic
from .construction import unit_cube, unit_interval, unit_square
from .core import MeshError
from .io import read_mesh, write_mesh, write_mesh_function
from .operations import boundary_mesh, refine_uniform
from .parallel import compute_mapping, distribute, global_numbering, partition_cells, sparsity_pattern, serial_pattern


def _gen(args):
    if args.interval is not None:
        mesh = unit_interval(args.interval)
    elif args.square is not None:
        if len(args.square) > 2:
            raise SystemExit("--square takes N or N M")
        mesh = unit_square(*args.square)
    else:
        if len(args.cube) not in (1, 3):
            raise SystemExit("--cube takes N or N M K")
        mesh = unit_cube(*args.cube)
    write_mesh(mesh, args.out)
    print(f"wrote {mesh.kind.label} mesh with {mesh.num_vertices()} vertices and {mesh.num_cells()} cells to {args.out}")


def _info(args):
    mesh = read_mesh(args.path)
    if args.all:
        mesh.init_all()
    print(f"kind: {mesh.kind.label}")
    print(f"tdim: {mesh.tdim}")
    print(f"gdim: {mesh.gdim}")
    for d, n in enumerate(mesh.topology.counts):
        if n:
            print(f"N_{d} = {n}")
    if args.all:
        print(f"euler characteristic = {euler_characteristic(mesh)}")
        stored = ", ".join(f"{d}->{d2}" for d, d2 in mesh.topology.stored())
        print(f"stored connectivity: {stored}")
    print(f"bytes = {mesh.size_bytes()}")


def _refine(args):
    mesh = read_mesh(args.path)
    for _ in range(args.times):
        mesh = refine_uniform(mesh)
    write_mesh(mesh, args.out)
    print(f"refined {args.times} time(s): {mesh.num_vertices()} vertices, {mesh.num_cells()} cells")


def _boundary(args):
    mesh = read_mesh(args.path)
    result = boundary_mesh(mesh)
    write_mesh(result.boundary, f"{args.out}.mesh")
    write_mesh_function(result.vertex_map, 0, f"{args.out}.vertex_map")
    write_mesh_function(result.cell_map, result.boundary.tdim, f"{args.out}.cell_map")
    b = result.boundary
    print(f"boundary: {b.num_vertices()} vertices, {b.num_cells()} cells -> {args.out}.mesh")


def _write_distributed(dm, partition, prefix):
    write_mesh_function(partition.owner, partition.owner.dim, f"{prefix}.owner")
    for r in dm:
        stem = f"{prefix}.rank{r.rank}"
        D = r.mesh.tdim
        write_mesh(r.mesh, f"{stem}.mesh")
        write_mesh_function(r.S, D - 1, f"{stem}.S")
        write_mesh_function(r.F, D - 1, f"{stem}.F")
        write_mesh_function(r.global_vertex, 0, f"{stem}.vertex_map")


def _partition(args):
    mesh = read_mesh(args.path)
    partition = partition_cells(mesh, args.ranks)
    dm = distribute(mesh, partition)
    _write_distributed(dm, partition, args.out)
    for r in dm:
        print(f"rank {r.rank}: {r.mesh.num_cells()} cells, {r.mesh.num_vertices()} vertices, "
              f"{len(r.shared_facets())} shared facets")


def _dofmap(args):
    mesh = read_mesh(args.path)
    partition = partition_cells(mesh, args.ranks)
    dm = distribute(mesh, partition)
    _write_distributed(dm, partition, args.out)
    result = compute_mapping(dm)
    for r, table in zip(dm, result.maps):
        np.savetxt(f"{args.out}.rank{r.rank}.dofmap", table, fmt="%d")
    pi = global_numbering(dm, result)
    bijection = sorted(pi.tolist()) == list(range(result.num_global))
    relabelled = {(int(pi[a]), int(pi[b])) for a, b in serial_pattern(mesh)}
    pattern_ok = sparsity_pattern(dm, result) == relabelled
    lines = [
        f"ranks = {dm.num_ranks}",
        f"N_global = {result.num_global}",
        "offsets = " + " ".join(map(str, result.offsets)),
        "owned = " + " ".join(map(str, result.owned)),
        f"messages = {result.messages}",
        f"bijection: {'OK' if bijection else 'FAILED'}",
        f"sparsity pattern matches serial: {'OK' if pattern_ok else 'FAILED'}",
    ]
    report = "\n".join(lines) + "\n"
    with open(f"{args.out}.report.txt", "w") as fh:
        fh.write(report)
    sys.stdout.write(report)
    return 0 if bijection and pattern_ok else 1


def _bench(args):
    sizes = [int(s) for s in args.sizes.split(",") if s]
    records = bench.bench_suite(sizes, repeats=args.repeats)
    if args.out == "-":
        bench.write_csv(records, sys.stdout)
    else:
        with open(args.out, "w", newline="") as fh:
            bench.write_csv(records, fh)
        print(f"wrote {len(records)} records to {args.out}")


def build_parser():
    parser = argparse.ArgumentParser(prog="simplexmesh", description="Simplicial mesh toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a unit interval, square or cube mesh")
    shape = p.add_mutually_exclusive_group(required=True)
    shape.add_argument("--interval", type=int, metavar="N")
    shape.add_argument("--square", type=int, nargs="+", metavar="N")
    shape.add_argument("--cube", type=int, nargs="+", metavar="N")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_gen)

    p = sub.add_parser("info", help="print entity counts")
    p.add_argument("path")
    p.add_argument("--all", action="store_true", help="compute every connectivity first")
    p.set_defaults(func=_info)

    p = sub.add_parser("refine", help="refine uniformly")
    p.add_argument("path")
    p.add_argument("--times", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_refine)

    p = sub.add_parser("boundary", help="extract the boundary mesh and its maps")
    p.add_argument("path")
    p.add_argument("--out", required=True, metavar="PREFIX")
    p.set_defaults(func=_boundary)

    p = sub.add_parser("partition", help="partition and distribute over N ranks")
    p.add_argument("path")
    p.add_argument("--ranks", type=int, required=True)
    p.add_argument("--out", required=True, metavar="PREFIX")
    p.set_defaults(func=_partition)

    p = sub.add_parser("dofmap", help="number P1 dofs in parallel over N simulated ranks")
    p.add_argument("path")
    p.add_argument("--ranks", type=int, required=True)
    p.add_argument("--out", required=True, metavar="PREFIX")
    p.set_defaults(func=_dofmap)

    p = sub.add_parser("bench", help="run the benchmark suite and write CSV")
    p.add_argument("--sizes", default="8,16,32")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_bench)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except (MeshError, ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
