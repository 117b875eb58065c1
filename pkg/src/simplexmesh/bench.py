"""
Benchmark harness: mesh creation, memory, iteration, coordinate access and
uniform refinement on tetrahedral unit-cube meshes.

Every timing is the median of ``repeats`` runs on a monotonic clock.
"""
from __future__ import annotations

import csv
import statistics
import time
from dataclasses import astuple, dataclass, fields

from .construction import unit_cube
from .iterators import cells, vertices
from .operations import refine_uniform

CSV_HEADER = ("scenario", "size", "n_vertices", "n_cells", "seconds", "bytes")


@dataclass
class BenchRecord:
    scenario: str
    size: int
    n_vertices: int
    n_cells: int
    seconds: float
    bytes: int


assert tuple(f.name for f in fields(BenchRecord)) == CSV_HEADER


def _median_time(fn, repeats):
    times = []
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), result


def iterate_with_cursors(mesh):
    """Visit every vertex of every cell through nested cursors; returns the index sum."""
    total = 0
    for c in cells(mesh):
        for v in vertices(c):
            total += v.index
    return total


def iterate_direct(mesh):
    """Same visit order as :func:`iterate_with_cursors`, reading the CRS arrays directly."""
    top = mesh.topology
    conn = top(top.dim, 0)
    offsets, indices = conn.offsets, conn.indices
    total = 0
    for c in range(top.counts[top.dim]):
        row = indices[offsets[c]:offsets[c + 1]]
        for i in range(len(row)):
            total += int(row[i])
    return total


def access_coordinates(mesh):
    """Sum the coordinates of every vertex of every cell, via direct access."""
    top, geometry = mesh.topology, mesh.geometry
    conn = top(top.dim, 0)
    offsets, indices = conn.offsets, conn.indices
    coords, n = geometry.coordinates, geometry.dim
    total = 0.0
    for c in range(top.counts[top.dim]):
        row = indices[offsets[c]:offsets[c + 1]]
        for i in range(len(row)):
            start = n * int(row[i])
            for k in range(start, start + n):
                total += coords[k]
    return float(total)


def bench_size(n, repeats=5):
    """Run every scenario on ``unit_cube(n, n, n)``."""
    records = []

    t, mesh = _median_time(lambda: unit_cube(n), repeats)
    n0, n3 = mesh.num_vertices(), mesh.num_cells()
    records.append(BenchRecord("create", n, n0, n3, t, mesh.size_bytes()))

    t, _ = _median_time(lambda: iterate_with_cursors(mesh), repeats)
    records.append(BenchRecord("iterate_cursor", n, n0, n3, t, mesh.size_bytes()))

    t, _ = _median_time(lambda: iterate_direct(mesh), repeats)
    records.append(BenchRecord("iterate_direct", n, n0, n3, t, mesh.size_bytes()))

    t, _ = _median_time(lambda: access_coordinates(mesh), repeats)
    records.append(BenchRecord("coordinates", n, n0, n3, t, mesh.size_bytes()))

    # refinement includes computing the edges of a fresh mesh each time
    t, fine = _median_time(lambda: refine_uniform(unit_cube(n)), repeats)
    records.append(BenchRecord("refine", n, fine.num_vertices(), fine.num_cells(), t, fine.size_bytes()))
    return records


def bench_suite(sizes, repeats=5):
    records = []
    for n in sizes:
        records.extend(bench_size(n, repeats))
    return records


def write_csv(records, fh):
    writer = csv.writer(fh)
    writer.writerow(CSV_HEADER)
    for r in records:
        row = list(astuple(r))
        row[4] = f"{row[4]:.6g}"
        writer.writerow(row)


def read_csv(fh):
    reader = csv.DictReader(fh)
    return [BenchRecord(r["scenario"], int(r["size"]), int(r["n_vertices"]), int(r["n_cells"]),
                        float(r["seconds"]), int(r["bytes"])) for r in reader]
