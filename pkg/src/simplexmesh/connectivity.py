"""
Computing incidence classes from the cell-vertex class.

Any class ``d -> d'`` follows from ``D -> 0`` by combining three primitives:

* :func:`build` creates the entities of dimension ``0 < d < D`` and stores
  ``D -> d`` and ``d -> 0``,
* :func:`transpose` turns ``d' -> d`` into ``d -> d'`` for ``d < d'``,
* :func:`intersection` derives ``d -> d'`` (``d >= d'``) from
  ``d -> d''`` and ``d'' -> d'``,

and :func:`compute_connectivity` chains them recursively.

Each primitive has two interchangeable implementations selected by
``method``:

``"reference"``
    Plain loops over the stored arrays. Every primitive makes a counting
    pass, allocates its output exactly, then makes a filling pass, so no
    growable buffers are kept. Build looks up previously created entities
    by recomputing the local vertex sets of neighbouring cells, which means
    it first needs ``D -> D``.
``"vectorized"`` (default)
    The same passes expressed as numpy array operations. Build matches
    candidate entities through a global sort of their vertex keys and
    does not need ``D -> D``.

Both produce bit-identical arrays.
"""
from __future__ import annotations

import logging
from functools import lru_cache
from itertools import combinations

import numpy as np

from .core import INDEX_DTYPE, Connectivity, ConnectivityNotInitializedError

logger = logging.getLogger(__name__)

METHODS = ("vectorized", "reference")


def _check_method(method):
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")


@lru_cache(maxsize=None)
def entity_templates(kind, d):
    """Local vertex positions of the dimension-`d` entities of a cell.

    Entities are listed in reverse lexicographic order of their position
    tuples. For facets this is the opposite-vertex convention (facet ``k``
    omits local vertex ``k``); for the edges of a tetrahedron it gives
    ``(2,3), (1,3), (1,2), (0,3), (0,2), (0,1)``.
    """
    if not 0 <= d <= kind.tdim:
        raise IndexError(f"dimension {d} out of range for {kind.label}")
    return tuple(reversed(list(combinations(range(kind.tdim + 1), d + 1))))


def local_entity_vertex_sets(kind, d, cell_vertices):
    """Sorted global vertex keys of the dimension-`d` entities of one cell.

    Parameters
    ----------
    kind : CellKind
    d : int
        Entity dimension, ``0 < d < D``.
    cell_vertices : sequence of int
        The cell's ``D + 1`` vertices in stored order.

    Returns
    -------
    list of tuple
        One key per local entity, in template order.
    """
    if not 0 < d < kind.tdim:
        raise IndexError(f"local entities need 0 < d < {kind.tdim}, got d = {d}")
    if len(cell_vertices) != kind.num_vertices:
        raise ValueError(f"{kind.label} cell needs {kind.num_vertices} vertices")
    return [tuple(sorted(int(cell_vertices[p]) for p in t)) for t in entity_templates(kind, d)]


def _record(trace, *step):
    logger.debug("connectivity step %s", step)
    if trace is not None:
        trace.append(step)


# -- Build ------------------------------------------------------------------


def build(mesh, d, method="vectorized", trace=None):
    """Create the entities of dimension `d` and store ``D -> d`` and ``d -> 0``.

    Entity indices are assigned in order of first appearance, walking cells
    in index order and each cell's local entities in template order, so two
    cells sharing an entity always agree on its index.
    """
    _check_method(method)
    top = mesh.topology
    D = top.dim
    if not 0 < d < D:
        raise IndexError(f"build needs 0 < d < {D}, got d = {d}")
    if top(D, 0) is None:
        raise ConnectivityNotInitializedError(f"build needs connectivity {D} -> 0")
    if method == "reference":
        if top(D, D) is None:
            compute_connectivity(mesh, D, D, method=method, trace=trace)
        cell_entities, entity_vertices = _build_reference(mesh, d)
    else:
        cell_entities, entity_vertices = _build_vectorized(mesh, d)
    top.counts[d] = len(entity_vertices)
    top.set(D, d, Connectivity.from_table(cell_entities))
    top.set(d, 0, Connectivity.from_table(entity_vertices))
    _record(trace, "build", d)


def _build_reference(mesh, d):
    top = mesh.topology
    kind, D = mesh.kind, top.dim
    cells = top(D, 0)
    neighbours = top(D, D)
    num_cells = top.counts[D]
    per_cell = kind.num_entities(d)

    # pass 1: D -> d has a known size, fill it while counting new entities
    cell_entities = np.empty((num_cells, per_cell), dtype=INDEX_DTYPE)
    k = 0
    for i in range(num_cells):
        Vi = local_entity_vertex_sets(kind, d, cells(i))
        found = [None] * per_cell
        for j in neighbours(i):
            j = int(j)
            if j >= i:
                continue
            Vj = local_entity_vertex_sets(kind, d, cells(j))
            for a, v in enumerate(Vi):
                if found[a] is None and v in Vj:
                    found[a] = int(cell_entities[j, Vj.index(v)])
        for a in range(per_cell):
            if found[a] is None:
                found[a] = k
                k += 1
        cell_entities[i] = found

    # pass 2: d -> 0, now that the entity count is known
    entity_vertices = np.empty((k, d + 1), dtype=INDEX_DTYPE)
    for i in range(num_cells):
        for a, v in enumerate(local_entity_vertex_sets(kind, d, cells(i))):
            entity_vertices[cell_entities[i, a]] = v
    return cell_entities, entity_vertices


def _unique_rows(keys, num_vertices):
    """`np.unique` over rows, packing each row into one int64 when it fits."""
    width = keys.shape[1]
    if num_vertices ** width < 2 ** 62:
        packed = np.zeros(len(keys), dtype=np.int64)
        for a in range(width):
            packed = packed * num_vertices + keys[:, a]
        _, first, inverse = np.unique(packed, return_index=True, return_inverse=True)
        return keys[first], first, inverse.reshape(-1)
    uniq, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    return uniq, first, inverse.reshape(-1)


def _build_vectorized(mesh, d):
    top = mesh.topology
    D = top.dim
    cells = top(D, 0).as_table().astype(np.int64)
    templates = np.array(entity_templates(mesh.kind, d))
    per_cell = len(templates)
    keys = np.sort(cells[:, templates], axis=2).reshape(-1, d + 1)
    uniq, first, inverse = _unique_rows(keys, max(top.counts[0], 1))
    # renumber unique keys by first appearance
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    cell_entities = rank[inverse].reshape(-1, per_cell)
    return cell_entities, uniq[order]


# -- Transpose --------------------------------------------------------------


def transpose(topology, d, d2, method="vectorized", trace=None):
    """Store ``d -> d2`` computed from ``d2 -> d`` (requires ``d < d2``).

    Row ``i`` of the result lists the ``j`` whose row in ``d2 -> d``
    contains ``i``, in increasing ``j``.
    """
    _check_method(method)
    if not d < d2:
        raise ValueError(f"transpose needs d < d', got {d} -> {d2}")
    source = topology(d2, d)
    if source is None:
        raise ConnectivityNotInitializedError(f"transpose needs connectivity {d2} -> {d}")
    n = topology.counts[d]
    if method == "reference":
        conn = _transpose_reference(source, n)
    else:
        conn = _transpose_vectorized(source, n)
    topology.set(d, d2, conn)
    _record(trace, "transpose", d, d2)


def _transpose_reference(source, n):
    counts = np.zeros(n, dtype=np.int64)
    for j in range(len(source)):
        for i in source(j):
            counts[i] += 1
    offsets = np.zeros(n + 1, dtype=INDEX_DTYPE)
    np.cumsum(counts, out=offsets[1:])
    indices = np.empty(int(offsets[-1]), dtype=INDEX_DTYPE)
    fill = offsets[:-1].astype(np.int64)
    for j in range(len(source)):
        for i in source(j):
            indices[fill[i]] = j
            fill[i] += 1
    return Connectivity(offsets, indices)


def _transpose_vectorized(source, n):
    counts = np.bincount(source.indices, minlength=n)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    rows = np.repeat(np.arange(len(source), dtype=INDEX_DTYPE), source.row_lengths())
    # stable sort keeps each target's sources in increasing j
    indices = rows[np.argsort(source.indices, kind="stable")]
    return Connectivity(offsets, indices)


# -- Intersection -----------------------------------------------------------


def _vertex_rows(topology, d):
    """``d -> 0`` for containment tests; vertices contain only themselves."""
    if d == 0:
        n = topology.counts[0]
        return Connectivity(np.arange(n + 1), np.arange(n))
    conn = topology(d, 0)
    if conn is None:
        raise ConnectivityNotInitializedError(f"intersection needs connectivity {d} -> 0")
    return conn


def intersection(topology, d, d2, d3, method="vectorized", trace=None):
    """Store ``d -> d2`` computed through ``d -> d3`` and ``d3 -> d2`` (requires ``d >= d2``).

    For ``d == d2``, ``j`` is incident to ``i`` when ``j != i`` and both meet
    a common entity of dimension `d3`. For ``d > d2``, ``j`` is incident to
    ``i`` when the vertices of ``j`` are a subset of those of ``i``. Rows
    keep first-encounter order.
    """
    _check_method(method)
    if not d >= d2:
        raise ValueError(f"intersection needs d >= d', got {d} -> {d2}")
    first = topology(d, d3)
    second = topology(d3, d2)
    if first is None or second is None:
        raise ConnectivityNotInitializedError(
            f"intersection needs connectivities {d} -> {d3} and {d3} -> {d2}")
    verts = (_vertex_rows(topology, d), _vertex_rows(topology, d2)) if d > d2 else None
    n, n2 = topology.counts[d], topology.counts[d2]
    if method == "reference":
        conn = _intersection_reference(first, second, verts, n, n2)
    else:
        conn = _intersection_vectorized(first, second, verts, n, n2)
    topology.set(d, d2, conn)
    _record(trace, "intersection", d, d2, d3)


def _intersection_reference(first, second, verts, n, n2):
    # marker[j] == stamp  <=>  j already examined for the current row
    marker = np.full(n2, -1, dtype=np.int64)

    def scan(i, stamp, out):
        vi = set(verts[0](i).tolist()) if verts is not None else None
        count = 0
        for k in first(i):
            for j in second(k):
                if marker[j] == stamp:
                    continue
                marker[j] = stamp
                if vi is None:
                    keep = j != i
                else:
                    keep = all(v in vi for v in verts[1](j).tolist())
                if keep:
                    if out is not None:
                        out.append(j)
                    count += 1
        return count

    counts = np.zeros(n, dtype=np.int64)
    for i in range(n):
        counts[i] = scan(i, i, None)
    offsets = np.zeros(n + 1, dtype=INDEX_DTYPE)
    np.cumsum(counts, out=offsets[1:])
    indices = np.empty(int(offsets[-1]), dtype=INDEX_DTYPE)
    row = []
    for i in range(n):
        row.clear()
        scan(i, n + i, row)
        indices[offsets[i]:offsets[i + 1]] = row
    return Connectivity(offsets, indices)


def _intersection_vectorized(first, second, verts, n, n2):
    # every (i, k, j) path through the middle dimension, in loop order
    f_len = first.row_lengths()
    i = np.repeat(np.arange(n, dtype=np.int64), f_len)
    k = first.indices.astype(np.int64)
    s_off = second.offsets.astype(np.int64)
    s_len = s_off[k + 1] - s_off[k]
    total = int(s_len.sum())
    i = np.repeat(i, s_len)
    ends = np.cumsum(s_len)
    pos = np.arange(total, dtype=np.int64) - np.repeat(ends - s_len, s_len) + np.repeat(s_off[k], s_len)
    j = second.indices[pos].astype(np.int64)

    if verts is None:
        keep = j != i
    else:
        vi, vj = verts[0].as_table(), verts[1].as_table()
        keep = (vj[j][:, :, None] == vi[i][:, None, :]).any(axis=2).all(axis=1)
    i, j = i[keep], j[keep]

    # drop repeats, keeping the first encounter of each (i, j)
    _, first_seen = np.unique(i * n2 + j, return_index=True)
    first_seen.sort()
    i, j = i[first_seen], j[first_seen]
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(i, minlength=n), out=offsets[1:])
    return Connectivity(offsets, j)


# -- Driver -----------------------------------------------------------------


def compute_entities(mesh, d, method="vectorized", trace=None):
    """Make sure entities of dimension `d` exist (builds them if ``N_d == 0``)."""
    top = mesh.topology
    top._check(d)
    if top.counts[d] == 0:
        build(mesh, d, method=method, trace=trace)


def compute_connectivity(mesh, d, d2, method="vectorized", trace=None):
    """Compute and store ``d -> d2``, recursively computing what it needs.

    Already-present classes are left untouched, so repeated calls are free.
    Intermediate classes are kept in the topology; drop them with
    :meth:`MeshTopology.clear` if memory matters.

    Parameters
    ----------
    mesh : Mesh
    d, d2 : int
        Source and target dimensions, both in ``[0, D]``.
    method : {"vectorized", "reference"}
    trace : list, optional
        If given, each primitive appends a tuple such as
        ``("transpose", 0, 3)`` when it completes.
    """
    _check_method(method)
    top = mesh.topology
    top._check(d)
    top._check(d2)
    compute_entities(mesh, d, method, trace)
    compute_entities(mesh, d2, method, trace)
    if top(d, d2) is not None:
        return
    if d < d2:
        compute_connectivity(mesh, d2, d, method, trace)
        transpose(top, d, d2, method, trace)
    else:
        d3 = top.dim if d == 0 and d2 == 0 else 0
        compute_connectivity(mesh, d, d3, method, trace)
        compute_connectivity(mesh, d3, d2, method, trace)
        intersection(top, d, d2, d3, method, trace)


def connectivity_rows(topology, d, d2):
    """The stored class ``d -> d2`` or ``None``; never computes."""
    return topology(d, d2)


def euler_characteristic(mesh):
    """Alternating sum of entity counts, building all dimensions first."""
    return sum((-1) ** d * mesh.num_entities(d) for d in range(mesh.tdim + 1))


__all__ = [
    "METHODS", "entity_templates", "local_entity_vertex_sets", "build", "transpose",
    "intersection", "compute_entities", "compute_connectivity", "connectivity_rows",
    "euler_characteristic",
]
