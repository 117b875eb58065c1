"""
Boundary extraction and uniform refinement.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .connectivity import compute_connectivity, entity_templates
from .core import CellKind, Mesh, MeshError, MeshFunction


class UnsupportedMeshError(MeshError):
    """The operation is not defined for this cell kind or dimension."""


@dataclass
class BoundaryExtraction:
    """A boundary mesh with maps back to the mesh it was extracted from.

    ``vertex_map[v]`` is the original index of boundary vertex ``v`` and
    ``cell_map[c]`` is the original facet index of boundary cell ``c``.
    """

    boundary: Mesh
    vertex_map: MeshFunction
    cell_map: MeshFunction


def _facet_vertices(mesh):
    """``(N_{D-1}, D)`` facet-vertex table; for intervals the facets are the vertices."""
    D = mesh.tdim
    if D == 1:
        return np.arange(mesh.num_vertices())[:, None]
    compute_connectivity(mesh, D - 1, 0)
    return mesh.topology(D - 1, 0).as_table()


def exterior_facets(mesh):
    """Indices of facets incident to exactly one cell, ascending."""
    D = mesh.tdim
    if D == 0:
        raise UnsupportedMeshError("a mesh of dimension 0 has no facets")
    compute_connectivity(mesh, D - 1, D)
    return np.flatnonzero(mesh.topology(D - 1, D).row_lengths() == 1)


def boundary_mesh(mesh):
    """Extract the mesh of exterior facets.

    Boundary cells are the exterior facets in ascending facet order; boundary
    vertices are the vertices of those facets in ascending original order.
    Coordinates are copied.

    Returns
    -------
    BoundaryExtraction
    """
    D = mesh.tdim
    if D == 0:
        raise UnsupportedMeshError("cannot extract the boundary of a dimension-0 mesh")
    facets = exterior_facets(mesh)
    facet_vertices = _facet_vertices(mesh)[facets]
    used = np.unique(facet_vertices)
    local = np.searchsorted(used, facet_vertices)
    coords = mesh.geometry.x[used]
    boundary = Mesh.from_arrays(CellKind.from_dim(D - 1), coords, local)
    vertex_map = MeshFunction(boundary, 0, np.uint32, values=used)
    cell_map = MeshFunction(boundary, D - 1, np.uint32, values=facets)
    return BoundaryExtraction(boundary, vertex_map, cell_map)


def signed_volumes(mesh):
    """Signed cell volumes; only defined when ``tdim == gdim``."""
    if mesh.tdim != mesh.gdim:
        raise UnsupportedMeshError("signed volume needs topological dimension equal to geometric dimension")
    x = mesh.geometry.x[mesh.cells()]
    edges = x[:, 1:, :] - x[:, :1, :]
    return np.linalg.det(edges) / factorial(mesh.tdim)


def cell_volumes(mesh):
    """Unsigned cell volumes (lengths, areas) for any embedding."""
    x = mesh.geometry.x[mesh.cells()]
    edges = x[:, 1:, :] - x[:, :1, :]
    gram = np.einsum("cik,cjk->cij", edges, edges)
    return np.sqrt(np.clip(np.linalg.det(gram), 0.0, None)) / factorial(mesh.tdim)


def _edge_position(kind):
    """Map an unordered local vertex pair to its local edge number."""
    return {frozenset(t): k for k, t in enumerate(entity_templates(kind, 1))}


def refine_uniform(mesh):
    """Split every cell into ``2**D`` children through its edge midpoints.

    New vertices are the old ones followed by one midpoint per edge, in edge
    order. Children are grouped by parent, in parent order. Each child keeps
    the orientation of its parent.

    Returns
    -------
    Mesh
        A new mesh; the input is not modified apart from computing its edges.
    """
    kind = mesh.kind
    D = mesh.tdim
    if kind not in (CellKind.INTERVAL, CellKind.TRIANGLE, CellKind.TETRAHEDRON):
        raise UnsupportedMeshError(f"uniform refinement is not defined for {kind.label} cells")
    cells = mesh.cells().astype(np.int64)
    x = mesh.geometry.x
    n0 = mesh.num_vertices()

    if D == 1:
        mid = n0 + np.arange(len(cells))
        edge_vertices = cells
        children = np.stack([
            np.column_stack([cells[:, 0], mid]),
            np.column_stack([mid, cells[:, 1]]),
        ], axis=1)
    else:
        compute_connectivity(mesh, D, 1)
        edge_vertices = mesh.topology(1, 0).as_table()
        cell_edges = mesh.topology(D, 1).as_table().astype(np.int64)
        pos = _edge_position(kind)

        def m(a, b):
            return n0 + cell_edges[:, pos[frozenset((a, b))]]

        v = [cells[:, a] for a in range(D + 1)]
        if D == 2:
            children = np.stack([
                np.column_stack([v[0], m(0, 1), m(0, 2)]),
                np.column_stack([m(0, 1), v[1], m(1, 2)]),
                np.column_stack([m(0, 2), m(1, 2), v[2]]),
                np.column_stack([m(1, 2), m(0, 2), m(0, 1)]),
            ], axis=1)
        else:
            children = _refine_tetrahedra(v, m, x, edge_vertices, n0)

    new_x = np.concatenate([x, x[edge_vertices].mean(axis=1)])
    return Mesh.from_arrays(kind, new_x, children.reshape(-1, D + 1))


# the three diagonals of the inner octahedron, each with its equator cycle
_OCTAHEDRON = [
    (((0, 1), (2, 3)), [(0, 2), (1, 2), (1, 3), (0, 3)]),
    (((0, 2), (1, 3)), [(0, 1), (1, 2), (2, 3), (0, 3)]),
    (((0, 3), (1, 2)), [(0, 1), (1, 3), (2, 3), (0, 2)]),
]


def _refine_tetrahedra(v, m, x, edge_vertices, n0):
    corners = [
        np.column_stack([v[0], m(0, 1), m(0, 2), m(0, 3)]),
        np.column_stack([m(0, 1), v[1], m(1, 2), m(1, 3)]),
        np.column_stack([m(0, 2), m(1, 2), v[2], m(2, 3)]),
        np.column_stack([m(0, 3), m(1, 3), m(2, 3), v[3]]),
    ]

    def point(idx):
        return x[edge_vertices[idx - n0]].mean(axis=1)

    # shortest diagonal; ties go to the lexicographically smallest vertex pair
    lengths, pairs = [], []
    for (a, b), _ in _OCTAHEDRON:
        p, q = m(*a), m(*b)
        lengths.append(np.linalg.norm(point(p) - point(q), axis=1))
        pairs.append(np.sort(np.column_stack([p, q]), axis=1))
    best = np.zeros(len(lengths[0]), dtype=np.int64)
    best_len, best_pair = lengths[0].copy(), pairs[0].copy()
    for k in (1, 2):
        tie = np.isclose(lengths[k], best_len, rtol=1e-12, atol=0.0)
        smaller = (pairs[k][:, 0] < best_pair[:, 0]) | (
            (pairs[k][:, 0] == best_pair[:, 0]) & (pairs[k][:, 1] < best_pair[:, 1]))
        take = (~tie & (lengths[k] < best_len)) | (tie & smaller)
        best[take] = k
        best_len[take] = lengths[k][take]
        best_pair[take] = pairs[k][take]

    inner = np.zeros((len(best), 4, 4), dtype=np.int64)
    for k, ((a, b), ring) in enumerate(_OCTAHEDRON):
        sel = best == k
        if not sel.any():
            continue
        p, q = m(*a)[sel], m(*b)[sel]
        ring_vertices = [m(*e)[sel] for e in ring]
        for t in range(4):
            inner[sel, t] = np.column_stack([p, q, ring_vertices[t], ring_vertices[(t + 1) % 4]])

    children = np.concatenate([np.stack(corners, axis=1), inner], axis=1)
    _match_orientation(children, v, x, point, n0)
    return children


def _match_orientation(children, v, x, point, n0):
    """Swap the last two vertices of children whose orientation differs from their parent's."""
    def det(p):
        return np.linalg.det(p[:, 1:] - p[:, :1])

    def coords(idx):
        out = np.empty(idx.shape + (3,))
        old = idx < n0
        out[old] = x[idx[old]]
        out[~old] = point(idx[~old])
        return out

    parent = det(np.stack([x[v[a]] for a in range(4)], axis=1))
    for c in range(children.shape[1]):
        child = det(coords(children[:, c]))
        flip = np.sign(child) != np.sign(parent)
        children[flip, c, 2], children[flip, c, 3] = children[flip, c, 3], children[flip, c, 2].copy()
