"""
Creating meshes: the step-by-step editor, built-in unit-domain generators and
vertex ordering of cells.
"""
from __future__ import annotations

from itertools import permutations

import numpy as np

from .core import CellKind, Connectivity, Mesh, MeshError


class EditorError(MeshError):
    """Base class for misuse of :class:`MeshEditor`."""


class EditorProtocolError(EditorError):
    """Editor calls out of order (e.g. adding a cell before ``init_cells``)."""


class DuplicateIndexError(EditorError):
    pass


class DanglingVertexError(EditorError):
    """A cell refers to a vertex index that does not exist."""


class ArityError(EditorError):
    """Wrong number of coordinates for a vertex or vertices for a cell."""


class IncompleteMeshError(EditorError):
    """``close()`` called before every announced vertex and cell was added."""


class MeshEditor:
    """Define a mesh vertex by vertex and cell by cell.

    Example
    -------
    >>> editor = MeshEditor()
    >>> editor.open("triangle", 2, 2)
    >>> editor.init_vertices(3)
    >>> editor.add_vertex(0, 0.0, 0.0)
    >>> editor.add_vertex(1, 1.0, 0.0)
    >>> editor.add_vertex(2, 0.0, 1.0)
    >>> editor.init_cells(1)
    >>> editor.add_cell(0, 0, 1, 2)
    >>> mesh = editor.close()
    """

    def __init__(self):
        self._state = "closed"

    def open(self, kind, tdim=None, gdim=None):
        if self._state != "closed":
            raise EditorProtocolError("editor is already open")
        if isinstance(kind, str):
            kind = CellKind.from_name(kind)
        if tdim is None:
            tdim = kind.tdim
        if gdim is None:
            gdim = tdim
        if tdim != kind.tdim:
            raise ValueError(f"{kind.label} cells have topological dimension {kind.tdim}, not {tdim}")
        if not 1 <= gdim <= 3 or gdim < tdim:
            raise ValueError(f"invalid geometric dimension {gdim} for topological dimension {tdim}")
        self.kind, self.tdim, self.gdim = kind, tdim, gdim
        self._coords = self._cells = None
        self._vertex_set = self._cell_set = None
        self._state = "open"

    def _require(self, *states):
        if self._state not in states:
            raise EditorProtocolError(f"operation not allowed in editor state {self._state!r}")

    def init_vertices(self, num_vertices):
        self._require("open")
        self._coords = np.zeros((num_vertices, self.gdim))
        self._vertex_set = np.zeros(num_vertices, dtype=bool)
        self._state = "vertices"

    def add_vertex(self, i, *coords):
        self._require("vertices")
        if len(coords) == 1 and np.ndim(coords[0]) == 1:
            coords = tuple(coords[0])
        if len(coords) != self.gdim:
            raise ArityError(f"vertex needs {self.gdim} coordinates, got {len(coords)}")
        if not 0 <= i < len(self._vertex_set):
            raise IndexError(f"vertex index {i} out of range [0, {len(self._vertex_set)})")
        if self._vertex_set[i]:
            raise DuplicateIndexError(f"vertex {i} added twice")
        self._coords[i] = coords
        self._vertex_set[i] = True

    def init_cells(self, num_cells):
        self._require("vertices")
        if not self._vertex_set.all():
            missing = int(np.flatnonzero(~self._vertex_set)[0])
            raise IncompleteMeshError(f"vertex {missing} was never added")
        self._cells = np.zeros((num_cells, self.kind.num_vertices), dtype=np.int64)
        self._cell_set = np.zeros(num_cells, dtype=bool)
        self._state = "cells"

    def add_cell(self, i, *vertices):
        self._require("cells")
        if len(vertices) == 1 and np.ndim(vertices[0]) == 1:
            vertices = tuple(vertices[0])
        if len(vertices) != self.kind.num_vertices:
            raise ArityError(f"{self.kind.label} cell needs {self.kind.num_vertices} vertices, got {len(vertices)}")
        if not 0 <= i < len(self._cell_set):
            raise IndexError(f"cell index {i} out of range [0, {len(self._cell_set)})")
        if self._cell_set[i]:
            raise DuplicateIndexError(f"cell {i} added twice")
        n = len(self._vertex_set)
        for v in vertices:
            if not 0 <= v < n:
                raise DanglingVertexError(f"cell {i} refers to vertex {v}, but only {n} vertices exist")
        if len(set(vertices)) != len(vertices):
            raise ValueError(f"cell {i} repeats a vertex: {vertices}")
        self._cells[i] = vertices
        self._cell_set[i] = True

    def close(self):
        """Finish editing and return the new :class:`Mesh`."""
        self._require("cells")
        if not self._cell_set.all():
            missing = int(np.flatnonzero(~self._cell_set)[0])
            raise IncompleteMeshError(f"cell {missing} was never added")
        mesh = Mesh.from_arrays(self.kind, self._coords, self._cells)
        self._state = "closed"
        self._coords = self._cells = None
        return mesh


def _check_subdivisions(*ns):
    for n in ns:
        if int(n) != n or n < 1:
            raise ValueError(f"subdivision counts must be positive integers, got {n}")


def unit_interval(nx):
    """``nx`` equal cells on [0, 1]."""
    _check_subdivisions(nx)
    x = np.linspace(0.0, 1.0, nx + 1)
    cells = np.column_stack([np.arange(nx), np.arange(1, nx + 1)])
    return Mesh.from_arrays(CellKind.INTERVAL, x[:, None], cells)


def unit_square(nx, ny=None):
    """Triangles on [0, 1]^2; each lattice square is cut along its (0,0)-(1,1) diagonal."""
    ny = nx if ny is None else ny
    _check_subdivisions(nx, ny)
    x, y = np.meshgrid(np.linspace(0, 1, nx + 1), np.linspace(0, 1, ny + 1))
    coords = np.column_stack([x.ravel(), y.ravel()])
    iy, ix = np.meshgrid(np.arange(ny), np.arange(nx), indexing="ij")
    v00 = (iy * (nx + 1) + ix).ravel()
    v10, v01, v11 = v00 + 1, v00 + nx + 1, v00 + nx + 2
    cells = np.stack([
        np.column_stack([v00, v10, v11]),
        np.column_stack([v00, v01, v11]),
    ], axis=1).reshape(-1, 3)
    return Mesh.from_arrays(CellKind.TRIANGLE, coords, cells)


# Kuhn subdivision: one tetrahedron per axis permutation, each walking from
# corner (0,0,0) to (1,1,1) one axis step at a time.
_KUHN_PATHS = np.array([
    [0, 1 << a, (1 << a) | (1 << b), 7] for a, b, _ in permutations(range(3))
])


def unit_cube(nx, ny=None, nz=None):
    """Tetrahedra on [0, 1]^3; each lattice cube is split into 6 tetrahedra around its main diagonal."""
    ny = nx if ny is None else ny
    nz = nx if nz is None else nz
    _check_subdivisions(nx, ny, nz)
    z, y, x = np.meshgrid(np.linspace(0, 1, nz + 1), np.linspace(0, 1, ny + 1),
                          np.linspace(0, 1, nx + 1), indexing="ij")
    coords = np.column_stack([x.ravel(), y.ravel(), z.ravel()])
    sx, sy = 1, nx + 1
    sz = (nx + 1) * (ny + 1)
    iz, iy, ix = np.meshgrid(np.arange(nz), np.arange(ny), np.arange(nx), indexing="ij")
    base = (iz * sz + iy * sy + ix * sx).ravel()
    # corner c of a lattice cube, bits (x, y, z)
    corner = np.array([(c & 1) * sx + ((c >> 1) & 1) * sy + ((c >> 2) & 1) * sz for c in range(8)])
    cells = base[:, None, None] + corner[_KUHN_PATHS][None, :, :]
    return Mesh.from_arrays(CellKind.TETRAHEDRON, coords, cells.reshape(-1, 4))


def order(mesh):
    """Sort every cell's vertices by ascending global index, in place.

    If anything changes, derived incidence classes are recomputed (the ones
    that were stored before) and cursors opened earlier become stale.
    Geometry is not touched. Note that sorting may flip cell orientation.
    """
    from .connectivity import compute_connectivity

    top = mesh.topology
    D = top.dim
    cells = top(D, 0).as_table()
    ordered = np.sort(cells, axis=1)
    if np.array_equal(ordered, cells):
        return
    stored = [pair for pair in top.stored() if pair != (D, 0)]
    top.replace_cells(Connectivity.from_table(ordered))
    for d, d2 in stored:
        compute_connectivity(mesh, d, d2)


def is_ordered(mesh):
    cells = mesh.cells()
    return bool(np.all(cells[:, 1:] > cells[:, :-1]))
