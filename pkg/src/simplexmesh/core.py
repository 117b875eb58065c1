"""
Fundamental mesh types.

A mesh is a topology (entity counts per dimension plus a table of incidence
classes ``d -> d'``) and a geometry (vertex coordinates). All payload lives
in flat contiguous numpy arrays: each incidence class is an ``offsets`` /
``indices`` pair in compressed-row layout, and the geometry is a single
coordinate array of length ``gdim * N_0``.

Mesh entities are never stored. A :class:`MeshEntity` is a throwaway view
``(dim, index)`` onto its owning mesh.
"""
from __future__ import annotations

import enum
from math import comb

import numpy as np

INDEX_DTYPE = np.uint32
COORD_DTYPE = np.float64


class MeshError(Exception):
    """Base class for domain errors raised by this package."""


class ConnectivityNotInitializedError(MeshError):
    """An incidence class was read before it was computed."""


class ProtectedConnectivityError(MeshError):
    """Attempt to clear the cell-vertex class, from which everything else derives."""


class StaleCursorError(MeshError):
    """A cursor was used after the topology it iterates was modified."""


class CellKind(enum.Enum):
    """Simplex cell types, keyed by name.

    ``POINT`` only appears as the cell kind of the boundary of an interval
    mesh.
    """

    POINT = ("point", 0)
    INTERVAL = ("interval", 1)
    TRIANGLE = ("triangle", 2)
    TETRAHEDRON = ("tetrahedron", 3)

    def __init__(self, label, tdim):
        self.label = label
        self.tdim = tdim

    @property
    def num_vertices(self):
        return self.tdim + 1

    def num_entities(self, d):
        """Number of sub-entities of dimension `d` in one cell."""
        if not 0 <= d <= self.tdim:
            raise IndexError(f"dimension {d} out of range for {self.label}")
        return comb(self.tdim + 1, d + 1)

    @classmethod
    def from_name(cls, name):
        for kind in cls:
            if kind.label == name:
                return kind
        raise ValueError(f"unknown cell kind {name!r}")

    @classmethod
    def from_dim(cls, tdim):
        for kind in cls:
            if kind.tdim == tdim:
                return kind
        raise ValueError(f"no simplex cell kind of dimension {tdim}")


class Connectivity:
    """One incidence class ``d -> d'`` in compressed-row storage.

    Row ``i`` (the entities of dimension ``d'`` incident to ``(d, i)``) is
    ``indices[offsets[i]:offsets[i + 1]]``.
    """

    __slots__ = ("offsets", "indices")

    def __init__(self, offsets, indices):
        self.offsets = np.ascontiguousarray(offsets, dtype=INDEX_DTYPE)
        self.indices = np.ascontiguousarray(indices, dtype=INDEX_DTYPE)

    @classmethod
    def from_table(cls, table):
        """Fixed-width rows, e.g. an ``(N, D + 1)`` cell-vertex array."""
        table = np.asarray(table)
        n, width = table.shape
        offsets = np.arange(0, (n + 1) * width, width, dtype=np.int64)
        return cls(offsets, table.reshape(-1))

    @classmethod
    def from_rows(cls, rows):
        lengths = [len(r) for r in rows]
        offsets = np.zeros(len(rows) + 1, dtype=np.int64)
        np.cumsum(lengths, out=offsets[1:])
        indices = np.fromiter((j for r in rows for j in r), dtype=np.int64, count=int(offsets[-1]))
        return cls(offsets, indices)

    def __len__(self):
        return len(self.offsets) - 1

    def __call__(self, i):
        return self.indices[self.offsets[i]:self.offsets[i + 1]]

    def row(self, i):
        if not 0 <= i < len(self):
            raise IndexError(f"row {i} out of range [0, {len(self)})")
        return self(i)

    def size(self, i):
        return int(self.offsets[i + 1] - self.offsets[i])

    def row_lengths(self):
        return np.diff(self.offsets.astype(np.int64))

    def rows(self):
        """All rows as a list of Python lists (for tests and small meshes)."""
        flat = self.indices.tolist()
        off = self.offsets.tolist()
        return [flat[off[i]:off[i + 1]] for i in range(len(self))]

    def as_table(self):
        """Rows as a 2D array; only valid when every row has the same length."""
        lengths = self.row_lengths()
        if len(lengths) == 0:
            return self.indices.reshape(0, 0)
        width = int(lengths[0])
        if np.any(lengths != width):
            raise ValueError("rows have different lengths")
        return self.indices.reshape(-1, width)

    @property
    def nbytes(self):
        return self.offsets.nbytes + self.indices.nbytes

    def validate(self, num_targets=None):
        """Raise ``ValueError`` unless the arrays are well-formed CRS."""
        off = self.offsets.astype(np.int64)
        if len(off) == 0 or off[0] != 0:
            raise ValueError("offsets must start at 0")
        if np.any(np.diff(off) < 0):
            raise ValueError("offsets must be non-decreasing")
        if off[-1] != len(self.indices):
            raise ValueError("last offset must equal the number of indices")
        if num_targets is not None and len(self.indices) and self.indices.max() >= num_targets:
            raise ValueError("index out of range for target dimension")
        # duplicate check: sort each row and look for equal neighbours
        rows = np.repeat(np.arange(len(self), dtype=np.int64), np.diff(off))
        order = np.lexsort((self.indices, rows))
        r, v = rows[order], self.indices[order]
        if np.any((r[1:] == r[:-1]) & (v[1:] == v[:-1])):
            raise ValueError("duplicate index within a row")

    def equals(self, other):
        return np.array_equal(self.offsets, other.offsets) and np.array_equal(self.indices, other.indices)

    def __repr__(self):
        return f"Connectivity(rows={len(self)}, entries={len(self.indices)})"


class MeshTopology:
    """Entity counts per dimension plus the table of incidence classes.

    ``counts[d] == 0`` means the entities of dimension ``d`` have not been
    built yet. The ``revision`` counter is bumped by destructive changes
    (clearing or replacing a class) and is what cursors check for staleness;
    adding a newly computed class does not bump it.
    """

    def __init__(self, tdim):
        self.dim = tdim
        self.counts = [0] * (tdim + 1)
        self._table = [[None] * (tdim + 1) for _ in range(tdim + 1)]
        self.revision = 0

    def _check(self, d):
        if not 0 <= d <= self.dim:
            raise IndexError(f"dimension {d} out of range [0, {self.dim}]")

    def size(self, d):
        self._check(d)
        return self.counts[d]

    def __call__(self, d, d2):
        """Stored class ``d -> d2`` or ``None``; never computes."""
        self._check(d)
        self._check(d2)
        return self._table[d][d2]

    def get(self, d, d2):
        """Like calling the topology, but raise if the class is missing."""
        conn = self(d, d2)
        if conn is None:
            raise ConnectivityNotInitializedError(f"connectivity {d} -> {d2} has not been computed")
        return conn

    def set(self, d, d2, conn):
        self._check(d)
        self._check(d2)
        replacing = self._table[d][d2] is not None
        if d == self.dim and d2 == 0 and replacing:
            raise ProtectedConnectivityError("cell-vertex connectivity is immutable; use replace_cells")
        self._table[d][d2] = conn
        if replacing:
            self.revision += 1

    def stored(self):
        """The ``(d, d')`` pairs with a stored class, in row-major order."""
        return [(d, d2) for d in range(self.dim + 1) for d2 in range(self.dim + 1) if self._table[d][d2] is not None]

    def clear(self, d, d2):
        self._check(d)
        self._check(d2)
        if d == self.dim and d2 == 0:
            raise ProtectedConnectivityError(f"connectivity {d} -> 0 cannot be cleared")
        if self._table[d][d2] is not None:
            self._table[d][d2] = None
            self.revision += 1

    def clear_derived(self):
        """Drop every class except ``D -> 0`` and forget intermediate entity counts."""
        changed = False
        for d, d2 in self.stored():
            if (d, d2) != (self.dim, 0):
                self._table[d][d2] = None
                changed = True
        for d in range(1, self.dim):
            self.counts[d] = 0
        if changed:
            self.revision += 1

    def replace_cells(self, conn):
        """Swap in a new ``D -> 0`` class. All derived data is dropped."""
        self.clear_derived()
        self._table[self.dim][0] = conn
        self.counts[self.dim] = len(conn)
        self.revision += 1

    def size_bytes(self):
        """Payload bytes of all stored classes (4 per offset and index)."""
        return sum(self._table[d][d2].nbytes for d, d2 in self.stored())

    def __repr__(self):
        return f"MeshTopology(dim={self.dim}, counts={self.counts}, stored={self.stored()})"


class MeshGeometry:
    """Vertex coordinates in one flat array of length ``gdim * N_0``."""

    def __init__(self, gdim, coordinates):
        if not 1 <= gdim <= 3:
            raise ValueError(f"geometric dimension must be 1, 2 or 3, got {gdim}")
        coordinates = np.ascontiguousarray(coordinates, dtype=COORD_DTYPE).reshape(-1)
        if len(coordinates) % gdim:
            raise ValueError("coordinate array length is not a multiple of gdim")
        if not np.all(np.isfinite(coordinates)):
            raise ValueError("coordinates must be finite")
        self.dim = gdim
        self.coordinates = coordinates

    @property
    def num_vertices(self):
        return len(self.coordinates) // self.dim

    @property
    def x(self):
        """``(N_0, gdim)`` view onto the coordinate array."""
        return self.coordinates.reshape(-1, self.dim)

    def point(self, v):
        if not 0 <= v < self.num_vertices:
            raise IndexError(f"vertex {v} out of range [0, {self.num_vertices})")
        n = self.dim
        return tuple(self.coordinates[n * v:n * v + n].tolist())

    def size_bytes(self):
        return self.coordinates.nbytes


class Mesh:
    """A simplicial mesh: cell kind, topology and geometry."""

    def __init__(self, kind, topology, geometry):
        if topology.dim != kind.tdim:
            raise ValueError("topology dimension does not match cell kind")
        if topology(topology.dim, 0) is None:
            raise ValueError("topology has no cell-vertex connectivity")
        if geometry.num_vertices != topology.counts[0]:
            raise ValueError("geometry and topology disagree on the number of vertices")
        self.kind = kind
        self.topology = topology
        self.geometry = geometry

    @classmethod
    def from_arrays(cls, kind, coordinates, cells):
        """Create a mesh from an ``(N_0, gdim)`` coordinate array and an ``(N_D, D + 1)`` cell array.

        No validation beyond shapes is done; use :class:`~simplexmesh.construction.MeshEditor`
        for checked input.
        """
        if isinstance(kind, str):
            kind = CellKind.from_name(kind)
        coordinates = np.asarray(coordinates, dtype=COORD_DTYPE)
        if coordinates.ndim == 1:
            coordinates = coordinates[:, None]
        cells = np.asarray(cells)
        if cells.ndim != 2 or cells.shape[1] != kind.num_vertices:
            raise ValueError(f"{kind.label} cells need {kind.num_vertices} vertices each")
        topology = MeshTopology(kind.tdim)
        topology.counts[0] = len(coordinates)
        topology.counts[kind.tdim] = len(cells)
        topology.set(kind.tdim, 0, Connectivity.from_table(cells))
        return cls(kind, topology, MeshGeometry(coordinates.shape[1], coordinates))

    @property
    def tdim(self):
        return self.topology.dim

    @property
    def gdim(self):
        return self.geometry.dim

    def num_vertices(self):
        return self.topology.counts[0]

    def num_cells(self):
        return self.topology.counts[self.tdim]

    def num_entities(self, d):
        """Entity count of dimension `d`, building the entities if needed."""
        if self.topology.size(d) == 0:
            self.init(d)
        return self.topology.counts[d]

    def cells(self):
        """Cell-vertex table as an ``(N_D, D + 1)`` array view."""
        return self.topology(self.tdim, 0).as_table()

    def coordinates(self):
        return self.geometry.x

    def init(self, d, d2=None):
        """Compute entities of dimension `d`, or the class ``d -> d2``."""
        from .connectivity import compute_connectivity, compute_entities

        if d2 is None:
            compute_entities(self, d)
        else:
            compute_connectivity(self, d, d2)

    def init_all(self):
        """Compute every incidence class ``d -> d'``."""
        for d in range(self.tdim + 1):
            for d2 in range(self.tdim + 1):
                self.init(d, d2)

    def size_bytes(self):
        """Payload bytes of topology and geometry, ignoring object headers."""
        return self.topology.size_bytes() + self.geometry.size_bytes()

    def entity(self, d, i):
        return MeshEntity(self, d, i)

    def __repr__(self):
        return (f"<Mesh {self.kind.label} tdim={self.tdim} gdim={self.gdim} "
                f"vertices={self.num_vertices()} cells={self.num_cells()}>")


class MeshEntity:
    """View of entity ``(dim, index)``. Holds nothing but the reference and the pair."""

    __slots__ = ("mesh", "dim", "index")

    def __init__(self, mesh, dim, index):
        if not 0 <= dim <= mesh.tdim:
            raise IndexError(f"dimension {dim} out of range [0, {mesh.tdim}]")
        n = mesh.topology.counts[dim]
        if not 0 <= index < n:
            raise IndexError(f"entity ({dim}, {index}) out of range, N_{dim} = {n}")
        self.mesh = mesh
        self.dim = dim
        self.index = index

    def entities(self, d2):
        """Indices of incident entities of dimension `d2`, in stored order.

        Raises :class:`ConnectivityNotInitializedError` if the class has not
        been computed; the iterator functions compute it instead.
        """
        return self.mesh.topology.get(self.dim, d2)(self.index)

    def num_entities(self, d2):
        return self.mesh.topology.get(self.dim, d2).size(self.index)

    def point(self):
        if self.dim != 0:
            raise MeshError("point() is only defined for vertices")
        return self.mesh.geometry.point(self.index)

    def midpoint(self):
        x = self.mesh.geometry.x
        if self.dim == 0:
            return x[self.index].copy()
        return x[self.entities(0)].mean(axis=0)

    def __eq__(self, other):
        return (isinstance(other, MeshEntity) and other.mesh is self.mesh
                and other.dim == self.dim and other.index == self.index)

    def __hash__(self):
        return hash((id(self.mesh), self.dim, self.index))

    def __repr__(self):
        return f"MeshEntity({self.dim}, {self.index})"


_FUNCTION_DTYPES = {
    bool: np.bool_, np.bool_: np.bool_, "bool": np.bool_,
    int: np.uint32, np.uint32: np.uint32, "uint": np.uint32, "uint32": np.uint32,
    float: np.float64, np.float64: np.float64, "float": np.float64, "double": np.float64,
}


class MeshFunction:
    """One value per entity of a fixed dimension.

    Value types are limited to bool, uint32 and float64.
    """

    def __init__(self, mesh, dim, dtype=np.uint32, fill=0, values=None):
        try:
            dtype = _FUNCTION_DTYPES[dtype]
        except KeyError:
            raise TypeError(f"unsupported mesh function value type {dtype!r}") from None
        n = mesh.num_entities(dim)
        if values is None:
            values = np.full(n, fill, dtype=dtype)
        else:
            values = np.array(values, dtype=dtype)
            if values.shape != (n,):
                raise ValueError(f"expected {n} values, got shape {values.shape}")
        self.mesh = mesh
        self.dim = dim
        self.values = values

    @property
    def dtype(self):
        return self.values.dtype

    def __len__(self):
        return len(self.values)

    def _check(self, i):
        if not 0 <= i < len(self.values):
            raise IndexError(f"index {i} out of range [0, {len(self.values)})")

    def __getitem__(self, i):
        if isinstance(i, MeshEntity):
            i = i.index
        self._check(i)
        return self.values[i].item()

    def __setitem__(self, i, value):
        if isinstance(i, MeshEntity):
            i = i.index
        self._check(i)
        self.values[i] = value

    def __iter__(self):
        return iter(self.values.tolist())

    def __repr__(self):
        return f"MeshFunction(dim={self.dim}, dtype={self.values.dtype}, size={len(self.values)})"


def mesh_function(mesh, dim, fill=0, dtype=None):
    """Create a :class:`MeshFunction` filled with `fill`, inferring the value type from it."""
    if dtype is None:
        dtype = type(fill) if type(fill) in (bool, int, float) else np.uint32
    return MeshFunction(mesh, dim, dtype=dtype, fill=fill)


def estimate_size_bytes(num_cells, num_vertices, tdim=3, gdim=3):
    """Bytes for a simplicial mesh storing only cell-vertex connectivity.

    ``4 * ((D + 1) * N_D + N_D + 1)`` for the offsets/indices pair plus
    ``8 * gdim * N_0`` for coordinates. Accepts exact rationals (e.g.
    :class:`fractions.Fraction`) for the counts.
    """
    return 4 * ((tdim + 1) * num_cells + num_cells + 1) + 8 * gdim * num_vertices


def validate(mesh):
    """Check CRS well-formedness of every stored class and the mesh-level invariants.

    Raises ``ValueError`` on the first violation.
    """
    top = mesh.topology
    D = top.dim
    if mesh.geometry.num_vertices != top.counts[0]:
        raise ValueError("vertex count mismatch between geometry and topology")
    cells = top(D, 0)
    if cells is None:
        raise ValueError("missing cell-vertex connectivity")
    if np.any(cells.row_lengths() != D + 1):
        raise ValueError(f"every cell must have {D + 1} vertices")
    for d, d2 in top.stored():
        conn = top(d, d2)
        if len(conn) != top.counts[d]:
            raise ValueError(f"connectivity {d} -> {d2} has {len(conn)} rows, expected {top.counts[d]}")
        try:
            conn.validate(top.counts[d2])
        except ValueError as exc:
            raise ValueError(f"connectivity {d} -> {d2}: {exc}") from None
