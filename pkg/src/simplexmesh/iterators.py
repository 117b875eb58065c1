"""
Iteration over mesh entities.

Cursors iterate either over all entities of one dimension or over the
entities incident to a given entity, and can be nested::

    for cell in cells(mesh):
        for vertex in vertices(cell):
            print(cell.index, vertex.index, vertex.point())

Any incidence class a cursor needs is computed when the cursor is created,
so loop bodies never modify the mesh. A cursor remembers the topology
revision it was created against and raises :class:`StaleCursorError` if the
topology has since been modified destructively (classes cleared or cells
reordered).
"""
from __future__ import annotations

from .connectivity import compute_connectivity, compute_entities
from .core import MeshEntity, MeshError, StaleCursorError


def _view(mesh, dim, index, _new=object.__new__, _cls=MeshEntity):
    # skips the range checks of MeshEntity.__init__; indices come from stored rows
    e = _new(_cls)
    e.mesh = mesh
    e.dim = dim
    e.index = index
    return e


class EntityCursor:
    """Position in a sequence of entities of dimension `dim`.

    Supports the Python iterator protocol as well as explicit stepping with
    :meth:`end`, :meth:`entity` and :meth:`increment`.
    """

    __slots__ = ("mesh", "dim", "_items", "_pos", "_revision")

    def __init__(self, mesh, dim, items):
        self.mesh = mesh
        self.dim = dim
        self._items = items
        self._pos = 0
        self._revision = mesh.topology.revision

    def _check(self):
        if self._revision != self.mesh.topology.revision:
            raise StaleCursorError("mesh topology changed since this cursor was created")

    def __iter__(self):
        self._check()
        mesh, dim, top, rev = self.mesh, self.dim, self.mesh.topology, self._revision
        new, cls = object.__new__, MeshEntity
        start = self._pos
        items = self._items[start:] if start else self._items
        # position is written back once, when the loop ends or is abandoned
        pos = start
        try:
            for index in items:
                if top.revision != rev:
                    raise StaleCursorError("mesh topology changed since this cursor was created")
                e = new(cls)
                e.mesh = mesh
                e.dim = dim
                e.index = index
                pos += 1
                yield e
        finally:
            self._pos = pos

    def __next__(self):
        if self._revision != self.mesh.topology.revision:
            raise StaleCursorError("mesh topology changed since this cursor was created")
        pos = self._pos
        if pos >= len(self._items):
            raise StopIteration
        self._pos = pos + 1
        return _view(self.mesh, self.dim, self._items[pos])

    def __len__(self):
        return len(self._items)

    def end(self):
        return self._pos >= len(self._items)

    def entity(self):
        """The entity at the current position."""
        self._check()
        if self.end():
            raise IndexError("cursor is at end")
        return _view(self.mesh, self.dim, self._items[self._pos])

    @property
    def index(self):
        return self.entity().index

    def increment(self):
        self._check()
        if self.end():
            raise IndexError("cannot advance past end")
        self._pos += 1
        return self

    def reset(self):
        self._check()
        self._pos = 0

    def __repr__(self):
        return f"EntityCursor(dim={self.dim}, position={self._pos}, size={len(self._items)})"


def iter_entities(mesh, dim):
    """Cursor over ``(dim, 0), (dim, 1), ...``, building the entities if needed."""
    compute_entities(mesh, dim)
    return EntityCursor(mesh, dim, range(mesh.topology.counts[dim]))


def iter_incident(entity, dim):
    """Cursor over the entities of dimension `dim` incident to `entity`, in stored order."""
    mesh = entity.mesh
    top = mesh.topology
    if not 0 <= dim <= top.dim:
        raise IndexError(f"dimension {dim} out of range [0, {top.dim}]")
    conn = top._table[entity.dim][dim]
    if conn is None:
        compute_connectivity(mesh, entity.dim, dim)
        conn = top._table[entity.dim][dim]
    off = conn.offsets
    i = entity.index
    return EntityCursor(mesh, dim, conn.indices[off[i]:off[i + 1]].tolist())


def entities(source, dim):
    """Dispatch to :func:`iter_entities` for a mesh and :func:`iter_incident` for an entity."""
    if type(source) is MeshEntity or isinstance(source, MeshEntity):
        return iter_incident(source, dim)
    return iter_entities(source, dim)


def _mesh_of(source):
    return source.mesh if isinstance(source, MeshEntity) else source


def vertices(source):
    return entities(source, 0)


def edges(source):
    return entities(source, 1)


def faces(source):
    if _mesh_of(source).tdim < 2:
        raise IndexError("faces need a mesh of topological dimension 2 or more")
    return entities(source, 2)


def facets(source):
    tdim = _mesh_of(source).tdim
    if tdim < 1:
        raise MeshError("a mesh of dimension 0 has no facets")
    return entities(source, tdim - 1)


def cells(source):
    return entities(source, _mesh_of(source).tdim)
