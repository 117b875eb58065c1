from fractions import Fraction

import numpy as np
import pytest

from simplexmesh import (
    CellKind,
    Connectivity,
    ConnectivityNotInitializedError,
    Mesh,
    MeshEntity,
    MeshFunction,
    MeshGeometry,
    MeshTopology,
    ProtectedConnectivityError,
    estimate_size_bytes,
    mesh_function,
    unit_cube,
    unit_square,
    validate,
)
from simplexmesh.core import INDEX_DTYPE


def test_two_triangle_cells_storage(two_triangles):
    conn = two_triangles.topology(2, 0)
    assert conn.offsets.tolist() == [0, 3, 6]
    assert conn.indices.tolist() == [0, 1, 3, 1, 2, 3]
    assert conn.offsets.dtype == INDEX_DTYPE and conn.indices.dtype == INDEX_DTYPE


def test_editor_mesh_vertex_and_cells(editor_mesh):
    assert editor_mesh.geometry.point(2) == (1.0, 1.0)
    assert editor_mesh.cells().tolist() == [[0, 1, 2], [0, 2, 3]]


@pytest.mark.parametrize("kind,counts", [
    (CellKind.INTERVAL, [2, 1]),
    (CellKind.TRIANGLE, [3, 3, 1]),
    (CellKind.TETRAHEDRON, [4, 6, 4, 1]),
])
def test_cell_kind_entity_counts(kind, counts):
    assert [kind.num_entities(d) for d in range(kind.tdim + 1)] == counts
    assert CellKind.from_name(kind.label) is kind
    assert CellKind.from_dim(kind.tdim) is kind


def test_cell_kind_errors():
    with pytest.raises(ValueError):
        CellKind.from_name("hexahedron")
    with pytest.raises(IndexError):
        CellKind.TRIANGLE.num_entities(3)


# -- Connectivity ----------------------------------------------------------------

def test_connectivity_from_rows_round_trip():
    rows = [[2, 0], [], [1, 3, 4]]
    conn = Connectivity.from_rows(rows)
    assert conn.offsets.tolist() == [0, 2, 2, 5]
    assert conn.rows() == rows
    assert conn.size(1) == 0 and len(conn) == 3
    assert conn(2).tolist() == [1, 3, 4]
    conn.validate(5)


def test_connectivity_row_range_check():
    conn = Connectivity.from_rows([[0]])
    with pytest.raises(IndexError):
        conn.row(1)


@pytest.mark.parametrize("offsets,indices,message", [
    ([1, 2], [0], "start at 0"),
    ([0, 2, 1], [0, 1], "non-decreasing"),
    ([0, 1], [0, 1], "last offset"),
    ([0, 2], [1, 1], "duplicate"),
    ([0, 1], [7], "out of range"),
])
def test_connectivity_validate_rejects(offsets, indices, message):
    with pytest.raises(ValueError, match=message):
        Connectivity(offsets, indices).validate(3)


def test_connectivity_as_table_needs_uniform_rows():
    with pytest.raises(ValueError):
        Connectivity.from_rows([[0], [1, 2]]).as_table()


def test_nbytes_is_four_per_entry(two_triangles):
    assert two_triangles.topology(2, 0).nbytes == 4 * (3 + 6)


# -- MeshTopology ----------------------------------------------------------------

def test_topology_get_missing_raises():
    top = MeshTopology(2)
    assert top(1, 0) is None
    with pytest.raises(ConnectivityNotInitializedError):
        top.get(1, 0)
    with pytest.raises(IndexError):
        top(3, 0)


def test_cell_vertex_class_is_protected(two_triangles):
    top = two_triangles.topology
    with pytest.raises(ProtectedConnectivityError):
        top.set(2, 0, Connectivity.from_table([[0, 1, 2], [1, 2, 3]]))
    with pytest.raises(ProtectedConnectivityError):
        top.clear(2, 0)


def test_revision_bumps_only_on_destructive_changes(two_triangles):
    top = two_triangles.topology
    two_triangles.init(2, 1)
    assert top.revision == 0
    top.clear(2, 1)
    assert top.revision == 1
    top.clear(2, 1)
    assert top.revision == 1
    two_triangles.init(0, 2)
    top.set(0, 2, top(0, 2))
    assert top.revision == 2


def test_clear_derived_keeps_cells(two_triangles):
    two_triangles.init_all()
    top = two_triangles.topology
    top.clear_derived()
    assert top.stored() == [(2, 0)]
    assert top.counts == [4, 0, 2]


def test_replace_cells_drops_derived(two_triangles):
    two_triangles.init(2, 1)
    top = two_triangles.topology
    top.replace_cells(Connectivity.from_table([[0, 1, 2], [0, 2, 3]]))
    assert top.stored() == [(2, 0)]
    assert top.revision >= 1


# -- geometry and sizes ----------------------------------------------------------

def test_geometry_flat_storage():
    g = MeshGeometry(2, [[0, 0], [1, 2]])
    assert g.coordinates.tolist() == [0, 0, 1, 2]
    assert g.point(1) == (1.0, 2.0)
    assert g.size_bytes() == 32
    with pytest.raises(IndexError):
        g.point(2)


@pytest.mark.parametrize("gdim,coords", [(4, [0.0] * 4), (2, [0.0] * 3), (1, [np.nan])])
def test_geometry_rejects(gdim, coords):
    with pytest.raises(ValueError):
        MeshGeometry(gdim, coords)


def test_size_bytes_formula():
    mesh = unit_cube(2)
    n3, n0 = mesh.num_cells(), mesh.num_vertices()
    assert mesh.topology.size_bytes() == 4 * (5 * n3 + 1)
    assert mesh.size_bytes() == 20 * n3 + 24 * n0 + 4 == estimate_size_bytes(n3, n0)


def test_estimate_accepts_fractions():
    assert estimate_size_bytes(10 ** 6, Fraction(10 ** 6, 6)) == 24_000_004


def test_size_grows_with_stored_classes():
    mesh = unit_square(2)
    before = mesh.size_bytes()
    mesh.init(2, 1)
    assert mesh.size_bytes() > before


def test_mesh_from_arrays_shape_checks():
    with pytest.raises(ValueError):
        Mesh.from_arrays("triangle", [[0, 0], [1, 0]], [[0, 1]])


def test_validate_detects_corruption():
    mesh = unit_square(1)
    validate(mesh)
    mesh.topology(2, 0).indices[0] = 99
    with pytest.raises(ValueError):
        validate(mesh)


# -- entities --------------------------------------------------------------------

def test_entity_view(two_triangles):
    e = two_triangles.entity(2, 1)
    assert e.entities(0).tolist() == [1, 2, 3]
    assert e.num_entities(0) == 3
    assert np.allclose(e.midpoint(), [2 / 3, 2 / 3])
    assert two_triangles.entity(0, 2).point() == (1.0, 1.0)
    assert MeshEntity.__slots__ == ("mesh", "dim", "index")


def test_entity_errors(two_triangles):
    with pytest.raises(IndexError):
        two_triangles.entity(2, 2)
    with pytest.raises(IndexError):
        two_triangles.entity(3, 0)
    with pytest.raises(ConnectivityNotInitializedError):
        two_triangles.entity(2, 0).entities(1)


def test_entity_equality(two_triangles):
    assert two_triangles.entity(0, 1) == two_triangles.entity(0, 1)
    assert two_triangles.entity(0, 1) != two_triangles.entity(0, 2)
    assert len({two_triangles.entity(0, 1), two_triangles.entity(0, 1)}) == 1


# -- mesh functions --------------------------------------------------------------

def test_mesh_function_types(two_triangles):
    assert mesh_function(two_triangles, 0, fill=True).dtype == np.bool_
    assert mesh_function(two_triangles, 0, fill=1.5).dtype == np.float64
    assert mesh_function(two_triangles, 1, fill=0).dtype == np.uint32
    assert len(mesh_function(two_triangles, 1)) == 5
    with pytest.raises(TypeError):
        MeshFunction(two_triangles, 0, dtype=complex)


def test_mesh_function_indexing(two_triangles):
    f = MeshFunction(two_triangles, 2, float)
    f[1] = 2.5
    f[two_triangles.entity(2, 0)] = 1.0
    assert list(f) == [1.0, 2.5]
    assert f[two_triangles.entity(2, 1)] == 2.5
    with pytest.raises(IndexError):
        f[2]


def test_mesh_function_value_shape(two_triangles):
    with pytest.raises(ValueError):
        MeshFunction(two_triangles, 0, values=[1, 2])
