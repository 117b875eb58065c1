from itertools import combinations

import numpy as np
import pytest

from simplexmesh import Mesh, boundary_mesh, euler_characteristic, refine_uniform, unit_cube, unit_interval, unit_square
from simplexmesh.core import CellKind
from simplexmesh.operations import UnsupportedMeshError, cell_volumes, exterior_facets, signed_volumes

from conftest import make_single


def _boundary_edge_cell_counts(boundary):
    counts = {}
    for c in boundary.cells().tolist():
        for e in combinations(sorted(c), 2):
            counts[e] = counts.get(e, 0) + 1
    return counts


def _check_maps(mesh, result):
    D = mesh.tdim
    b = result.boundary
    vmap, cmap = result.vertex_map.values, result.cell_map.values
    assert np.all(np.diff(vmap.astype(np.int64)) > 0)
    assert np.all(np.diff(cmap.astype(np.int64)) > 0)
    assert np.array_equal(b.geometry.x, mesh.geometry.x[vmap])
    if D == 1:
        parent = np.asarray(cmap)[:, None]
    else:
        parent = mesh.topology(D - 1, 0).as_table()[cmap]
    assert np.array_equal(np.sort(vmap[b.cells()], axis=1), np.sort(parent, axis=1))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cube_boundary_is_closed_surface(n):
    mesh = unit_cube(n)
    result = boundary_mesh(mesh)
    b = result.boundary
    assert b.kind is CellKind.TRIANGLE and b.gdim == 3
    assert b.num_cells() == 12 * n * n
    assert set(_boundary_edge_cell_counts(b).values()) == {2}
    assert euler_characteristic(b) == 2
    _check_maps(mesh, result)


def test_square_boundary_is_a_loop():
    mesh = unit_square(3, 2)
    result = boundary_mesh(mesh)
    b = result.boundary
    assert b.num_cells() == 2 * (3 + 2)
    assert b.num_cells() == b.num_vertices()
    assert np.isclose(cell_volumes(b).sum(), 4.0)
    _check_maps(mesh, result)


def test_interval_boundary_is_two_points():
    mesh = unit_interval(5)
    result = boundary_mesh(mesh)
    assert result.boundary.kind is CellKind.POINT
    assert result.vertex_map.values.tolist() == [0, 5]
    assert result.cell_map.values.tolist() == [0, 5]
    _check_maps(mesh, result)


def test_point_mesh_has_no_boundary():
    points = Mesh.from_arrays("point", [[0.0]], [[0]])
    with pytest.raises(UnsupportedMeshError):
        boundary_mesh(points)
    with pytest.raises(UnsupportedMeshError):
        exterior_facets(points)


def test_boundary_of_boundary_is_empty():
    b = boundary_mesh(unit_cube(2)).boundary
    assert len(exterior_facets(b)) == 0


# -- refinement ------------------------------------------------------------------

REFINE_CASES = [
    ("interval", lambda: unit_interval(3)),
    ("square", lambda: unit_square(2, 2)),
    ("cube", lambda: unit_cube(2, 2, 2)),
    ("tet", lambda: make_single("tetrahedron")),
    ("triangle", lambda: make_single("triangle")),
]


@pytest.mark.parametrize("name,mesh_fn", REFINE_CASES, ids=[c[0] for c in REFINE_CASES])
def test_refinement_laws(name, mesh_fn):
    mesh = mesh_fn()
    D = mesh.tdim
    n1 = mesh.num_entities(1)
    fine = refine_uniform(mesh)
    assert fine.num_cells() == 2 ** D * mesh.num_cells()
    assert fine.num_vertices() == mesh.num_vertices() + n1
    parent = cell_volumes(mesh)
    children = cell_volumes(fine).reshape(-1, 2 ** D).sum(axis=1)
    assert np.allclose(children, parent, rtol=1e-12, atol=0)
    assert euler_characteristic(fine) == 1


@pytest.mark.parametrize("mesh_fn", [lambda: make_single("triangle"), lambda: make_single("tetrahedron"),
                                     lambda: unit_cube(2)])
def test_refinement_preserves_orientation(mesh_fn):
    mesh = mesh_fn()
    D = mesh.tdim
    fine = refine_uniform(mesh)
    parent = np.sign(signed_volumes(mesh))
    child = np.sign(signed_volumes(fine)).reshape(-1, 2 ** D)
    assert np.all(child == parent[:, None])


def test_refined_children_are_congruent_for_regular_corner_tet():
    # corner tet of a cube: the three octahedron diagonals are not all equal,
    # and the shortest one gives children of equal volume
    fine = refine_uniform(make_single("tetrahedron"))
    vol = cell_volumes(fine)
    assert np.allclose(vol, vol[0])


def test_refined_midpoints():
    mesh = unit_square(1)
    fine = refine_uniform(mesh)
    edges = mesh.topology(1, 0).as_table()
    assert np.allclose(fine.geometry.x[4:], mesh.geometry.x[edges].mean(axis=1))


def test_refine_twice_boundary():
    fine = refine_uniform(refine_uniform(unit_cube(1)))
    assert fine.num_cells() == 6 * 64
    assert boundary_mesh(fine).boundary.num_cells() == 12 * 16


def test_refine_rejects_points():
    with pytest.raises(UnsupportedMeshError):
        refine_uniform(Mesh.from_arrays("point", [[0.0]], [[0]]))


def test_signed_volume_needs_matching_dims():
    b = boundary_mesh(unit_cube(1)).boundary
    with pytest.raises(UnsupportedMeshError):
        signed_volumes(b)
