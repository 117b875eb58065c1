import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from simplexmesh import (
    InvalidPartitionError,
    Mesh,
    MeshFunction,
    Partition,
    compute_mapping,
    distribute,
    partition_cells,
    reachability_violations,
    serial_pattern,
    sparsity_pattern,
    unit_cube,
    unit_interval,
    unit_square,
)
from simplexmesh.parallel import MessageQueue, NonManifoldError, check_mapping, global_numbering, local_facet_vertices

from conftest import make_two_triangles


def _partition(mesh, owner):
    owner = np.asarray(owner)
    return Partition(int(owner.max()) + 1, MeshFunction(mesh, mesh.tdim, np.uint32, values=owner))


def bowtie():
    """Two triangles sharing vertex 2 and nothing else."""
    coords = [[0, 0], [1, 0], [0.5, 0.5], [0, 1], [1, 1]]
    return Mesh.from_arrays("triangle", np.array(coords, float), [[0, 1, 2], [2, 3, 4]])


def _check_result(mesh, dm, result):
    pi = global_numbering(dm, result)
    assert sorted(pi.tolist()) == list(range(mesh.num_vertices()))
    assert result.num_global == mesh.num_vertices()
    # dof numbers agree on both sides of every shared facet
    for r, table in zip(dm, result.maps):
        fv = local_facet_vertices(r.mesh)
        for f in r.shared_facets():
            other = dm[int(r.S.values[f])]
            g = int(r.F.values[f])
            here = {int(r.global_vertex.values[v]): int(pi[r.global_vertex.values[v]]) for v in fv[f]}
            there = {int(other.global_vertex.values[v]): int(pi[other.global_vertex.values[v]]) for v in local_facet_vertices(other.mesh)[g]}
            assert here == there
    relabelled = {(int(pi[a]), int(pi[b])) for a, b in serial_pattern(mesh)}
    assert sparsity_pattern(dm, result) == relabelled


def test_two_triangle_distribution():
    mesh = make_two_triangles()
    dm = distribute(mesh, _partition(mesh, [0, 1]))
    r0, r1 = dm
    assert r0.S.values.tolist() == [1, 0, 0]
    assert r0.F.values.tolist() == [1, 0, 0]
    assert r1.S.values.tolist() == [1, 0, 1]
    assert r1.global_vertex.values.tolist() == [1, 2, 3]
    assert r0.shared_facets().tolist() == [0]


def test_two_triangle_numbering():
    mesh = make_two_triangles()
    dm = distribute(mesh, _partition(mesh, [0, 1]))
    result = compute_mapping(dm)
    assert [t.tolist() for t in result.maps] == [[[0, 1, 2]], [[1, 3, 2]]]
    assert result.offsets == [0, 3] and result.owned == [3, 1]
    assert result.num_global == 4
    _check_result(mesh, dm, result)


def test_single_rank_numbering_is_serial_order():
    mesh = unit_square(2)
    dm = distribute(mesh, partition_cells(mesh, 1))
    result = compute_mapping(dm)
    assert result.messages == 0
    _check_result(mesh, dm, result)


@pytest.mark.parametrize("mesh_fn", [lambda: unit_square(4, 4), lambda: unit_cube(2, 2, 2), lambda: unit_interval(7)])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_generator_partitions(mesh_fn, n):
    mesh = mesh_fn()
    partition = partition_cells(mesh, n)
    assert reachability_violations(mesh, partition) == []
    dm = distribute(mesh, partition)
    result = compute_mapping(dm)
    assert sum(result.owned) == mesh.num_vertices()
    _check_result(mesh, dm, result)


def test_bowtie_rejected():
    mesh = bowtie()
    partition = _partition(mesh, [0, 1])
    assert reachability_violations(mesh, partition) == [2]
    dm = distribute(mesh, partition)
    assert all(len(r.shared_facets()) == 0 for r in dm)
    with pytest.raises(InvalidPartitionError):
        compute_mapping(dm)


def test_bowtie_single_rank_is_fine():
    mesh = bowtie()
    dm = distribute(mesh, _partition(mesh, [0, 0]))
    _check_result(mesh, dm, compute_mapping(dm))


def test_check_mapping_detects_tampering():
    mesh = unit_square(2)
    dm = distribute(mesh, partition_cells(mesh, 2))
    result = compute_mapping(dm)
    result.maps[1][0, 0] = result.maps[1][0, 0] + 1
    with pytest.raises(InvalidPartitionError):
        check_mapping(dm, result)


def test_partition_sizes_balanced():
    mesh = unit_cube(2)
    p = partition_cells(mesh, 3)
    sizes = np.bincount(p.owner.values, minlength=3)
    assert sizes.tolist() == [16, 16, 16]
    assert sorted(np.concatenate([p.cells_of(r) for r in range(3)]).tolist()) == list(range(48))


def test_partition_rank_range():
    mesh = unit_square(1)
    with pytest.raises(ValueError):
        partition_cells(mesh, 0)
    with pytest.raises(ValueError):
        partition_cells(mesh, 3)


def test_distribute_rejects_empty_rank():
    mesh = unit_square(1)
    owner = MeshFunction(mesh, 2, np.uint32, values=[0, 0])
    with pytest.raises(ValueError):
        distribute(mesh, Partition(2, owner))


def test_non_manifold_facet():
    # three triangles on one edge, each on its own rank
    coords = [[0, 0], [1, 0], [0.5, 1], [0.5, -1], [1.5, 0.5]]
    mesh = Mesh.from_arrays("triangle", np.array(coords, float), [[0, 1, 2], [0, 1, 3], [0, 1, 4]])
    with pytest.raises(NonManifoldError):
        distribute(mesh, _partition(mesh, [0, 1, 2]))


def test_only_p1_supported():
    mesh = unit_square(1)
    dm = distribute(mesh, partition_cells(mesh, 1))
    with pytest.raises(NotImplementedError):
        compute_mapping(dm, element="P2")


def test_message_queue_fifo():
    q = MessageQueue()
    q.send(0, 1, "a")
    q.send(0, 1, "b")
    assert q.recv(1, 0) == "a" and q.recv(1, 0) == "b"
    assert q.sent == 2
    with pytest.raises(RuntimeError):
        q.recv(1, 0)


@settings(max_examples=25, deadline=None)
@given(nx=st.integers(1, 4), ny=st.integers(1, 4), n=st.integers(1, 4))
def test_property_checker_predicts_outcome(nx, ny, n):
    mesh = unit_square(nx, ny)
    n = min(n, mesh.num_cells())
    partition = partition_cells(mesh, n)
    dm = distribute(mesh, partition)
    if reachability_violations(mesh, partition):
        with pytest.raises(InvalidPartitionError):
            compute_mapping(dm)
    else:
        _check_result(mesh, dm, compute_mapping(dm))
