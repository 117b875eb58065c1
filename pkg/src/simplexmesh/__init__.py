"""
simplexmesh
===========

Simplicial mesh topology in compressed-row arrays, with on-demand
computation of every incidence class, iterators, boundary extraction,
uniform refinement and simulated parallel dof numbering.
"""
from .connectivity import (
    build,
    compute_connectivity,
    compute_entities,
    connectivity_rows,
    entity_templates,
    euler_characteristic,
    intersection,
    local_entity_vertex_sets,
    transpose,
)
from .construction import MeshEditor, is_ordered, order, unit_cube, unit_interval, unit_square
from .core import (
    CellKind,
    Connectivity,
    ConnectivityNotInitializedError,
    Mesh,
    MeshEntity,
    MeshError,
    MeshFunction,
    MeshGeometry,
    MeshTopology,
    ProtectedConnectivityError,
    StaleCursorError,
    estimate_size_bytes,
    mesh_function,
    validate,
)
from .io import read_mesh, read_mesh_function, write_mesh, write_mesh_function
from .iterators import cells, edges, entities, faces, facets, iter_entities, iter_incident, vertices
from .operations import BoundaryExtraction, boundary_mesh, refine_uniform, signed_volumes
from .parallel import (
    DistributedMesh,
    InvalidPartitionError,
    Partition,
    compute_mapping,
    distribute,
    partition_cells,
    reachability_violations,
    serial_pattern,
    sparsity_pattern,
)

__version__ = "0.1.0"
