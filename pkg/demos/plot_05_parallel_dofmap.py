"""
Numbering degrees of freedom over several ranks
===============================================

The ranks are simulated in one process and only talk through a message
queue. Each rank numbers the vertices it owns and receives the numbers of
vertices it shares with lower ranks.
"""

import numpy as np

from simplexmesh import (InvalidPartitionError, Mesh, MeshFunction, Partition, compute_mapping,
                         distribute, partition_cells, reachability_violations, serial_pattern,
                         sparsity_pattern, unit_square)
from simplexmesh.parallel import global_numbering

mesh = unit_square(4, 4)
partition = partition_cells(mesh, 3)
print("cells per rank:", np.bincount(partition.owner.values).tolist())

dm = distribute(mesh, partition)
for r in dm:
    print(f"rank {r.rank}: {r.mesh.num_cells()} cells, shared facets {r.shared_facets().tolist()}")

result = compute_mapping(dm)
print("offsets:", result.offsets, "owned:", result.owned, "messages:", result.messages)

pi = global_numbering(dm, result)
print("every vertex numbered once:", sorted(pi.tolist()) == list(range(result.num_global)))
relabelled = {(int(pi[a]), int(pi[b])) for a, b in serial_pattern(mesh)}
print("same sparsity pattern as serial:", sparsity_pattern(dm, result) == relabelled)

# two ranks that touch only at a vertex cannot agree on its number
bowtie = Mesh.from_arrays("triangle", [[0, 0], [1, 0], [0.5, 0.5], [0, 1], [1, 1]],
                          [[0, 1, 2], [2, 3, 4]])
split = Partition(2, MeshFunction(bowtie, 2, np.uint32, values=[0, 1]))
print("vertices with no facet path:", reachability_violations(bowtie, split))
try:
    compute_mapping(distribute(bowtie, split))
except InvalidPartitionError as exc:
    print("rejected:", exc)
