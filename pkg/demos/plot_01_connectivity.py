"""
Incidence classes of a two-triangle mesh
========================================

Only the cell-vertex lists are given. Every other class is computed on
request from three primitives, and each one is kept once computed.
"""

from simplexmesh import Mesh, compute_connectivity, euler_characteristic

# the unit square cut along its (1, 3) diagonal
mesh = Mesh.from_arrays("triangle",
                        [[0, 0], [1, 0], [1, 1], [0, 1]],
                        [[0, 1, 3], [1, 2, 3]])

cells = mesh.topology(2, 0)
print("2 -> 0 offsets:", cells.offsets.tolist())
print("2 -> 0 indices:", cells.indices.tolist())

# edges are numbered in order of first appearance
trace = []
compute_connectivity(mesh, 2, 1, trace=trace)
print("2 -> 1:", mesh.topology(2, 1).rows())
print("1 -> 0:", mesh.topology(1, 0).rows())

# vertex -> cell is the transpose of cell -> vertex
compute_connectivity(mesh, 0, 2, trace=trace)
print("0 -> 2:", mesh.topology(0, 2).rows())

# vertex neighbours pass through the cells
compute_connectivity(mesh, 0, 0, trace=trace)
print("0 -> 0:", mesh.topology(0, 0).rows())
print("primitive calls:", trace)

# the reference method follows the textbook chain, cell neighbours first
other = Mesh.from_arrays("triangle", mesh.geometry.x, mesh.cells())
trace = []
compute_connectivity(other, 1, 1, method="reference", trace=trace)
print("reference chain for 1 -> 1:", trace)
compute_connectivity(mesh, 1, 1)
print("same arrays:", other.topology(1, 1).equals(mesh.topology(1, 1)))

print("Euler characteristic:", euler_characteristic(mesh))
print("bytes stored:", mesh.size_bytes())
