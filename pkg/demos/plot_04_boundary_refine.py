"""
Boundary extraction and uniform refinement
==========================================
"""

import numpy as np

from simplexmesh import boundary_mesh, euler_characteristic, refine_uniform, unit_cube
from simplexmesh.operations import cell_volumes

mesh = unit_cube(2)
result = boundary_mesh(mesh)
b = result.boundary
print(f"boundary: {b.num_cells()} triangles on {b.num_vertices()} vertices")
print("Euler characteristic of the surface:", euler_characteristic(b))
print("total area:", cell_volumes(b).sum())

# every boundary vertex remembers where it came from
v = 5
print(f"boundary vertex {v} is mesh vertex {result.vertex_map[v]} at {b.geometry.point(v)}")
print(f"boundary cell 0 is mesh facet {result.cell_map[0]}")

fine = refine_uniform(mesh)
print(f"refined: {mesh.num_cells()} -> {fine.num_cells()} cells, "
      f"{mesh.num_vertices()} -> {fine.num_vertices()} vertices")

# children of each parent cover it exactly
parent = cell_volumes(mesh)
children = cell_volumes(fine).reshape(-1, 8).sum(axis=1)
print("largest relative volume error:", np.max(np.abs(children - parent) / parent))
