"""
Building meshes
===============

A mesh can be entered by hand through the editor or produced by the unit
interval, square and cube generators.
"""

from simplexmesh import MeshEditor, Connectivity, euler_characteristic, is_ordered, order
from simplexmesh import unit_cube, unit_interval, unit_square
from simplexmesh.construction import DanglingVertexError

editor = MeshEditor()
editor.open("triangle", 2, 2)
editor.init_vertices(4)
editor.add_vertex(0, 0.0, 0.0)
editor.add_vertex(1, 1.0, 0.0)
editor.add_vertex(2, 1.0, 1.0)
editor.add_vertex(3, 0.0, 1.0)
editor.init_cells(2)
editor.add_cell(0, 0, 1, 2)
editor.add_cell(1, 0, 2, 3)
mesh = editor.close()
print(mesh)

# the editor refuses cells that point at vertices that do not exist
editor.open("interval", 1, 1)
editor.init_vertices(2)
editor.add_vertex(0, 0.0)
editor.add_vertex(1, 1.0)
editor.init_cells(1)
try:
    editor.add_cell(0, 0, 2)
except DanglingVertexError as exc:
    print("rejected:", exc)

for m in (unit_interval(8), unit_square(8, 8), unit_cube(8, 8, 8)):
    m.init_all()
    counts = [m.num_entities(d) for d in range(m.tdim + 1)]
    print(f"{m.kind.label:12s} N_d = {counts}, Euler characteristic {euler_characteristic(m)}")

# reversing each cell and sorting it back
m = unit_square(2)
m.topology.replace_cells(Connectivity.from_table(m.cells()[:, ::-1].copy()))
print("ordered before:", is_ordered(m))
order(m)
print("ordered after:", is_ordered(m))
