"""
Walking a mesh with cursors
===========================

Cursors hand out light entity views. Missing classes are computed the first
time a cursor needs them.
"""

from simplexmesh import StaleCursorError, cells, edges, iter_entities, unit_square, vertices

mesh = unit_square(2, 1)

for c in cells(mesh):
    vs = [v.index for v in vertices(c)]
    es = [e.index for e in edges(c)]
    print(f"cell {c.index}: vertices {vs}, edges {es}, midpoint {c.midpoint().round(3)}")

# explicit stepping, in the style of a C++ iterator
cursor = iter_entities(mesh, 0)
while not cursor.end():
    v = cursor.entity()
    print(f"vertex {v.index} at {v.point()} touches {len(cells(v))} cells")
    cursor.increment()

# destroying a class invalidates every cursor that was open
cursor = cells(mesh)
mesh.topology.clear(2, 1)
try:
    next(cursor)
except StaleCursorError as exc:
    print("stale:", exc)
