import numpy as np
import pytest

from simplexmesh import Mesh, MeshEditor


def make_two_triangles():
    """Unit square split along the (1, 3) diagonal: cells (0,1,3), (1,2,3)."""
    coords = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
    return Mesh.from_arrays("triangle", coords, [[0, 1, 3], [1, 2, 3]])


def make_single(kind):
    coords = {"interval": [[0.0], [1.0]],
              "triangle": [[0, 0], [1, 0], [0, 1]],
              "tetrahedron": [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]}[kind]
    n = len(coords)
    return Mesh.from_arrays(kind, np.array(coords, dtype=float), [list(range(n))])


@pytest.fixture
def two_triangles():
    return make_two_triangles()


@pytest.fixture
def editor_mesh():
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
    return editor.close()
