"""
Plain-text mesh and mesh-function files.

Mesh file::

    # optional comments
    mesh triangle 2 2
    vertices 4
    0 0
    1 0
    1 1
    0 1
    cells 2
    0 1 3
    1 2 3

Coordinates are written with 17 significant digits so a write/read round
trip reproduces them exactly.

Mesh-function file: a ``# meshfunction <dim> <N>`` header followed by ``N``
values, one per line.
"""
from __future__ import annotations

import re

import numpy as np

from .construction import EditorError, MeshEditor
from .core import CellKind, MeshError, MeshFunction


class MeshFileError(MeshError):
    """Malformed mesh or mesh-function file; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _format_float(x):
    return format(float(x), ".17g")


def write_mesh(mesh, path):
    kind, gdim = mesh.kind, mesh.gdim
    lines = [f"mesh {kind.label} {mesh.tdim} {gdim}", f"vertices {mesh.num_vertices()}"]
    lines.extend(" ".join(_format_float(c) for c in row) for row in mesh.geometry.x.tolist())
    lines.append(f"cells {mesh.num_cells()}")
    lines.extend(" ".join(map(str, row)) for row in mesh.cells().tolist())
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _content_lines(fh):
    for number, raw in enumerate(fh, start=1):
        text = raw.split("#", 1)[0].strip()
        if text:
            yield number, text.split()


def read_mesh(path):
    """Read a mesh file, validating it through :class:`MeshEditor`."""
    with open(path) as fh:
        lines = _content_lines(fh)

        def next_line(expect):
            try:
                return next(lines)
            except StopIteration:
                raise MeshFileError(f"unexpected end of file, expected {expect}") from None

        def header(words, keyword, count, line):
            if words[0] != keyword or len(words) != count:
                raise MeshFileError(f"expected '{keyword}' header", line)

        line, words = next_line("mesh header")
        header(words, "mesh", 4, line)
        try:
            kind = CellKind.from_name(words[1])
            tdim, gdim = int(words[2]), int(words[3])
        except ValueError as exc:
            raise MeshFileError(str(exc), line) from None

        editor = MeshEditor()
        try:
            editor.open(kind, tdim, gdim)
            line, words = next_line("vertices header")
            header(words, "vertices", 2, line)
            num_vertices = _parse_count(words[1], line)
            editor.init_vertices(num_vertices)
            for i in range(num_vertices):
                line, words = next_line(f"vertex {i}")
                if words[0] == "cells":
                    raise MeshFileError(f"declared {num_vertices} vertices but found {i}", line)
                editor.add_vertex(i, *_parse_numbers(words, float, line))

            line, words = next_line("cells header")
            if words[0] != "cells":
                raise MeshFileError(f"more than the declared {num_vertices} vertices", line)
            header(words, "cells", 2, line)
            num_cells = _parse_count(words[1], line)
            editor.init_cells(num_cells)
            for i in range(num_cells):
                line, words = next_line(f"cell {i}")
                editor.add_cell(i, *_parse_numbers(words, int, line))
            extra = next(lines, None)
            if extra is not None:
                raise MeshFileError(f"more than the declared {num_cells} cells", extra[0])
            return editor.close()
        except (EditorError, IndexError, ValueError) as exc:
            if isinstance(exc, MeshFileError):
                raise
            raise MeshFileError(str(exc), line) from exc


def _parse_count(word, line):
    try:
        n = int(word)
    except ValueError:
        raise MeshFileError(f"invalid count {word!r}", line) from None
    if n < 0:
        raise MeshFileError(f"negative count {n}", line)
    return n


def _parse_numbers(words, type_, line):
    try:
        return [type_(w) for w in words]
    except ValueError:
        raise MeshFileError(f"cannot parse {' '.join(words)!r}", line) from None


_HEADER = re.compile(r"#\s*meshfunction\s+(\d+)\s+(\d+)\s*$")


def write_mesh_function(values, dim, path):
    """Write a mesh function (or any 1D array of per-entity values)."""
    if isinstance(values, MeshFunction):
        values = values.values
    values = np.asarray(values)
    if values.dtype.kind == "f":
        body = [_format_float(v) for v in values.tolist()]
    else:
        body = [str(int(v)) for v in values.tolist()]
    with open(path, "w") as fh:
        fh.write(f"# meshfunction {dim} {len(values)}\n")
        fh.write("".join(line + "\n" for line in body))


def read_mesh_function(path, mesh=None, dtype=np.uint32):
    """Read a mesh-function file.

    Returns ``(dim, values)``, or a :class:`MeshFunction` on `mesh` if one
    is given.
    """
    with open(path) as fh:
        first = fh.readline()
        match = _HEADER.match(first.strip())
        if not match:
            raise MeshFileError("expected '# meshfunction <dim> <N>' header", 1)
        dim, n = int(match.group(1)), int(match.group(2))
        parse = float if np.dtype(dtype).kind == "f" else int
        values = []
        for number, words in _content_lines(fh):
            if len(words) != 1:
                raise MeshFileError("expected one value per line", number + 1)
            try:
                values.append(parse(words[0]))
            except ValueError:
                raise MeshFileError(f"cannot parse {words[0]!r}", number + 1) from None
    if len(values) != n:
        raise MeshFileError(f"header declares {n} values but file has {len(values)}")
    values = np.array(values, dtype=dtype)
    if mesh is not None:
        return MeshFunction(mesh, dim, dtype, values=values)
    return dim, values
