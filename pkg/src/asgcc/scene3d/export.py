"""Geometry export: Wavefront OBJ and a flat JSON cube list."""

from __future__ import annotations

import json
from typing import BinaryIO

import numpy as np

from .evaluate import CubeInstance

# unit cube centred at the origin
CORNERS = np.array(
    [
        [-0.5, -0.5, -0.5],
        [0.5, -0.5, -0.5],
        [0.5, 0.5, -0.5],
        [-0.5, 0.5, -0.5],
        [-0.5, -0.5, 0.5],
        [0.5, -0.5, 0.5],
        [0.5, 0.5, 0.5],
        [-0.5, 0.5, 0.5],
    ]
)
# counter-clockwise seen from outside, 0-based
TRIANGLES = (
    (0, 3, 2), (0, 2, 1),  # -z
    (4, 5, 6), (4, 6, 7),  # +z
    (0, 1, 5), (0, 5, 4),  # -y
    (3, 7, 6), (3, 6, 2),  # +y
    (0, 4, 7), (0, 7, 3),  # -x
    (1, 2, 6), (1, 6, 5),  # +x
)


def _num(x: float) -> str:
    return f"{x + 0.0:.9g}"  # + 0.0 folds -0.0 into 0.0


def cube_vertices(cube: CubeInstance) -> np.ndarray:
    homogeneous = np.hstack([CORNERS, np.ones((8, 1))])
    return (cube.transform @ homogeneous.T).T[:, :3]


def obj_text(cubes: list[CubeInstance]) -> str:
    lines = [f"# asgcc cube export: {len(cubes)} cubes"]
    for i, cube in enumerate(cubes):
        lines.append(f"o cube_{i}")
        lines.append("# color " + " ".join(_num(c) for c in cube.color))
        for v in cube_vertices(cube):
            lines.append("v " + " ".join(_num(c) for c in v))
        base = 8 * i + 1
        for tri in TRIANGLES:
            lines.append("f " + " ".join(str(base + k) for k in tri))
    return "\n".join(lines) + "\n"


def json_text(cubes: list[CubeInstance]) -> str:
    rows = [
        json.dumps({"transform": [float(x) for x in cube.transform.reshape(-1)], "color": [float(c) for c in cube.color]})
        for cube in cubes
    ]
    if not rows:
        return "[]\n"
    return "[\n" + ",\n".join(rows) + "\n]\n"


def export_obj(cubes: list[CubeInstance], out: BinaryIO) -> None:
    out.write(obj_text(cubes).encode("utf-8"))


def export_json(cubes: list[CubeInstance], out: BinaryIO) -> None:
    out.write(json_text(cubes).encode("utf-8"))
