"""Execute scene statements against a matrix stack and a current colour."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import EvaluationError, NegativeParam, NextOutsideInvocation
from ..instantiate import InstanceGraph
from .language import AXES, CHANNELS, number

DEFAULT_COLOR = (0.0, 0.0, 0.0, 1.0)
DEFAULT_MAX_STEPS = 5_000_000


@dataclass(frozen=True)
class CubeInstance:
    transform: np.ndarray
    color: tuple[float, float, float, float]


@dataclass
class EvalState:
    matrix_stack: list[np.ndarray] = field(default_factory=lambda: [np.eye(4)])
    color: list[float] = field(default_factory=lambda: list(DEFAULT_COLOR))

    @property
    def top(self) -> np.ndarray:
        return self.matrix_stack[-1]

    def apply(self, m: np.ndarray) -> None:
        # column vectors, post-multiplication: the newest transform acts first
        self.matrix_stack[-1] = self.matrix_stack[-1] @ m


def scale_matrix(sx: float, sy: float, sz: float) -> np.ndarray:
    return np.diag([sx, sy, sz, 1.0])


def translation_matrix(tx: float, ty: float, tz: float) -> np.ndarray:
    m = np.eye(4)
    m[:3, 3] = (tx, ty, tz)
    return m


def rotation_matrix(axis, degrees: float) -> np.ndarray:
    """Axis-angle rotation with the same convention as ``glRotate``."""
    x, y, z = axis
    norm = math.sqrt(x * x + y * y + z * z)
    if norm == 0.0:
        raise EvaluationError("rotation about a zero axis")
    x, y, z = x / norm, y / norm, z / norm
    a = math.radians(degrees)
    c, s = math.cos(a), math.sin(a)
    t = 1.0 - c
    m = np.eye(4)
    m[:3, :3] = [
        [x * x * t + c, x * y * t - z * s, x * z * t + y * s],
        [y * x * t + z * s, y * y * t + c, y * z * t - x * s],
        [x * z * t - y * s, y * z * t + x * s, z * z * t + c],
    ]
    return m


class Evaluator:
    """Runs scenes with an explicit work stack, so recursion depth is free.

    Work items are ``(statement id, parameter)``; the parameter is the one
    of the innermost enclosing ``draw`` of a defined object (``None`` at
    scene level).
    """

    def __init__(self, graph: InstanceGraph, scoped_color: bool = False, max_steps: int = DEFAULT_MAX_STEPS):
        self.graph = graph
        self.scoped_color = scoped_color
        self.max_steps = max_steps

    def run(self) -> list[CubeInstance]:
        program = self.graph[self.graph.root]
        scenes = [i for i in program.fields["items"] if self.graph[i].element_type == "Scene"]
        if not scenes:
            raise EvaluationError("the program has no scene")
        cubes: list[CubeInstance] = []
        for scene_id in scenes:
            cubes += self.run_scene(scene_id)
        return cubes

    def run_scene(self, scene_id: int) -> list[CubeInstance]:
        g = self.graph
        state = EvalState()
        cubes: list[CubeInstance] = []
        work: list = [(g[scene_id].fields["body"], None)]
        steps = 0
        while work:
            steps += 1
            if steps > self.max_steps:
                raise EvaluationError(f"evaluation exceeded {self.max_steps} steps; is a recursion unbounded?")
            item = work.pop()
            if item[0] == "pop":
                state.matrix_stack.pop()
                if item[1] is not None:
                    state.color = list(item[1])
                continue
            node_id, param = item
            node = g[node_id]
            kind = node.element_type
            f = node.fields
            if kind == "CompositeStatement":
                work.extend((s, param) for s in reversed(f["statements"]))
            elif kind == "ScopedStatement":
                work.append(("pop", tuple(state.color) if self.scoped_color else None))
                state.matrix_stack.append(state.top.copy())
                work.extend((s, param) for s in reversed(f["statements"]))
            elif kind == "RepeatStatement":
                count = int(number(g, f["count"]))
                work.extend([(f["body"], param)] * count)
            elif kind == "DrawStatement":
                p = self._parameter(f["parameter"], param, node.span[0])
                if p == 0:
                    continue
                obj = g[f["object"]]
                if obj.element_type == "PrimitiveObject":
                    cubes.append(CubeInstance(state.top.copy(), tuple(state.color)))
                else:
                    definition = g[obj.fields["ref"].resolved_to]
                    work.append((definition.fields["body"], p))
            elif kind == "ScaleStatement":
                if f["factor"] is not None:
                    k = float(number(g, f["factor"]))
                    state.apply(scale_matrix(k, k, k))
                else:
                    state.apply(scale_matrix(*(self._axis(f, a, 1.0) for a in AXES)))
            elif kind == "TranslateStatement":
                state.apply(translation_matrix(*(self._axis(f, a, 0.0) for a in AXES)))
            elif kind == "RotateStatement":
                axis = [self._axis(f, a, 0.0) for a in AXES]
                state.apply(rotation_matrix(axis, float(number(g, f["angle"]))))
            elif kind == "ColorStatement":
                relative = f["mode"] is not None
                for i, ch in enumerate(CHANNELS):
                    if f[ch] is not None:
                        v = float(number(g, f[ch]))
                        state.color[i] = state.color[i] + v if relative else v
                state.color = [min(1.0, max(0.0, c)) for c in state.color]
            else:
                raise EvaluationError(f"cannot execute {kind}")
        return cubes

    def _axis(self, fields, axis: str, default: float) -> float:
        value = number(self.graph, fields[axis])
        return default if value is None else float(value)

    def _parameter(self, param_id: int | None, current: int | None, offset: int) -> int:
        if param_id is None:
            return 1
        node = self.graph[param_id]
        if node.element_type == "NextParameter":
            if current is None:
                raise NextOutsideInvocation(f"'next' used outside a defined object (offset {offset})")
            p = current - 1
        else:
            p = int(number(self.graph, param_id))
        if p < 0:
            raise NegativeParam(f"negative draw parameter {p} (offset {offset})")
        return p


def evaluate(graph: InstanceGraph, scoped_color: bool = False, max_steps: int = DEFAULT_MAX_STEPS) -> list[CubeInstance]:
    return Evaluator(graph, scoped_color, max_steps).run()
