"""The 3D object description language as an annotated model.

Programs are a sequence of ``define NAME [ ... ]`` blocks and ``scene [...]``
blocks. Statements: ``{...}`` (scoped), ``[...]`` (composite),
``repeat N times S``, ``draw OBJ [P]``, ``scale``, ``rotate``,
``translate`` and ``color``. ``draw NAME`` refers to a definition by name,
so definitions may be used before they appear and may draw themselves.
"""

from __future__ import annotations

import functools
import math

import regex

from ..instantiate import AsgNode, InstanceGraph, constraint
from ..model import UNBOUNDED, ModelBuilder, ModelSet, member

OBJECT_NAME = r"[a-zA-Z_][a-zA-Z0-9_]*"
NUMBER = r"[+-]?[0-9]+(\.[0-9]+)?"
_INTEGER = regex.compile(r"[+-]?[0-9]+")

AXES = ("x", "y", "z")
CHANNELS = ("red", "green", "blue", "alpha")


def _statements(name: str = "statements"):
    return member(name, "Statement", minimum=0, maximum=UNBOUNDED)


def _axes(group: str):
    return [member(a, "Number", optional=True, prefix=a, free_order=group) for a in AXES]


@functools.lru_cache(maxsize=None)
def build_scene3d_model() -> ModelSet:
    b = ModelBuilder(start="Program")
    b.composite("Program", member("items", "ProgramItem", minimum=0, maximum=UNBOUNDED))
    b.selection("ProgramItem", "Definition", "Scene")
    b.composite(
        "Definition",
        member("name", "ObjectName"),
        member("body", "CompositeStatement"),
        prefix="define",
        id="name",
    )
    b.composite("Scene", member("body", "CompositeStatement"), prefix="scene")
    b.selection(
        "Statement",
        "ScopedStatement",
        "CompositeStatement",
        "RepeatStatement",
        "DrawStatement",
        "ScaleStatement",
        "RotateStatement",
        "TranslateStatement",
        "ColorStatement",
    )
    b.composite("ScopedStatement", _statements(), prefix="{", suffix="}")
    b.composite("CompositeStatement", _statements(), prefix="[", suffix="]")
    b.composite(
        "RepeatStatement",
        member("count", "Number", suffix="times"),
        member("body", "Statement"),
        prefix="repeat",
        constraints="scene3d.integer_count",
    )
    b.composite(
        "DrawStatement",
        member("object", "Object"),
        member("parameter", "Parameter", optional=True),
        prefix="draw",
        constraints="scene3d.integer_parameter",
    )
    b.selection("Object", "PrimitiveObject", "DefinedObject")
    b.composite("PrimitiveObject", prefix="cube")
    # "cube" also lexes as a name; the keyword reading wins because the
    # lower-priority reading of a span is preferred
    b.composite("DefinedObject", member("ref", "Definition", reference=True), priority=1)
    b.selection("Parameter", "Number", "NextParameter")
    b.composite("NextParameter", prefix="next")
    b.composite(
        "ScaleStatement",
        member("factor", "Number", optional=True),
        *_axes("axes"),
        prefix="scale",
        constraints="scene3d.scale_arguments",
    )
    b.composite(
        "RotateStatement",
        *_axes("rotation"),
        member("angle", "Number", prefix="angle", free_order="rotation"),
        prefix="rotate",
        constraints="scene3d.rotation_axis",
    )
    b.composite("TranslateStatement", *_axes("axes"), prefix="translate", constraints="scene3d.translate_axes")
    b.composite(
        "ColorStatement",
        member("mode", "RelativeMode", optional=True),
        *[member(c, "Number", optional=True, prefix=c, free_order="channels") for c in CHANNELS],
        prefix="color",
        constraints="scene3d.color_channels",
    )
    b.composite("RelativeMode", prefix="relative")
    b.basic("ObjectName", OBJECT_NAME, value="name")
    b.basic("Number", NUMBER)
    return b.build()


# ---------------------------------------------------------------------------
# constraint hooks


def number(graph: InstanceGraph, node_id: int | None) -> str | None:
    return None if node_id is None else graph[node_id].fields["value"]


def is_integer(lexeme: str) -> bool:
    return _INTEGER.fullmatch(lexeme) is not None


@constraint("scene3d.integer_count")
def _integer_count(node: AsgNode, graph: InstanceGraph) -> str | None:
    count = number(graph, node.fields["count"])
    if not is_integer(count):
        return f"repeat count must be an integer, got {count}"
    if int(count) < 0:
        return f"repeat count must not be negative, got {count}"
    return None


@constraint("scene3d.integer_parameter")
def _integer_parameter(node: AsgNode, graph: InstanceGraph) -> str | None:
    param = node.fields["parameter"]
    if param is None or graph[param].element_type != "Number":
        return None
    value = number(graph, param)
    if not is_integer(value):
        return f"draw parameter must be an integer, got {value}"
    return None


@constraint("scene3d.scale_arguments")
def _scale_arguments(node: AsgNode, graph: InstanceGraph) -> str | None:
    has_factor = node.fields["factor"] is not None
    has_axes = any(node.fields[a] is not None for a in AXES)
    if has_factor == has_axes:
        return "scale takes either a single factor or per-axis values"
    return None


@constraint("scene3d.rotation_axis")
def _rotation_axis(node: AsgNode, graph: InstanceGraph) -> str | None:
    axis = [float(number(graph, node.fields[a]) or 0.0) for a in AXES]
    if not any(node.fields[a] is not None for a in AXES) or math.hypot(*axis) == 0.0:
        return "rotate needs a non-zero axis"
    return None


@constraint("scene3d.translate_axes")
def _translate_axes(node: AsgNode, graph: InstanceGraph) -> str | None:
    if all(node.fields[a] is None for a in AXES):
        return "translate needs at least one axis value"
    return None


@constraint("scene3d.color_channels")
def _color_channels(node: AsgNode, graph: InstanceGraph) -> str | None:
    if all(node.fields[c] is None for c in CHANNELS):
        return "color needs at least one channel value"
    return None
