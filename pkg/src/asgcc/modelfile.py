"""Textual model description files (YAML, ``asm-version: 1``).

Layout::

    asm-version: 1
    start: Program
    elements:
      - name: Number
        kind: basic
        pattern: {regex: '[0-9]+', valueBinding: value}
      - name: Pair
        kind: composite
        prefixes: ['(']
        suffixes: [')']
        members:
          - {name: left, elementType: Number}
          - {name: right, elementType: Number, prefixes: [',']}

Keys that hold their default value are omitted when writing. Unbounded
maxima are written as the string ``unbounded``.
"""

from __future__ import annotations

from pathlib import Path

import yaml

from .errors import ModelFileError
from .model import (
    UNBOUNDED,
    DisambiguationSpec,
    ElementModel,
    Member,
    ModelSet,
    PatternSpec,
    build_model,
)

ASM_VERSION = 1

_MEMBER_KEYS = {
    "name", "elementType", "optional", "minimum", "maximum", "separators",
    "prefixes", "suffixes", "isReference", "freeOrderGroup",
}
_ELEMENT_KEYS = {
    "name", "kind", "members", "alternatives", "pattern", "prefixes", "suffixes",
    "idMembers", "customConstraints", "disambiguation",
}


def model_to_dict(model: ModelSet) -> dict:
    return {
        "asm-version": ASM_VERSION,
        "start": model.start,
        "elements": [_element_to_dict(e) for e in model],
    }


def _element_to_dict(e: ElementModel) -> dict:
    d: dict = {"name": e.name, "kind": e.kind}
    if e.prefixes:
        d["prefixes"] = list(e.prefixes)
    if e.suffixes:
        d["suffixes"] = list(e.suffixes)
    if e.members:
        d["members"] = [_member_to_dict(m) for m in e.members]
    if e.alternatives:
        d["alternatives"] = list(e.alternatives)
    if e.pattern is not None:
        d["pattern"] = {"regex": e.pattern.regex, "valueBinding": e.pattern.value_binding}
    if e.id_members:
        d["idMembers"] = list(e.id_members)
    if e.custom_constraints:
        d["customConstraints"] = list(e.custom_constraints)
    if e.disambiguation is not None:
        s = e.disambiguation
        d["disambiguation"] = {"associativity": s.associativity, "composition": s.composition, "priority": s.priority}
    return d


def _member_to_dict(m: Member) -> dict:
    d: dict = {"name": m.name, "elementType": m.element_type}
    if m.optional:
        d["optional"] = True
    if m.minimum != (0 if m.optional else 1):
        d["minimum"] = m.minimum
    if m.maximum != max(1, m.minimum):
        d["maximum"] = "unbounded" if m.maximum is UNBOUNDED else m.maximum
    for key, value in (("separators", m.separators), ("prefixes", m.prefixes), ("suffixes", m.suffixes)):
        if value:
            d[key] = list(value)
    if m.is_reference:
        d["isReference"] = True
    if m.free_order_group is not None:
        d["freeOrderGroup"] = m.free_order_group
    return d


def dumps(model: ModelSet) -> str:
    return yaml.safe_dump(model_to_dict(model), sort_keys=False, default_flow_style=None, width=100)


def model_from_dict(data: dict) -> ModelSet:
    if not isinstance(data, dict):
        raise ModelFileError("model description must be a mapping")
    version = data.get("asm-version")
    if version != ASM_VERSION:
        raise ModelFileError(f"unsupported asm-version {version!r} (expected {ASM_VERSION})")
    if "start" not in data or "elements" not in data:
        raise ModelFileError("model description needs 'start' and 'elements'")
    elements = [_element_from_dict(d) for d in data["elements"] or []]
    return build_model(elements, data["start"])


def _tuple(d: dict, key: str) -> tuple[str, ...]:
    value = d.get(key, ())
    if isinstance(value, str):
        return (value,)
    return tuple(str(v) for v in value)


def _element_from_dict(d: dict) -> ElementModel:
    if not isinstance(d, dict) or "name" not in d or "kind" not in d:
        raise ModelFileError(f"element entry needs 'name' and 'kind': {d!r}")
    unknown = set(d) - _ELEMENT_KEYS
    if unknown:
        raise ModelFileError(f"{d['name']}: unknown keys {sorted(unknown)}")
    pattern = None
    if "pattern" in d:
        p = d["pattern"]
        pattern = PatternSpec(p, "value") if isinstance(p, str) else PatternSpec(p["regex"], p.get("valueBinding", "value"))
    disamb = None
    if "disambiguation" in d:
        s = d["disambiguation"]
        disamb = DisambiguationSpec(s.get("associativity", "none"), s.get("composition", "eager"), s.get("priority", 0))
    return ElementModel(
        name=d["name"],
        kind=d["kind"],
        members=tuple(_member_from_dict(d["name"], m) for m in d.get("members", ())),
        alternatives=_tuple(d, "alternatives"),
        pattern=pattern,
        prefixes=_tuple(d, "prefixes"),
        suffixes=_tuple(d, "suffixes"),
        id_members=_tuple(d, "idMembers"),
        custom_constraints=_tuple(d, "customConstraints"),
        disambiguation=disamb,
    )


def _member_from_dict(owner: str, d: dict) -> Member:
    if not isinstance(d, dict) or "name" not in d or "elementType" not in d:
        raise ModelFileError(f"{owner}: member entry needs 'name' and 'elementType': {d!r}")
    unknown = set(d) - _MEMBER_KEYS
    if unknown:
        raise ModelFileError(f"{owner}.{d['name']}: unknown keys {sorted(unknown)}")
    optional = bool(d.get("optional", False))
    minimum = d.get("minimum", 0 if optional else 1)
    maximum = d.get("maximum", max(1, minimum))
    if maximum == "unbounded":
        maximum = UNBOUNDED
    elif not isinstance(maximum, int):
        raise ModelFileError(f"{owner}.{d['name']}: maximum must be an integer or 'unbounded'")
    return Member(
        name=d["name"],
        element_type=d["elementType"],
        optional=optional,
        minimum=minimum,
        maximum=maximum,
        separators=_tuple(d, "separators"),
        prefixes=_tuple(d, "prefixes"),
        suffixes=_tuple(d, "suffixes"),
        is_reference=bool(d.get("isReference", False)),
        free_order_group=d.get("freeOrderGroup"),
    )


def loads(text: str) -> ModelSet:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ModelFileError(f"malformed model description: {exc}") from exc
    return model_from_dict(data)


def element_lines(text: str) -> dict[str, int]:
    """Map element names to the 1-based line of their entry, for diagnostics."""
    try:
        root = yaml.compose(text)
    except yaml.YAMLError:
        return {}
    lines: dict[str, int] = {}
    if not isinstance(root, yaml.MappingNode):
        return lines
    for key, value in root.value:
        if key.value == "elements" and isinstance(value, yaml.SequenceNode):
            for entry in value.value:
                if isinstance(entry, yaml.MappingNode):
                    for k, v in entry.value:
                        if k.value == "name":
                            lines[v.value] = entry.start_mark.line + 1
    return lines


def load(path: str | Path) -> ModelSet:
    return loads(Path(path).read_text(encoding="utf-8"))


def dump(model: ModelSet, path: str | Path) -> None:
    Path(path).write_text(dumps(model), encoding="utf-8")
