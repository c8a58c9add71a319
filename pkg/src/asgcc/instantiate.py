"""From a parse tree to an abstract syntax graph.

:func:`build_instances` creates one :class:`AsgNode` per full-element
derivation and one :class:`RefSlot` per reference. Every node with ID
members is entered into a :class:`SymbolTable`. :func:`resolve_references`
then binds every slot (after the whole input is known, so references may
precede or sit inside their definition) and :func:`check_constraints`
runs the registered ``@Constraint`` hooks.

Field values are: ``str`` (a basic element's lexeme), ``int`` (a child
node id), ``RefSlot``, ``None`` (absent optional) or a list of ids/slots.
"""

from __future__ import annotations

import json
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from typing import Any, Optional

from .earley import Tree, deep_recursion
from .errors import ModelError, UnresolvedReference, line_col
from .grammar import COMPOSITE_ORIGIN, REFERENCE, REPETITION, SELECTION_ALT, SPLICE, TOKEN_WRAP
from .model import ModelSet


@dataclass(frozen=True)
class RefSlot:
    target_type: str
    key: tuple[str, ...]
    span: tuple[int, int]
    resolved_to: int | None = None


@dataclass
class AsgNode:
    node_id: int
    element_type: str
    fields: dict[str, Any]
    span: tuple[int, int]


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    offset: int

    def render(self, text: str | None, filename: str = "<input>") -> str:
        line, col = line_col(text, self.offset) if text is not None else (1, self.offset + 1)
        return f"{filename}:{line}:{col}: warning[{self.code}]: {self.message}"


@dataclass
class SymbolTable:
    entries: dict[tuple[str, tuple[str, ...]], int] = field(default_factory=dict)
    duplicates: list[tuple[str, tuple[str, ...], tuple[int, ...]]] = field(default_factory=list)

    def register(self, element_type: str, key: tuple[str, ...], node_id: int) -> None:
        k = (element_type, key)
        if k not in self.entries:
            self.entries[k] = node_id
            return
        for i, (t, kk, ids) in enumerate(self.duplicates):
            if (t, kk) == k:
                self.duplicates[i] = (t, kk, ids + (node_id,))
                return
        self.duplicates.append((element_type, key, (self.entries[k], node_id)))

    def lookup(self, element_type: str, key: tuple[str, ...]) -> int | None:
        return self.entries.get((element_type, key))


@dataclass
class InstanceGraph:
    root: int
    nodes: dict[int, AsgNode]
    warnings: list[Diagnostic] = field(default_factory=list)
    source: str | None = None

    def __getitem__(self, node_id: int) -> AsgNode:
        return self.nodes[node_id]

    def of_type(self, element_type: str) -> list[AsgNode]:
        return [n for n in self.nodes.values() if n.element_type == element_type]

    def slots(self) -> list[RefSlot]:
        return [v for n in self.nodes.values() for v in _values(n)[1]]

    def edges(self) -> list[tuple[int, int, str, str]]:
        """``(source, target, field, kind)`` with kind ``child`` or ``ref``."""
        out = []
        for n in self.nodes.values():
            for name, value in n.fields.items():
                for v in value if isinstance(value, list) else [value]:
                    if isinstance(v, int):
                        out.append((n.node_id, v, name, "child"))
                    elif isinstance(v, RefSlot) and v.resolved_to is not None:
                        out.append((n.node_id, v.resolved_to, name, "ref"))
        return out

    def structure(self, node_id: int) -> Any:
        """Id- and span-free nested view, for field-by-field comparisons."""
        with deep_recursion():
            return self._structure(node_id)

    def _structure(self, node_id: int) -> Any:
        n = self.nodes[node_id]

        def conv(v):
            if isinstance(v, list):
                return [conv(x) for x in v]
            if isinstance(v, int):
                return self._structure(v)
            if isinstance(v, RefSlot):
                return {"ref": v.target_type, "key": list(v.key)}
            return v

        return {"type": n.element_type, "fields": {k: conv(v) for k, v in n.fields.items()}}

    def to_json(self) -> str:
        def conv(v):
            if isinstance(v, list):
                return [conv(x) for x in v]
            if isinstance(v, RefSlot):
                return {"ref": v.resolved_to}
            return v

        nodes = [
            json.dumps(
                {
                    "id": n.node_id,
                    "type": n.element_type,
                    "span": list(n.span),
                    "fields": {k: conv(v) for k, v in n.fields.items()},
                },
                ensure_ascii=False,
            )
            for n in self.nodes.values()
        ]
        warnings = json.dumps([w.message for w in self.warnings], ensure_ascii=False)
        body = ",\n    ".join(nodes)
        return f'{{\n  "root": {self.root},\n  "nodes": [\n    {body}\n  ],\n  "warnings": {warnings}\n}}\n'

    def to_dot(self) -> str:
        lines = ["digraph asg {", "  node [shape=box, fontname=monospace];"]
        for n in self.nodes.values():
            scalars = [f"{k}={v}" for k, v in n.fields.items() if isinstance(v, str)]
            label = f"#{n.node_id} {n.element_type}" + (f"\\n{' '.join(scalars)}" if scalars else "")
            lines.append(f"  n{n.node_id} [label={json.dumps(label)}];")
        for src, dst, name, kind in self.edges():
            if kind == "child":
                lines.append(f"  n{src} -> n{dst} [label={json.dumps(name)}];")
            else:
                lines.append(f'  n{src} -> n{dst} [style=dashed, label="ref"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _values(node: AsgNode) -> tuple[list[int], list[RefSlot]]:
    ids, slots = [], []
    for value in node.fields.values():
        for v in value if isinstance(value, list) else [value]:
            if isinstance(v, int):
                ids.append(v)
            elif isinstance(v, RefSlot):
                slots.append(v)
    return ids, slots


def _key_text(item) -> str:
    toks = item.tokens() if isinstance(item, Tree) else [item]
    return " ".join(t.lexeme for t in toks)


def _items(aux: Tree) -> list[Tree]:
    """Items of a repetition subtree, in source order."""
    out: list[Tree] = []
    stack = [iter(zip(aux.children, aux.production.roles))]
    while stack:
        for child, role in stack[-1]:
            if role == "item":
                out.append(child)
            elif role == SPLICE:
                stack.append(iter(zip(child.children, child.production.roles)))
                break
        else:
            stack.pop()
    return out


class _Builder:
    def __init__(self, model: ModelSet):
        self.model = model
        self.nodes: dict[int, AsgNode] = {}
        self.keys: dict[int, tuple[str, ...]] = {}

    def build(self, tree: Tree) -> int:
        while tree.production.origin == SELECTION_ALT:
            tree = next(c for c, r in zip(tree.children, tree.production.roles) if r == "alt")
        origin = tree.production.origin
        element = self.model[tree.production.owner]
        node = AsgNode(len(self.nodes), element.name, {}, (tree.start, tree.end))
        self.nodes[node.node_id] = node
        if origin == TOKEN_WRAP:
            tok = next(c for c, r in zip(tree.children, tree.production.roles) if r == "value")
            node.fields[element.pattern.value_binding] = tok.lexeme
        elif origin == COMPOSITE_ORIGIN:
            for m in element.members:
                node.fields[m.name] = [] if m.is_list else None
            id_text: dict[str, str] = {}
            self._fill(tree, element, node, id_text)
            if element.id_members:
                self.keys[node.node_id] = tuple(id_text[n] for n in element.id_members)
        else:
            raise ValueError(f"cannot instantiate a {origin} derivation of {tree.symbol}")
        return node.node_id

    def _fill(self, tree: Tree, element, node: AsgNode, id_text: dict[str, str]) -> None:
        for child, role in zip(tree.children, tree.production.roles):
            if role is None:
                continue
            if role == SPLICE:
                self._fill(child, element, node, id_text)
                continue
            m = element.member(role)
            if m.name in element.id_members:
                id_text[m.name] = _key_text(child)
            items = _items(child) if isinstance(child, Tree) and child.production.origin == REPETITION else [child]
            values = [self.reference(t) if m.is_reference else self.build(t) for t in items]
            node.fields[m.name] = values if m.is_list else (values[0] if values else None)

    def reference(self, tree: Tree) -> RefSlot:
        if tree.production.origin != REFERENCE:
            raise ValueError(f"expected a reference derivation, got {tree.production}")
        target = self.model[tree.production.owner]
        parts: dict[str, str] = {}
        for child, role in zip(tree.children, tree.production.roles):
            if role is not None:
                parts[role] = _key_text(child)
        return RefSlot(target.name, tuple(parts[n] for n in target.id_members), (tree.start, tree.end))


def build_instances(tree: Tree, model: ModelSet, text: str | None = None) -> tuple[InstanceGraph, SymbolTable]:
    b = _Builder(model)
    with deep_recursion():
        root = b.build(tree)
    table = SymbolTable()
    for node_id, key in b.keys.items():
        table.register(b.nodes[node_id].element_type, key, node_id)
    return InstanceGraph(root, b.nodes, [], text), table


def resolve_references(graph: InstanceGraph, table: SymbolTable) -> InstanceGraph:
    """Bind every slot; warn once per duplicated key (first definition wins)."""
    text = graph.source
    nodes: dict[int, AsgNode] = {}
    for n in graph.nodes.values():
        fields = {}
        for name, value in n.fields.items():
            if isinstance(value, list):
                fields[name] = [_bind(v, table, text) for v in value]
            else:
                fields[name] = _bind(value, table, text)
        nodes[n.node_id] = AsgNode(n.node_id, n.element_type, fields, n.span)
    warnings = list(graph.warnings)
    for element_type, key, ids in table.duplicates:
        first = graph.nodes[ids[0]]
        where = ", ".join(_where(graph.nodes[i].span[0], text) for i in ids[1:])
        warnings.append(
            Diagnostic(
                "duplicate-id",
                f"{element_type} {' '.join(key)!r} defined {len(ids)} times; "
                f"using the first at {_where(first.span[0], text)}, ignoring {where}",
                graph.nodes[ids[1]].span[0],
            )
        )
    return InstanceGraph(graph.root, nodes, warnings, text)


def _where(offset: int, text: str | None) -> str:
    if text is None:
        return f"offset {offset}"
    line, col = line_col(text, offset)
    return f"{line}:{col}"


def _bind(value, table: SymbolTable, text: str | None):
    if not isinstance(value, RefSlot):
        return value
    target = table.lookup(value.target_type, value.key)
    if target is None:
        raise UnresolvedReference(
            f"unresolved reference to {value.target_type} {' '.join(value.key)!r}",
            value.span[0],
            text,
            target=value.target_type,
            key=value.key,
        )
    return replace(value, resolved_to=target)


# ---------------------------------------------------------------------------
# custom constraints

ConstraintHook = Callable[[AsgNode, InstanceGraph], Optional[str]]
CONSTRAINTS: dict[str, ConstraintHook] = {}


class UnknownConstraint(ModelError):
    code = "unknown-constraint"


def constraint(name: str):
    """Register a hook returning ``None`` on success or a failure message."""

    def register(fn: ConstraintHook) -> ConstraintHook:
        CONSTRAINTS[name] = fn
        return fn

    return register


@dataclass(frozen=True)
class Violation:
    node_id: int
    element_type: str
    constraint: str
    message: str
    span: tuple[int, int]


@dataclass(frozen=True)
class ConstraintReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def missing_constraints(model: ModelSet, registry: dict[str, ConstraintHook] | None = None) -> list[str]:
    registry = CONSTRAINTS if registry is None else registry
    return [c for e in model for c in e.custom_constraints if c not in registry]


def check_constraints(
    graph: InstanceGraph, model: ModelSet, registry: dict[str, ConstraintHook] | None = None
) -> ConstraintReport:
    """Run every element's hooks once per node, depth-first from the root.

    Reference edges are followed too; the visited set keeps cyclic graphs
    finite.
    """
    registry = CONSTRAINTS if registry is None else registry
    missing = missing_constraints(model, registry)
    if missing:
        raise UnknownConstraint(f"no hook registered for constraint(s) {', '.join(missing)}")
    violations = []
    seen: set[int] = set()
    stack = [graph.root]
    while stack:
        node_id = stack.pop()
        if node_id in seen:
            continue
        seen.add(node_id)
        node = graph.nodes[node_id]
        for name in model[node.element_type].custom_constraints:
            message = registry[name](node, graph)
            if message is not None:
                violations.append(Violation(node_id, node.element_type, name, message, node.span))
        ids, slots = _values(node)
        nxt = ids + [s.resolved_to for s in slots if s.resolved_to is not None]
        stack.extend(reversed(nxt))
    return ConstraintReport(tuple(violations))

