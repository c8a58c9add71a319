"""Abstract syntax models: language elements, members and their annotations.

A model is a set of :class:`ElementModel` records. Three kinds exist:

* ``composite`` -- a concatenation of members (optionally wrapped in
  literal prefixes/suffixes);
* ``selection`` -- one of several alternative elements;
* ``basic`` -- a token recognised by a regular expression.

Models are assembled with :class:`ModelBuilder` (or loaded from a model
description file, see :mod:`asgcc.modelfile`), frozen into a
:class:`ModelSet` by :func:`build_model`, and checked by
:func:`validate_model` before a grammar is synthesised from them.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Union

import regex

from .errors import DuplicateElementName, ModelError, UnknownType

COMPOSITE = "composite"
SELECTION = "selection"
BASIC = "basic"
KINDS = (COMPOSITE, SELECTION, BASIC)

DEFAULT_FREE_ORDER_BOUND = 5


class Bound(enum.Enum):
    UNBOUNDED = "unbounded"

    def __repr__(self) -> str:
        return "UNBOUNDED"


UNBOUNDED = Bound.UNBOUNDED
Maximum = Union[int, Bound]


@dataclass(frozen=True)
class PatternSpec:
    regex: str
    value_binding: str = "value"


@dataclass(frozen=True)
class DisambiguationSpec:
    associativity: str = "none"  # left | right | none
    composition: str = "eager"  # eager | lazy
    priority: int = 0


DEFAULT_DISAMBIGUATION = DisambiguationSpec()


@dataclass(frozen=True)
class Member:
    name: str
    element_type: str
    optional: bool = False
    minimum: int = 1
    maximum: Maximum = 1
    separators: tuple[str, ...] = ()
    prefixes: tuple[str, ...] = ()
    suffixes: tuple[str, ...] = ()
    is_reference: bool = False
    free_order_group: str | None = None

    @property
    def is_list(self) -> bool:
        return self.maximum is UNBOUNDED or self.maximum > 1

    @property
    def is_plain(self) -> bool:
        """Exactly one occurrence with no member-level delimiters."""
        return (self.minimum, self.maximum) == (1, 1) and not self.prefixes and not self.suffixes


@dataclass(frozen=True)
class ElementModel:
    name: str
    kind: str
    members: tuple[Member, ...] = ()
    alternatives: tuple[str, ...] = ()
    pattern: PatternSpec | None = None
    prefixes: tuple[str, ...] = ()
    suffixes: tuple[str, ...] = ()
    id_members: tuple[str, ...] = ()
    custom_constraints: tuple[str, ...] = ()
    disambiguation: DisambiguationSpec | None = None

    def member(self, name: str) -> Member:
        for m in self.members:
            if m.name == name:
                return m
        raise KeyError(f"{self.name} has no member {name!r}")

    @property
    def spec(self) -> DisambiguationSpec:
        return self.disambiguation or DEFAULT_DISAMBIGUATION


@dataclass(frozen=True)
class ModelSet:
    """An immutable, name-resolved set of element models."""

    start: str
    elements: tuple[ElementModel, ...]
    _index: Mapping[str, int] = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {e.name: i for i, e in enumerate(self.elements)})

    def __getitem__(self, name: str) -> ElementModel:
        return self.elements[self._index[name]]

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def handle(self, name: str) -> int:
        """Stable integer handle of an element (its declaration index)."""
        return self._index[name]

    @property
    def start_element(self) -> ElementModel:
        return self[self.start]


def build_model(definitions: Iterable[ElementModel], start: str) -> ModelSet:
    """Freeze element definitions into a :class:`ModelSet`.

    Raises :class:`DuplicateElementName` and :class:`UnknownType`; structural
    mismatches between an element's kind and its populated fields raise
    :class:`ModelError`.
    """
    elements = tuple(definitions)
    if not elements:
        raise ModelError("a model needs at least one element")
    seen: set[str] = set()
    for e in elements:
        if e.name in seen:
            raise DuplicateElementName(f"element {e.name!r} defined more than once")
        seen.add(e.name)
        _check_shape(e)
    if start not in seen:
        raise UnknownType(f"start element {start!r} is not defined")
    for e in elements:
        for m in e.members:
            if m.element_type not in seen:
                raise UnknownType(f"{e.name}.{m.name}: unknown element type {m.element_type!r}")
        for alt in e.alternatives:
            if alt not in seen:
                raise UnknownType(f"{e.name}: unknown alternative {alt!r}")
    return ModelSet(start=start, elements=elements)


def _check_shape(e: ElementModel) -> None:
    if e.kind not in KINDS:
        raise ModelError(f"{e.name}: unknown element kind {e.kind!r}")
    # Member-less composites are allowed: they act as keywords.
    if e.kind == COMPOSITE and (e.alternatives or e.pattern is not None):
        raise ModelError(f"{e.name}: a composite element only has members")
    if e.kind == SELECTION and (e.members or e.pattern is not None or not e.alternatives):
        raise ModelError(f"{e.name}: a selection element needs alternatives and nothing else")
    if e.kind == BASIC and (e.members or e.alternatives or e.pattern is None):
        raise ModelError(f"{e.name}: a basic element needs a pattern and nothing else")
    names = [m.name for m in e.members]
    if len(names) != len(set(names)):
        raise ModelError(f"{e.name}: duplicate member names")


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Issue:
    code: str
    element: str
    message: str
    member: str | None = None

    def __str__(self) -> str:
        where = self.element if self.member is None else f"{self.element}.{self.member}"
        return f"{self.code}: {where}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[Issue, ...] = ()
    warnings: tuple[Issue, ...] = ()

    @property
    def usable(self) -> bool:
        return not self.errors


def reachable_elements(model: ModelSet) -> list[str]:
    """Element names reachable from the start element, in declaration order.

    A reference member only reaches its target's ID members, since that is
    all the reference syntax contains.
    """
    full: set[str] = set()
    ref_only: set[str] = set()
    stack: list[tuple[str, bool]] = [(model.start, False)]
    while stack:
        name, as_ref = stack.pop()
        if name in full or (as_ref and name in ref_only):
            continue
        (ref_only if as_ref else full).add(name)
        e = model[name]
        members = [e.member(n) for n in e.id_members] if as_ref else list(e.members)
        for m in members:
            stack.append((m.element_type, m.is_reference))
        if not as_ref:
            stack.extend((alt, False) for alt in e.alternatives)
    found = full | ref_only
    return [e.name for e in model if e.name in found]


def free_order_groups(element: ElementModel) -> list[tuple[str | None, list[Member]]]:
    """Split an element's members into runs sharing a free-order group.

    Ungrouped members form singleton runs tagged ``None``.
    """
    runs: list[tuple[str | None, list[Member]]] = []
    for m in element.members:
        tag = m.free_order_group
        if tag is not None and runs and runs[-1][0] == tag:
            runs[-1][1].append(m)
        else:
            runs.append((tag, [m]))
    return runs


_NAME = regex.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def validate_model(model: ModelSet, free_order_bound: int = DEFAULT_FREE_ORDER_BOUND) -> ValidationReport:
    errors: list[Issue] = []
    warnings: list[Issue] = []

    def err(code, e, msg, member=None):
        errors.append(Issue(code, e.name, msg, member))

    for e in model:
        member_names = {m.name for m in e.members}
        # names end up inside grammar symbols such as Owner.member[1..*]
        for name in (e.name, *member_names):
            if not _NAME.fullmatch(name):
                err("BadName", e, f"{name!r} is not an identifier")
        for m in e.members:
            if m.optional and m.minimum != 0:
                err("CardinalityError", e, "an optional member must have minimum 0", m.name)
            if m.minimum < 0:
                err("CardinalityError", e, "negative minimum", m.name)
            if m.maximum is not UNBOUNDED and (m.maximum < 1 or m.minimum > m.maximum):
                err("CardinalityError", e, f"bad bounds {m.minimum}..{m.maximum}", m.name)
            if m.separators and not m.is_list:
                err("SeparatorWithoutRepetition", e, "separators need a repeated member", m.name)
            if m.is_reference and not model[m.element_type].id_members:
                err("ReferenceWithoutId", e, f"{m.element_type} has no @ID members to refer by", m.name)
            if m.free_order_group is not None and m.is_list:
                err("FreeOrderRepetition", e, "free-order members may occur at most once", m.name)
        for name in e.id_members:
            if name not in member_names:
                err("UnknownIdMember", e, f"@ID names unknown member {name!r}", name)
                continue
            m = e.member(name)
            if m.optional or m.minimum == 0:
                err("IdOptionalConflict", e, "an @ID member cannot be optional", name)
            if m.is_reference:
                err("IdReference", e, "an @ID member cannot itself be a reference", name)
        if len(set(e.id_members)) != len(e.id_members):
            err("UnknownIdMember", e, "@ID lists a member twice")
        seen_groups: set[str] = set()
        for tag, run in free_order_groups(e):
            if tag is None:
                continue
            if tag in seen_groups:
                err("FreeOrderNotContiguous", e, f"members of group {tag!r} are not contiguous")
            seen_groups.add(tag)
            if len(run) > free_order_bound:
                err("FreeOrderTooLarge", e, f"group {tag!r} has {len(run)} members (bound {free_order_bound})")
        if e.kind == BASIC:
            _check_pattern(e, err)
        spec = e.spec
        if spec.associativity not in ("left", "right", "none"):
            err("BadDisambiguation", e, f"associativity {spec.associativity!r}")
        if spec.composition not in ("eager", "lazy"):
            err("BadDisambiguation", e, f"composition {spec.composition!r}")
        if not isinstance(spec.priority, int) or isinstance(spec.priority, bool):
            err("BadDisambiguation", e, f"priority {spec.priority!r} is not an integer")
        for lit in (*e.prefixes, *e.suffixes, *(t for m in e.members for t in (*m.prefixes, *m.suffixes, *m.separators))):
            if not lit or lit != lit.strip():
                err("BadDelimiter", e, f"delimiter {lit!r} is empty or contains surrounding whitespace")

    reachable = set(reachable_elements(model))
    for e in model:
        if e.name not in reachable:
            warnings.append(Issue("UnreachableElement", e.name, "not reachable from the start element"))
    return ValidationReport(tuple(errors), tuple(warnings))


def _check_pattern(e: ElementModel, err) -> None:
    if not e.pattern.regex:
        err("PatternError", e, "empty pattern")
        return
    try:
        regex.compile(e.pattern.regex)
    except regex.error as exc:
        err("PatternError", e, f"pattern does not compile: {exc}")
    if not e.pattern.value_binding:
        err("PatternError", e, "empty value binding")


# ---------------------------------------------------------------------------
# builder


def member(
    name: str,
    element_type: str,
    *,
    optional: bool = False,
    minimum: int | None = None,
    maximum: Maximum | None = None,
    separator: str | Iterable[str] = (),
    prefix: str | Iterable[str] = (),
    suffix: str | Iterable[str] = (),
    reference: bool = False,
    free_order: str | None = None,
) -> Member:
    """Convenience constructor mirroring the annotation vocabulary."""
    if minimum is None:
        minimum = 0 if optional else 1
    if maximum is None:
        maximum = max(1, minimum)
    return Member(
        name=name,
        element_type=element_type,
        optional=optional,
        minimum=minimum,
        maximum=maximum,
        separators=_strs(separator),
        prefixes=_strs(prefix),
        suffixes=_strs(suffix),
        is_reference=reference,
        free_order_group=free_order,
    )


def _strs(value: str | Iterable[str]) -> tuple[str, ...]:
    return (value,) if isinstance(value, str) else tuple(value)


def _disamb(associativity, composition, priority) -> DisambiguationSpec | None:
    if associativity is None and composition is None and priority is None:
        return None
    return DisambiguationSpec(associativity or "none", composition or "eager", priority or 0)


class ModelBuilder:
    """Single-threaded builder; call :meth:`build` to obtain a :class:`ModelSet`."""

    def __init__(self, start: str):
        self.start = start
        self._elements: list[ElementModel] = []

    def composite(
        self,
        name: str,
        *members: Member,
        prefix=(),
        suffix=(),
        id=(),
        constraints=(),
        associativity=None,
        composition=None,
        priority=None,
    ) -> "ModelBuilder":
        self._elements.append(
            ElementModel(
                name,
                COMPOSITE,
                members=tuple(members),
                prefixes=_strs(prefix),
                suffixes=_strs(suffix),
                id_members=_strs(id),
                custom_constraints=_strs(constraints),
                disambiguation=_disamb(associativity, composition, priority),
            )
        )
        return self

    def selection(self, name: str, *alternatives: str, prefix=(), suffix=(), priority=None) -> "ModelBuilder":
        self._elements.append(
            ElementModel(
                name,
                SELECTION,
                alternatives=tuple(alternatives),
                prefixes=_strs(prefix),
                suffixes=_strs(suffix),
                disambiguation=_disamb(None, None, priority),
            )
        )
        return self

    def basic(self, name: str, pattern: str, value: str = "value", prefix=(), suffix=(), constraints=(), priority=None) -> "ModelBuilder":
        self._elements.append(
            ElementModel(
                name,
                BASIC,
                pattern=PatternSpec(pattern, value),
                prefixes=_strs(prefix),
                suffixes=_strs(suffix),
                custom_constraints=_strs(constraints),
                disambiguation=_disamb(None, None, priority),
            )
        )
        return self

    def add(self, element: ElementModel) -> "ModelBuilder":
        self._elements.append(element)
        return self

    def build(self) -> ModelSet:
        return build_model(self._elements, self.start)
