"""Context-free grammar synthesis from a validated model.

Symbol naming:

* ``Element`` -- the full syntax of an element;
* ``Ref(Element)`` -- the reference syntax (the element's ID members);
* ``"lit"`` -- a literal token (JSON-quoted);
* ``<Element>`` -- the pattern token of a basic element;
* ``Element.member`` / ``Element.member[a..b]`` -- auxiliary repetition
  nonterminals, ``Element.{group}`` -- a free-order group.

Every production records, per right-hand-side position, the *role* that
symbol plays (a member name, ``item``, ``alt``, ``value``, ``*`` for a
spliced auxiliary, or ``None`` for delimiters). The instantiator relies on
these roles to map a parse tree back onto model objects.
"""

from __future__ import annotations

import itertools
import json
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Union

from .errors import FreeOrderTooLarge
from .model import (
    BASIC,
    COMPOSITE,
    DEFAULT_FREE_ORDER_BOUND,
    SELECTION,
    UNBOUNDED,
    DisambiguationSpec,
    ElementModel,
    Member,
    ModelSet,
    PatternSpec,
    free_order_groups,
)

COMPOSITE_ORIGIN = "composite"
SELECTION_ALT = "selection-alt"
REPETITION = "repetition"
FREE_ORDER_PERM = "free-order-perm"
REFERENCE = "reference"
TOKEN_WRAP = "token-wrap"

SPLICE = "*"

TokenDef = Union[str, PatternSpec]


@dataclass(frozen=True)
class Production:
    lhs: str
    rhs: tuple[str, ...]
    origin: str
    owner: str
    disambiguation: DisambiguationSpec
    roles: tuple[str | None, ...] = ()
    member: str | None = None

    def __str__(self) -> str:
        body = " ".join(self.rhs) if self.rhs else "ε"
        return f"{self.lhs} ::= {body} # origin={self.origin}, owner={self.owner}"


@dataclass(frozen=True)
class Grammar:
    start_symbol: str
    productions: tuple[Production, ...]
    token_symbols: Mapping[str, TokenDef] = field(hash=False)

    def is_token(self, symbol: str) -> bool:
        return symbol in self.token_symbols

    def productions_for(self, lhs: str) -> list[Production]:
        return [p for p in self.productions if p.lhs == lhs]

    @property
    def nonterminals(self) -> list[str]:
        return list(dict.fromkeys(p.lhs for p in self.productions))

    def dump(self) -> str:
        return "".join(f"{p}\n" for p in self.productions)

    def check(self) -> None:
        """Assert the structural invariants; raises ``ValueError``."""
        lhs = set(self.nonterminals)
        for p in self.productions:
            for s in p.rhs:
                if s not in lhs and s not in self.token_symbols:
                    raise ValueError(f"symbol {s} in {p} is neither a token nor defined")
            if len(p.roles) != len(p.rhs):
                raise ValueError(f"role arity mismatch in {p}")
        if self.start_symbol not in lhs:
            raise ValueError(f"start symbol {self.start_symbol} has no production")

    def reachable_symbols(self) -> list[str]:
        by_lhs: dict[str, list[Production]] = {}
        for p in self.productions:
            by_lhs.setdefault(p.lhs, []).append(p)
        seen = {self.start_symbol: None}
        stack = [self.start_symbol]
        while stack:
            for p in by_lhs.get(stack.pop(), ()):
                for s in p.rhs:
                    if s not in seen:
                        seen[s] = None
                        stack.append(s)
        return list(seen)


def literal_symbol(text: str) -> str:
    return json.dumps(text)


def pattern_symbol(element: str) -> str:
    return f"<{element}>"


def ref_symbol(element: str) -> str:
    return f"Ref({element})"


def _bound(b) -> str:
    return "*" if b is UNBOUNDED else str(b)


class _Synth:
    def __init__(self, model: ModelSet, free_order_bound: int):
        self.model = model
        self.bound = free_order_bound
        self.productions: dict[tuple, Production] = {}
        self.tokens: dict[str, TokenDef] = {}

    def add(self, p: Production) -> None:
        self.productions.setdefault((p.lhs, p.rhs, p.origin, p.roles), p)

    def literal(self, text: str) -> str:
        sym = literal_symbol(text)
        self.tokens.setdefault(sym, text)
        return sym

    def literals(self, texts) -> list[str]:
        return [self.literal(t) for t in texts]

    def item_symbol(self, m: Member) -> str:
        return ref_symbol(m.element_type) if m.is_reference else m.element_type

    def member_syntax(self, owner: ElementModel, m: Member, aux: list[Production]) -> tuple[list[str], list[str | None]]:
        """Right-hand-side fragment for one member; auxiliaries go to ``aux``."""
        item = self.item_symbol(m)
        if m.is_plain:
            return [item], [m.name]
        if (m.minimum, m.maximum) == (1, 1):
            pre, suf = self.literals(m.prefixes), self.literals(m.suffixes)
            return [*pre, item, *suf], [None] * len(pre) + [m.name] + [None] * len(suf)
        prods = expand_multiplicity(m, owner, self)
        aux += prods
        return [prods[0].lhs], [m.name]

    def element(self, e: ElementModel) -> None:
        spec = e.spec
        pre, suf = self.literals(e.prefixes), self.literals(e.suffixes)
        lead, tail = [None] * len(pre), [None] * len(suf)
        if e.kind == BASIC:
            tok = pattern_symbol(e.name)
            self.tokens[tok] = e.pattern
            self.add(Production(e.name, (*pre, tok, *suf), TOKEN_WRAP, e.name, spec, (*lead, "value", *tail)))
        elif e.kind == SELECTION:
            for alt in e.alternatives:
                self.add(Production(e.name, (*pre, alt, *suf), SELECTION_ALT, e.name, spec, (*lead, "alt", *tail)))
        elif e.kind == COMPOSITE:
            rhs, roles = list(pre), list(lead)
            aux: list[Production] = []
            for tag, run in free_order_groups(e):
                if tag is None or len(run) == 1:
                    for m in run:
                        syms, rls = self.member_syntax(e, m, aux)
                        rhs += syms
                        roles += rls
                else:
                    perms = permute_free_order(run, e, self.bound, self)
                    aux += perms
                    rhs.append(perms[0].lhs)
                    roles.append(SPLICE)
            rhs += suf
            roles += tail
            self.add(Production(e.name, tuple(rhs), COMPOSITE_ORIGIN, e.name, spec, tuple(roles)))
            for p in aux:
                self.add(p)

    def reference(self, e: ElementModel) -> None:
        rhs: list[str] = []
        roles: list[str | None] = []
        aux: list[Production] = []
        for name in e.id_members:
            syms, rls = self.member_syntax(e, e.member(name), aux)
            rhs += syms
            roles += rls
        self.add(Production(ref_symbol(e.name), tuple(rhs), REFERENCE, e.name, e.spec, tuple(roles)))
        for p in aux:
            self.add(p)


def expand_multiplicity(member: Member, owner: ElementModel, synth: _Synth | None = None) -> list[Production]:
    """Auxiliary productions for an optional or repeated member.

    The first production's left-hand side is the symbol used in the owner's
    production. Lists expand right-recursively; separators sit strictly
    between items. Member prefixes/suffixes wrap the whole occurrence.
    """
    synth = synth or _Synth(ModelSet(owner.name, (owner,)), DEFAULT_FREE_ORDER_BOUND)
    spec = owner.spec
    item = synth.item_symbol(member)
    pre, suf = synth.literals(member.prefixes), synth.literals(member.suffixes)
    lead, tail = [None] * len(pre), [None] * len(suf)
    wrapper = f"{owner.name}.{member.name}"
    out: list[Production] = []

    def prod(lhs, rhs, roles):
        out.append(Production(lhs, tuple(rhs), REPETITION, owner.name, spec, tuple(roles), member.name))

    if not member.is_list:
        # optional single occurrence
        prod(wrapper, [], [])
        prod(wrapper, [*pre, item, *suf], [*lead, "item", *tail])
        return out

    def list_symbol(a, b):
        return f"{owner.name}.{member.name}[{a}..{_bound(b)}]"

    top = (max(member.minimum, 1), member.maximum)
    if member.minimum == 0:
        prod(wrapper, [], [])
        prod(wrapper, [*pre, list_symbol(*top), *suf], [*lead, SPLICE, *tail])
    elif pre or suf:
        prod(wrapper, [*pre, list_symbol(*top), *suf], [*lead, SPLICE, *tail])
    seps = synth.literals(member.separators) or [None]
    todo, done = [top], set()
    while todo:
        a, b = todo.pop(0)
        if (a, b) in done:
            continue
        done.add((a, b))
        lhs = list_symbol(a, b)
        if a <= 1:
            prod(lhs, [item], ["item"])
        if b is UNBOUNDED or b > 1:
            nxt = (max(a - 1, 1), b if b is UNBOUNDED else b - 1)
            for sep in seps:
                if sep is None:
                    prod(lhs, [item, list_symbol(*nxt)], ["item", SPLICE])
                else:
                    prod(lhs, [item, sep, list_symbol(*nxt)], ["item", None, SPLICE])
            todo.append(nxt)
    return out


def permute_free_order(
    group: list[Member],
    owner: ElementModel,
    bound: int = DEFAULT_FREE_ORDER_BOUND,
    synth: _Synth | None = None,
) -> list[Production]:
    """One production per ordering of the group's present members.

    Optional members are expanded first (present or absent), then every
    permutation of the present ones becomes a production of the group
    nonterminal ``Owner.{group}``.
    """
    if len(group) > bound:
        raise FreeOrderTooLarge(f"{owner.name}: free-order group of {len(group)} exceeds bound {bound}")
    synth = synth or _Synth(ModelSet(owner.name, (owner,)), bound)
    spec = owner.spec
    lhs = f"{owner.name}.{{{group[0].free_order_group}}}"
    pieces = {}
    for m in group:
        pre, suf = synth.literals(m.prefixes), synth.literals(m.suffixes)
        pieces[m.name] = ([*pre, synth.item_symbol(m), *suf], [None] * len(pre) + [m.name] + [None] * len(suf))
    out = []
    choices = [(True, False) if m.minimum == 0 else (True,) for m in group]
    for present in itertools.product(*choices):
        chosen = [m.name for m, p in zip(group, present) if p]
        for order in itertools.permutations(chosen):
            rhs: list[str] = []
            roles: list[str | None] = []
            for name in order:
                rhs += pieces[name][0]
                roles += pieces[name][1]
            out.append(Production(lhs, tuple(rhs), FREE_ORDER_PERM, owner.name, spec, tuple(roles)))
    return out


def synthesize(model: ModelSet, free_order_bound: int = DEFAULT_FREE_ORDER_BOUND) -> Grammar:
    """Translate a validated model into a grammar (pure, deterministic)."""
    synth = _Synth(model, free_order_bound)
    for e in model:
        synth.element(e)
    for e in model:
        if e.id_members:
            synth.reference(e)
    return Grammar(model.start, tuple(synth.productions.values()), dict(synth.tokens))
