"""Earley parsing over a token lattice, packed forests and disambiguation.

The recogniser is a plain Earley chart (with the Aycock-Horspool treatment
of nullable symbols) whose scanner step follows lattice edges instead of a
token stream. Chart positions are character offsets; after a token the
parser resumes at the next non-whitespace offset.

The forest is extracted from the finished chart: a packed node
``(symbol, start, end)`` lists every derivation, each a sequence of child
nodes and lattice edges tiling the span.
"""

from __future__ import annotations

import contextlib
import heapq
import sys
from dataclasses import dataclass
from typing import Union

from .errors import AmbiguityError, ParseSyntaxError
from .grammar import COMPOSITE_ORIGIN, SELECTION_ALT, Grammar, Production
from .lexer import Edge, TokenLattice
from .model import DEFAULT_DISAMBIGUATION

NodeKey = tuple[str, int, int]
Child = Union[Edge, NodeKey]


@contextlib.contextmanager
def deep_recursion(limit: int = 20000):
    """Forests of long right-recursive lists nest deeply."""
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, limit))
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


@dataclass(frozen=True)
class Derivation:
    production: Production
    children: tuple[Child, ...]


@dataclass
class PackedNode:
    symbol: str
    start: int
    end: int
    derivations: list[Derivation]


@dataclass
class ParseForest:
    grammar: Grammar
    lattice: TokenLattice
    root: NodeKey
    nodes: dict[NodeKey, PackedNode]

    @property
    def roots(self) -> list[PackedNode]:
        return [self.nodes[self.root]]

    def count_trees(self) -> int:
        """Number of distinct parse trees; ``ValueError`` if infinite."""
        memo: dict[NodeKey, int] = {}
        active: set[NodeKey] = set()

        def count(key: NodeKey) -> int:
            if key in memo:
                return memo[key]
            if key in active:
                raise ValueError(f"cyclic derivation through {key}")
            active.add(key)
            total = 0
            for d in self.nodes[key].derivations:
                n = 1
                for c in d.children:
                    if not isinstance(c, Edge):
                        n *= count(c)
                total += n
            active.discard(key)
            memo[key] = total
            return total

        with deep_recursion():
            return count(self.root)

    def dump(self) -> str:
        lines = []
        for key in sorted(self.nodes, key=lambda k: (k[1], k[2], k[0])):
            node = self.nodes[key]
            lines.append(f"{node.symbol}[{node.start}:{node.end}] ({len(node.derivations)})")
            for i, d in enumerate(node.derivations):
                kids = " ".join(
                    f'"{c.lexeme}"@{c.start}' if isinstance(c, Edge) else f"{c[0]}[{c[1]}:{c[2]}]" for c in d.children
                )
                lines.append(f"  #{i} {d.production.lhs} ::= {kids or 'ε'}  [{d.production.origin}]")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Tree:
    symbol: str
    production: Production
    children: tuple[Union["Tree", Edge], ...]
    start: int
    end: int

    def dump(self, indent: int = 0) -> str:
        pad = "  " * indent
        out = [f"{pad}{self.symbol} [{self.start}:{self.end}] ({self.production.origin})"]
        for c in self.children:
            if isinstance(c, Tree):
                out.append(c.dump(indent + 1).rstrip("\n"))
            else:
                out.append(f'{pad}  {c.symbol} "{c.lexeme}"')
        return "\n".join(out) + "\n"

    def tokens(self) -> list[Edge]:
        out: list[Edge] = []
        stack: list = [self]
        while stack:
            t = stack.pop()
            if isinstance(t, Edge):
                out.append(t)
            else:
                stack.extend(reversed(t.children))
        return out


class EarleyParser:
    def __init__(self, grammar: Grammar):
        self.grammar = grammar
        self.prods = grammar.productions
        self.by_lhs: dict[str, list[int]] = {}
        for i, p in enumerate(self.prods):
            self.by_lhs.setdefault(p.lhs, []).append(i)
        self.nullable = self._nullable()
        self.token_order = {s: i for i, s in enumerate(grammar.token_symbols)}

    def _nullable(self) -> set[str]:
        nullable: set[str] = set()
        changed = True
        while changed:
            changed = False
            for p in self.prods:
                if p.lhs not in nullable and all(s in nullable for s in p.rhs):
                    nullable.add(p.lhs)
                    changed = True
        return nullable

    def parse(self, lattice: TokenLattice, start: str | None = None) -> ParseForest:
        start_symbol = start or self.grammar.start_symbol
        if start_symbol not in self.by_lhs:
            raise ValueError(f"{start_symbol!r} is not a nonterminal of the grammar")
        chart = self._recognize(lattice, start_symbol)
        final = len(lattice.input)
        origin = lattice.skip(0)
        accepted = any(
            self.prods[p].lhs == start_symbol and d == len(self.prods[p].rhs) and o == origin
            for p, d, o in chart.sets.get(final, ())
        )
        if not accepted:
            raise self._syntax_error(lattice, chart)
        with deep_recursion():
            return self._forest(lattice, chart, (start_symbol, origin, final))

    # -- recognition -------------------------------------------------------

    def _recognize(self, lattice: TokenLattice, start_symbol: str) -> "_Chart":
        chart = _Chart()
        tokens: dict[int, dict[str, list[Edge]]] = {}
        for e in lattice.edges:
            tokens.setdefault(e.start, {}).setdefault(e.symbol, []).append(e)
        chart.tokens = tokens
        prods, by_lhs, nullable = self.prods, self.by_lhs, self.nullable
        origin = lattice.skip(0)
        heap = [origin]
        scheduled = {origin}
        for p in by_lhs.get(start_symbol, ()):
            chart.add(origin, (p, 0, origin))
        while heap:
            pos = heapq.heappop(heap)
            items = chart.sets[pos]
            waiting = chart.waiting.setdefault(pos, {})
            completed = chart.completed.setdefault(pos, {})
            predicted: set[str] = set()
            here = tokens.get(pos, {})
            i = 0
            while i < len(items):
                p, d, o = items[i]
                i += 1
                rhs = prods[p].rhs
                if d < len(rhs):
                    x = rhs[d]
                    if x in by_lhs:
                        waiting.setdefault(x, []).append((p, d, o))
                        if x not in predicted:
                            predicted.add(x)
                            for q in by_lhs[x]:
                                chart.add(pos, (q, 0, pos))
                        if x in nullable:
                            chart.add(pos, (p, d + 1, o))
                    else:
                        for e in here.get(x, ()):
                            nxt = lattice.skip(e.end)
                            chart.add(nxt, (p, d + 1, o))
                            if nxt not in scheduled:
                                scheduled.add(nxt)
                                heapq.heappush(heap, nxt)
                else:
                    lhs = prods[p].lhs
                    completed.setdefault(lhs, {})[o] = None
                    if o == pos:
                        # waiting items here were advanced by the nullable rule
                        continue
                    for p2, d2, o2 in chart.waiting[o].get(lhs, ()):
                        chart.add(pos, (p2, d2 + 1, o2))
        return chart

    def _syntax_error(self, lattice: TokenLattice, chart: "_Chart") -> ParseSyntaxError:
        text = lattice.input
        furthest = max(chart.sets) if chart.sets else 0
        expected_tokens: dict[str, None] = {}
        expected_nts: dict[str, None] = {}
        for p, d, _ in chart.sets.get(furthest, ()):
            rhs = self.prods[p].rhs
            if d < len(rhs):
                if rhs[d] in self.by_lhs:
                    if d > 0:
                        expected_nts[rhs[d]] = None
                else:
                    expected_tokens[rhs[d]] = None
        toks = sorted(expected_tokens, key=lambda s: self.token_order.get(s, 0))
        if furthest >= len(text):
            found = "end of input"
        else:
            word = text[furthest:].split(None, 1)[0][:20]
            found = repr(word)
        what = ", ".join(expected_nts)
        msg = f"unexpected {found}"
        if what:
            msg += f"; expected {what}"
        if toks:
            msg += f" ({'one of ' if len(toks) > 1 else ''}{', '.join(toks)})"
        elif not what:
            msg += "; expected end of input"
        return ParseSyntaxError(msg, furthest, text, expected=tuple(toks) + tuple(expected_nts))

    # -- forest extraction --------------------------------------------------

    def _forest(self, lattice: TokenLattice, chart: "_Chart", root: NodeKey) -> ParseForest:
        ending: dict[int, dict[str, list[Edge]]] = {}
        for e in lattice.edges:
            ending.setdefault(lattice.skip(e.end), {}).setdefault(e.symbol, []).append(e)
        prods, by_lhs, sets = self.prods, self.by_lhs, chart.seen
        memo: dict[tuple, list[tuple[Child, ...]]] = {}

        def splits(p: int, d: int, i: int, j: int) -> list[tuple[Child, ...]]:
            key = (p, d, i, j)
            if key in memo:
                return memo[key]
            if d == 0:
                out = [()] if i == j else []
            else:
                out = []
                x = prods[p].rhs[d - 1]
                prev = (p, d - 1, i)
                if x in by_lhs:
                    for k in chart.completed.get(j, {}).get(x, ()):
                        if k >= i and prev in sets.get(k, ()):
                            out += [pre + ((x, k, j),) for pre in splits(p, d - 1, i, k)]
                else:
                    for e in ending.get(j, {}).get(x, ()):
                        if e.start >= i and prev in sets.get(e.start, ()):
                            out += [pre + (e,) for pre in splits(p, d - 1, i, e.start)]
            memo[key] = out
            return out

        nodes: dict[NodeKey, PackedNode] = {}
        todo = [root]
        while todo:
            key = todo.pop()
            if key in nodes:
                continue
            sym, i, j = key
            derivs = []
            for p in by_lhs.get(sym, ()):
                n = len(prods[p].rhs)
                if (p, n, i) in sets.get(j, ()):
                    for seq in sorted(splits(p, n, i, j), key=_split_key):
                        derivs.append(Derivation(prods[p], seq))
            nodes[key] = PackedNode(sym, i, j, derivs)
            for d in derivs:
                todo.extend(c for c in d.children if not isinstance(c, Edge))
        return ParseForest(self.grammar, lattice, root, nodes)


def _split_key(seq: tuple[Child, ...]) -> tuple:
    return tuple((c.start, c.end, c.symbol) if isinstance(c, Edge) else (c[1], c[2], c[0]) for c in seq)


class _Chart:
    def __init__(self):
        self.sets: dict[int, list[tuple[int, int, int]]] = {}
        self.seen: dict[int, set[tuple[int, int, int]]] = {}
        self.waiting: dict[int, dict[str, list[tuple[int, int, int]]]] = {}
        self.completed: dict[int, dict[str, dict[int, None]]] = {}
        self.tokens: dict[int, dict[str, list[Edge]]] = {}

    def add(self, pos: int, item: tuple[int, int, int]) -> None:
        seen = self.seen.setdefault(pos, set())
        if item not in seen:
            seen.add(item)
            self.sets.setdefault(pos, []).append(item)


def parse(grammar: Grammar, lattice: TokenLattice, start: str | None = None) -> ParseForest:
    return EarleyParser(grammar).parse(lattice, start)


# ---------------------------------------------------------------------------
# disambiguation


@dataclass(frozen=True)
class Ambiguous:
    """Placeholder for a node whose readings could not be narrowed to one.

    It only becomes an error if it survives into the final tree; a parent's
    filters may still discard the derivation containing it.
    """

    symbol: str
    start: int
    end: int
    candidates: tuple[Tree, ...]


def head(tree):
    """Follow selection alternatives down to the concrete element's tree."""
    while isinstance(tree, Tree) and tree.production.origin == SELECTION_ALT:
        tree = next(c for c, r in zip(tree.children, tree.production.roles) if r == "alt")
    return tree


def _head_owner(node) -> str | None:
    if isinstance(node, Ambiguous):
        owners = {_head_owner(c) for c in node.candidates}
        return owners.pop() if len(owners) == 1 else None
    if not isinstance(node, Tree):
        return None
    h = head(node)
    if isinstance(h, Ambiguous):
        return _head_owner(h)
    return h.production.owner if h.production.origin in (COMPOSITE_ORIGIN, "token-wrap", "reference") else None


def _rank(tree) -> int:
    h = head(tree)
    if isinstance(h, Ambiguous):
        # survivors of a node's own filtering share the lowest rank
        return _rank(h.candidates[0])
    if h.production.origin == SELECTION_ALT:
        return DEFAULT_DISAMBIGUATION.priority
    return h.production.disambiguation.priority


def _member_children(tree: Tree) -> list:
    return [c for c, r in zip(tree.children, tree.production.roles) if r is not None]


def _violates_associativity(tree: Tree) -> bool:
    h = head(tree)
    if isinstance(h, Ambiguous) or h.production.origin != COMPOSITE_ORIGIN:
        return False
    assoc = h.production.disambiguation.associativity
    kids = _member_children(h)
    if assoc == "none" or not kids:
        return False
    edge = kids[-1] if assoc == "left" else kids[0]
    return _head_owner(edge) == h.production.owner


def _nested_span(tree: Tree) -> int:
    h = head(tree)
    spans = [c.end - c.start for c in _member_children(h) if _head_owner(c) == h.production.owner]
    return max(spans, default=-1)


def _keep(cands: list[Tree], pred) -> list[Tree]:
    kept = [c for c in cands if pred(c)]
    return kept or cands


def filter_candidates(cands: list[Tree]) -> list[Tree]:
    """Apply priority, associativity and composition filters in that order.

    A filter that would discard every candidate leaves the set unchanged.
    """
    if len(cands) > 1:
        low = min(_rank(c) for c in cands)
        cands = _keep(cands, lambda c: _rank(c) == low)
    if len(cands) > 1:
        cands = _keep(cands, lambda c: not _violates_associativity(c))
    if len(cands) > 1:
        owners = {_head_owner(c) for c in cands}
        if len(owners) == 1 and None not in owners:
            h = head(cands[0])
            if isinstance(h, Tree) and h.production.origin == COMPOSITE_ORIGIN:
                measure = [_nested_span(c) for c in cands]
                best = max(measure) if h.production.disambiguation.composition == "eager" else min(measure)
                cands = [c for c, m in zip(cands, measure) if m == best]
    return cands


def disambiguate(forest: ParseForest, grammar: Grammar | None = None) -> Tree:
    """Reduce a forest to its single surviving tree or raise ``AmbiguityError``."""
    text = forest.lattice.input
    memo: dict[NodeKey, Tree | Ambiguous] = {}
    active: set[NodeKey] = set()

    def build(d: Derivation, key: NodeKey) -> Tree:
        kids = tuple(c if isinstance(c, Edge) else resolve(c) for c in d.children)
        spans = [(c.start, c.end) for c in kids if c.end > c.start]
        if spans:
            start, end = spans[0][0], spans[-1][1]
        else:
            start = end = key[1]
        return Tree(key[0], d.production, kids, start, end)

    def resolve(key: NodeKey):
        if key in memo:
            return memo[key]
        if key in active:
            raise AmbiguityError(f"infinitely ambiguous {key[0]} (cyclic derivation)", key[1], text)
        active.add(key)
        node = forest.nodes[key]
        cands = [build(d, key) for d in node.derivations]
        if len(cands) > 1:
            cands = filter_candidates(cands)
        active.discard(key)
        result = cands[0] if len(cands) == 1 else Ambiguous(key[0], cands[0].start, cands[0].end, tuple(cands))
        memo[key] = result
        return result

    with deep_recursion():
        tree = resolve(forest.root)
    stuck = _first_ambiguity(tree)
    if stuck is not None:
        alts = tuple((str(c.production), (c.start, c.end), c.production.owner) for c in stuck.candidates)
        readings = "; ".join(f"{str(c.production).split(' #')[0]} (children {_child_spans(c)})" for c in stuck.candidates)
        raise AmbiguityError(
            f"{len(alts)} readings of {stuck.symbol} remain after disambiguation: {readings}",
            stuck.start,
            text,
            alternatives=alts,
        )
    return tree


def _child_spans(tree: Tree) -> str:
    return ", ".join(f"{c.start}..{c.end}" for c in tree.children)


def _first_ambiguity(tree) -> Ambiguous | None:
    stack = [tree]
    while stack:
        t = stack.pop()
        if isinstance(t, Ambiguous):
            return t
        if isinstance(t, Tree):
            stack.extend(reversed(t.children))
    return None


def parse_tree(grammar: Grammar, lattice: TokenLattice, start: str | None = None) -> Tree:
    return disambiguate(parse(grammar, lattice, start), grammar)
