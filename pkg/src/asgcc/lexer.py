"""Scanner producing a token lattice.

Every token symbol is tried at every non-whitespace position and each one
that matches contributes its longest match as an edge, so a keyword and an
identifier covering the same text both survive and the parser picks the
one that fits. Literals ending in a word character only match at a word
boundary (``x`` does not match the start of ``xylophone``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import regex

from .errors import LexError
from .grammar import Grammar

WHITESPACE = " \t\r\n"


def _is_word(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


@dataclass(frozen=True, order=True)
class Edge:
    start: int
    end: int
    symbol: str
    lexeme: str


@dataclass
class TokenLattice:
    input: str
    edges: list[Edge]
    _from: dict[int, list[Edge]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for e in self.edges:
            self._from.setdefault(e.start, []).append(e)

    @property
    def nodes(self) -> range:
        return range(len(self.input) + 1)

    def edges_from(self, pos: int) -> list[Edge]:
        return self._from.get(pos, [])

    def skip(self, pos: int) -> int:
        """First non-whitespace position at or after ``pos``."""
        text = self.input
        while pos < len(text) and text[pos] in WHITESPACE:
            pos += 1
        return pos

    def dump(self) -> str:
        return "".join(f'{e.start}..{e.end} {e.symbol} "{e.lexeme}"\n' for e in self.edges)


class Scanner:
    """Token matchers compiled once per grammar."""

    def __init__(self, grammar: Grammar):
        self.literals: list[tuple[str, str]] = []
        self.patterns: list[tuple[str, regex.Pattern]] = []
        for symbol, tok in grammar.token_symbols.items():
            if isinstance(tok, str):
                self.literals.append((symbol, tok))
            else:
                # POSIX mode gives leftmost-longest matching, i.e. maximal munch
                self.patterns.append((symbol, regex.compile(tok.regex, flags=regex.POSIX)))
        self.order = {s: i for i, s in enumerate(grammar.token_symbols)}

    def scan(self, text: str) -> TokenLattice:
        edges: list[Edge] = []
        covered_to = 0
        n = len(text)
        for pos in range(n):
            if text[pos] in WHITESPACE:
                continue
            here: list[Edge] = []
            for symbol, lit in self.literals:
                if text.startswith(lit, pos):
                    end = pos + len(lit)
                    if _is_word(lit[-1]) and end < n and _is_word(text[end]):
                        continue
                    here.append(Edge(pos, end, symbol, lit))
            for symbol, pat in self.patterns:
                m = pat.match(text, pos)
                if m and m.end() > pos:
                    here.append(Edge(pos, m.end(), symbol, m.group()))
            if not here and covered_to <= pos:
                raise LexError(f"no token matches at {text[pos:pos + 10]!r}", pos, text)
            for e in here:
                covered_to = max(covered_to, e.end)
            here.sort(key=lambda e: (e.end, self.order[e.symbol]))
            edges += here
        return TokenLattice(text, edges)


def scan(text: str, grammar: Grammar) -> TokenLattice:
    return Scanner(grammar).scan(text)


def edge_count_bound(text: str, grammar: Grammar) -> int:
    return (len(text) + 1) * len(grammar.token_symbols)

