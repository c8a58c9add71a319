"""One object per language: model, grammar, scanner and parser, built once."""

from __future__ import annotations

from dataclasses import dataclass

from .earley import EarleyParser, ParseForest, Tree, disambiguate
from .errors import ConstraintViolation, ModelError
from .grammar import Grammar, synthesize
from .instantiate import (
    ConstraintReport,
    InstanceGraph,
    SymbolTable,
    build_instances,
    check_constraints,
    resolve_references,
)
from .lexer import Scanner, TokenLattice
from .model import DEFAULT_FREE_ORDER_BOUND, ModelSet, ValidationReport, validate_model


@dataclass
class ParseResult:
    lattice: TokenLattice
    forest: ParseForest
    tree: Tree
    table: SymbolTable
    graph: InstanceGraph
    constraints: ConstraintReport

    @property
    def warnings(self):
        return self.graph.warnings


class Language:
    def __init__(self, model: ModelSet, free_order_bound: int = DEFAULT_FREE_ORDER_BOUND):
        self.model = model
        self.report: ValidationReport = validate_model(model, free_order_bound)
        if not self.report.usable:
            raise ModelError("; ".join(str(i) for i in self.report.errors))
        self.grammar: Grammar = synthesize(model, free_order_bound)
        self.scanner = Scanner(self.grammar)
        self.parser = EarleyParser(self.grammar)

    def scan(self, text: str) -> TokenLattice:
        return self.scanner.scan(text)

    def parse(self, text: str, check: bool = True) -> ParseResult:
        """Run every stage; raises the first stage error encountered.

        With ``check`` a failed constraint report raises
        :class:`ConstraintViolation`; otherwise the report is returned as is.
        """
        lattice = self.scan(text)
        forest = self.parser.parse(lattice)
        tree = disambiguate(forest, self.grammar)
        graph, table = build_instances(tree, self.model, text)
        graph = resolve_references(graph, table)
        report = check_constraints(graph, self.model)
        if check and not report.ok:
            raise ConstraintViolation(report)
        return ParseResult(lattice, forest, tree, table, graph, report)
