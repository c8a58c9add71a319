"""Model-driven parser generator producing abstract syntax graphs."""

from .earley import EarleyParser, ParseForest, Tree, disambiguate, parse
from .grammar import Grammar, Production, expand_multiplicity, permute_free_order, synthesize
from .instantiate import (
    AsgNode,
    InstanceGraph,
    RefSlot,
    SymbolTable,
    build_instances,
    check_constraints,
    constraint,
    resolve_references,
)
from .lexer import Edge, TokenLattice, scan
from .model import (
    UNBOUNDED,
    DisambiguationSpec,
    ElementModel,
    Member,
    ModelBuilder,
    ModelSet,
    PatternSpec,
    build_model,
    member,
    validate_model,
)
from .pipeline import Language, ParseResult

__version__ = "0.1.0"
