import itertools
import math
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
import toys
from asgcc.errors import FreeOrderTooLarge
from asgcc.grammar import (
    FREE_ORDER_PERM,
    REFERENCE,
    REPETITION,
    TOKEN_WRAP,
    expand_multiplicity,
    permute_free_order,
    synthesize,
)
from asgcc.model import UNBOUNDED, ModelBuilder, member, reachable_elements
from asgcc.scene3d.language import build_scene3d_model

ALL_MODELS = [toys.arithmetic, toys.groups, toys.ambiguous_pairs, toys.free_order, toys.messages, build_scene3d_model]


def free_order_count(optional: int, required: int = 0) -> int:
    """Productions for a group: every subset of the optional members, permuted with the required ones."""
    return sum(math.comb(optional, j) * math.factorial(j + required) for j in range(optional + 1))


# Hand enumeration of the scene3d grammar, element by element:
#   composite element  -> 1 production
#   selection          -> 1 per alternative
#   basic              -> 1 token wrap
#   optional member    -> 2 (empty, present)
#   0..* list          -> 4 (wrapper empty, wrapper -> list, list -> item, list -> item list)
#   free-order group   -> see free_order_count
#   @ID                -> 1 reference production
SCENE3D_HAND_COUNT = {
    "Program": 1 + 4,
    "ProgramItem": 2,
    "Definition": 1 + 1,  # includes Ref(Definition)
    "Scene": 1,
    "Statement": 8,
    "ScopedStatement": 1 + 4,
    "CompositeStatement": 1 + 4,
    "RepeatStatement": 1,
    "DrawStatement": 1 + 2,
    "Object": 2,
    "PrimitiveObject": 1,
    "DefinedObject": 1,
    "Parameter": 2,
    "NextParameter": 1,
    "ScaleStatement": 1 + 2 + free_order_count(3),
    "RotateStatement": 1 + free_order_count(3, required=1),
    "TranslateStatement": 1 + free_order_count(3),
    "ColorStatement": 1 + 2 + free_order_count(4),
    "RelativeMode": 1,
    "ObjectName": 1,
    "Number": 1,
}


def test_scene3d_production_count_matches_hand_enumeration():
    g = synthesize(build_scene3d_model())
    assert free_order_count(3) == 16 and free_order_count(4) == 65 and free_order_count(3, 1) == 49
    assert Counter(p.owner for p in g.productions) == Counter(SCENE3D_HAND_COUNT)
    assert len(g.productions) == sum(SCENE3D_HAND_COUNT.values()) == 196


def test_messages_grammar_has_full_and_reference_syntax():
    g = synthesize(toys.messages())
    (user,) = g.productions_for("User")
    assert user.rhs == ('"user"', "UserNumber", "Name")
    (ref,) = g.productions_for("Ref(User)")
    assert ref.rhs == ("UserNumber",) and ref.origin == REFERENCE
    (message,) = g.productions_for("Message")
    assert message.rhs == ('"message"', '"from"', "Ref(User)", '"to"', "Ref(User)", "Text")


def test_single_basic_element_grammar():
    g = synthesize(toys.number_only())
    assert [p.origin for p in g.productions] == [TOKEN_WRAP]
    assert list(g.token_symbols) == ["<Number>"]


def test_optional_member_expansion():
    model = ModelBuilder(start="S").composite("S", member("a", "A", optional=True)).composite("A", prefix="a").build()
    prods = expand_multiplicity(model["S"].member("a"), model["S"])
    assert [p.rhs for p in prods] == [(), ("A",)]


def test_separated_list_expansion():
    model = (
        ModelBuilder(start="S")
        .composite("S", member("a", "A", minimum=1, maximum=UNBOUNDED, separator=","))
        .composite("A", prefix="a")
        .build()
    )
    prods = expand_multiplicity(model["S"].member("a"), model["S"])
    assert [str(p) for p in prods] == [
        "S.a[1..*] ::= A # origin=repetition, owner=S",
        'S.a[1..*] ::= A "," S.a[1..*] # origin=repetition, owner=S',
    ]


def test_statement_lists_of_the_snail(snail):
    g = snail.graph
    sizes = [len(n.fields["statements"]) for n in g.nodes.values() if "statements" in n.fields]
    # definition body, the scoped block, the repeated body, the scene body
    assert sizes == [7, 3, 4, 2]


def test_scale_axes_permutations():
    g = synthesize(build_scene3d_model())
    full = [p for p in g.productions_for("ScaleStatement.{axes}") if len(p.rhs) == 6]
    assert len(full) == 6
    orders = {tuple(s for s in p.rhs if s != "Number") for p in full}
    assert orders == set(itertools.permutations(['"x"', '"y"', '"z"']))


def test_single_member_group_is_inlined():
    with_group = ModelBuilder(start="S").composite("S", member("a", "A", free_order="g")).composite("A", prefix="a")
    without = ModelBuilder(start="S").composite("S", member("a", "A")).composite("A", prefix="a")
    assert synthesize(with_group.build()).productions == synthesize(without.build()).productions


def test_free_order_bound():
    group = [member(n, "A", free_order="g") for n in "abcdef"]
    owner_model = ModelBuilder(start="S").composite("S", *group).composite("A", prefix="a").build()
    with pytest.raises(FreeOrderTooLarge):
        permute_free_order(list(owner_model["S"].members), owner_model["S"])
    assert len(permute_free_order(list(owner_model["S"].members), owner_model["S"], bound=6)) == 720


# -- annotation representability ---------------------------------------------


def _base(**overrides):
    a = dict(name="a", element_type="N")
    a.update(overrides.pop("member", {}))
    b = ModelBuilder(start="S")
    b.composite("S", member(**a), member("b", "N"), **overrides.pop("composite", {}))
    b.composite("T", member("k", "N"), id=overrides.pop("id", ()))
    b.basic("N", overrides.pop("pattern", "[0-9]+"), value=overrides.pop("value", "value"))
    return b.build()


ANNOTATED = {
    "Pattern": dict(pattern="[a-z]+"),
    "Value": dict(value="text"),
    "Prefix": dict(member=dict(prefix="(")),
    "Suffix": dict(member=dict(suffix=")")),
    "Optional": dict(member=dict(optional=True)),
    "Minimum": dict(member=dict(minimum=2)),
    "Maximum": dict(member=dict(maximum=3)),
    "Separator": dict(member=dict(maximum=3, separator=",")),
    "Associativity": dict(composite=dict(associativity="left")),
    "Composition": dict(composite=dict(composition="lazy")),
    "Priority": dict(composite=dict(priority=3)),
    "FreeOrder": dict(member=dict(free_order="g"), composite={}),
    "ID": dict(id="k"),
    "Reference": dict(member=dict(element_type="T", reference=True), id="k"),
}


def _signature(model):
    g = synthesize(model)
    return g.productions, dict(g.token_symbols)


@pytest.mark.parametrize("annotation", sorted(ANNOTATED))
def test_annotation_changes_grammar(annotation):
    from asgcc.model import validate_model

    overrides = dict(ANNOTATED[annotation])
    if annotation == "FreeOrder":
        # both members join the group, otherwise it is a single inlined member
        b = ModelBuilder(start="S")
        b.composite("S", member("a", "N", free_order="g"), member("b", "N", free_order="g"))
        b.composite("T", member("k", "N"))
        b.basic("N", "[0-9]+")
        model = b.build()
    else:
        model = _base(**overrides)
    assert validate_model(model).usable
    assert _signature(model) != _signature(_base())


def test_constraint_changes_only_the_model():
    b = ModelBuilder(start="S")
    b.composite("S", member("a", "N"), member("b", "N"), constraints="c")
    b.composite("T", member("k", "N"))
    b.basic("N", "[0-9]+")
    model = b.build()
    assert model != _base()
    assert _signature(model) == _signature(_base())


# -- structural invariants ---------------------------------------------------


@pytest.mark.parametrize("make", ALL_MODELS)
def test_reference_symmetry(make):
    model = make()
    g = synthesize(model)
    for e in model:
        if e.id_members:
            assert f"Ref({e.name})" in g.nonterminals
    for p in g.productions:
        owner = model[p.owner]
        for sym, role in zip(p.rhs, p.roles):
            names = {m.name: m for m in owner.members}
            m = names.get(role) if role not in ("item",) else names.get(p.member)
            if m is not None and m.is_reference:
                assert sym != m.element_type
                assert sym == f"Ref({m.element_type})" or sym.startswith(f"{owner.name}.")


@pytest.mark.parametrize("make", ALL_MODELS)
def test_symbol_closure(make):
    model = make()
    g = synthesize(model)
    g.check()
    reachable = set(g.reachable_symbols())
    owners = {p.owner for p in g.productions if p.lhs in reachable}
    assert owners == set(reachable_elements(model))


def test_unreachable_elements_do_not_leak_into_reachable_symbols():
    model = ModelBuilder(start="A").composite("A", prefix="a").composite("Orphan", prefix="o").build()
    g = synthesize(model)
    assert "Orphan" in g.nonterminals
    assert "Orphan" not in g.reachable_symbols()


@pytest.mark.parametrize("make", ALL_MODELS)
def test_synthesis_is_deterministic(make):
    assert synthesize(make()).dump() == synthesize(make()).dump()


# -- multiplicity languages, by brute force ----------------------------------


@given(
    minimum=st.integers(0, 3),
    extra=st.one_of(st.integers(0, 3), st.none()),
    separator=st.booleans(),
    wrapped=st.booleans(),
)
def test_multiplicity_language(minimum, extra, separator, wrapped):
    maximum = UNBOUNDED if extra is None else max(1, minimum + extra)
    m = member(
        "a", "A", minimum=minimum, maximum=maximum,
        separator="," if separator and maximum != 1 else (),
        prefix="<" if wrapped else (), suffix=">" if wrapped else (),
    )
    model = ModelBuilder(start="S").composite("S", m).composite("A", prefix="a").build()
    g = synthesize(model)
    (top,) = g.productions_for("S")
    aux = [p for p in g.productions if p.origin == REPETITION]
    prods = [(p.lhs, p.rhs) for p in aux] + [("A", ('"a"',))]
    start = top.rhs[0] if len(top.rhs) == 1 else "S"
    if start == "S":
        prods.append(("S", top.rhs))
    cap = 6
    budget = cap * (2 if separator else 1) + 2
    counts = oracles.derivation_counts(prods, start, g.token_symbols, budget)
    seen = Counter()
    for sentence, n in counts.items():
        k = sentence.count('"a"')
        if k <= cap:
            assert n == 1, sentence  # list syntax is unambiguous
            seen[k] += 1
    upper = cap if maximum is UNBOUNDED else min(maximum, cap)
    assert sorted(seen) == list(range(minimum, upper + 1))
    assert all(v == 1 for v in seen.values())
