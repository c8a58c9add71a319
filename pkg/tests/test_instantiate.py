import json
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

import toys
from asgcc import Language
from asgcc.earley import disambiguate
from asgcc.errors import UnresolvedReference
from asgcc.instantiate import (
    RefSlot,
    UnknownConstraint,
    build_instances,
    check_constraints,
    constraint,
    resolve_references,
)
from asgcc.model import UNBOUNDED, ModelBuilder, member


@pytest.fixture(scope="module")
def mail():
    return Language(toys.messages())


def unresolved(lang, text):
    tree = disambiguate(lang.parser.parse(lang.scan(text)), lang.grammar)
    return build_instances(tree, lang.model, text)


def test_snail_top_level(s3d, snail_text):
    graph, table = unresolved(s3d, snail_text)
    items = graph[graph.root].fields["items"]
    assert [graph[i].element_type for i in items] == ["Definition", "Scene"]
    slots = graph.slots()
    assert RefSlot("Definition", ("snail",), slots[0].span) in slots
    assert all(s.resolved_to is None for s in slots)
    assert table.lookup("Definition", ("snail",)) == items[0]


def test_duplicate_definitions(s3d, snail_text):
    text = snail_text + "\ndefine snail [ draw cube ]\n"
    graph, table = unresolved(s3d, text)
    assert len(table.duplicates) == 1
    resolved = resolve_references(graph, table)
    (warning,) = resolved.warnings
    assert warning.code == "duplicate-id"
    first = graph.of_type("Definition")[0].node_id
    assert {s.resolved_to for s in resolved.slots()} == {first}  # first definition wins


def test_single_literal_model():
    lang = Language(toys.number_only())
    result = lang.parse("42")
    assert len(result.graph.nodes) == 1
    assert result.graph[0].fields == {"value": "42"}
    assert result.table.entries == {}


def test_unresolved_reference(s3d):
    with pytest.raises(UnresolvedReference) as exc:
        s3d.parse("scene [ draw ghost 1 ]")
    assert exc.value.key == ("ghost",)
    assert exc.value.target == "Definition"
    assert exc.value.column == 14


MAIL = 'user 1 ann user 2 bob message from 1 to 2 "hi" message from 2 to 1 "yo" message from 1 to 1 "me"'


def test_messages_resolve_to_users(mail):
    g = mail.parse(MAIL).graph
    users = {g[u.fields["number"]].fields["value"]: u.node_id for u in g.of_type("User")}
    for m in g.of_type("Message"):
        for field in ("sender", "receiver"):
            slot = m.fields[field]
            assert slot.resolved_to == users[slot.key[0]]


def test_messages_cataphora(mail):
    g = mail.parse('message from 1 to 2 "early" user 1 ann user 2 bob').graph
    assert {g[s.resolved_to].element_type for s in g.slots()} == {"User"}


def test_keys_compare_as_text(mail):
    with pytest.raises(UnresolvedReference):
        mail.parse('user 007 ann message from 7 to 007 "x"')


def test_multi_member_id():
    b = ModelBuilder(start="Book")
    b.composite("Book", member("people", "Entry", minimum=0, maximum=UNBOUNDED))
    b.selection("Entry", "Person", "Mention")
    b.composite("Person", member("first", "Name"), member("last", "Name"), prefix="person", id=("first", "last"))
    b.composite("Mention", member("who", "Person", reference=True), prefix="see")
    b.basic("Name", "[a-z]+")
    g = Language(b.build()).parse("see ada byron person ada byron person ada king").graph
    (slot,) = g.slots()
    assert slot.key == ("ada", "byron")
    assert slot.resolved_to == g.of_type("Person")[0].node_id


# -- properties ---------------------------------------------------------------


def id_key(graph, model, node):
    parts = []
    for name in model[node.element_type].id_members:
        child = graph[node.fields[name]]
        parts.append(child.fields[model[child.element_type].pattern.value_binding])
    return tuple(parts)


def assert_referential_integrity(graph, model):
    for slot in graph.slots():
        target = graph[slot.resolved_to]
        assert target.element_type == slot.target_type
        assert id_key(graph, model, target) == slot.key


names = st.sampled_from(["a", "b", "c", "snail", "x1"])


@st.composite
def programs(draw):
    """Definitions that draw each other (possibly themselves) plus one scene."""
    defined = draw(st.lists(names, min_size=1, max_size=4, unique=True))
    blocks = []
    for name in defined:
        calls = draw(st.lists(st.sampled_from(defined), max_size=3))
        body = " ".join(f"draw {c} next" for c in calls)
        blocks.append(f"define {name} [ draw cube {body} ]")
    scene_calls = draw(st.lists(st.sampled_from(defined), min_size=1, max_size=3))
    blocks.append("scene [ " + " ".join(f"draw {c} 2" for c in scene_calls) + " ]")
    return draw(st.permutations(blocks))


@given(programs())
def test_referential_integrity_and_identity(s3d, blocks):
    g = s3d.parse("\n".join(blocks)).graph
    assert_referential_integrity(g, s3d.model)
    by_key = {}
    for slot in g.slots():
        assert by_key.setdefault(slot.key, slot.resolved_to) == slot.resolved_to


def resolution_summary(graph):
    def name_of(node_id):
        return graph[graph[node_id].fields["name"]].fields["name"]

    owner = {}
    for d in graph.of_type("Definition"):
        for n in graph.nodes.values():
            if n.element_type == "DefinedObject" and d.span[0] <= n.span[0] < d.span[1]:
                owner[n.node_id] = name_of(d.node_id)
    return Counter(
        (owner.get(n.node_id, "<scene>"), name_of(n.fields["ref"].resolved_to))
        for n in graph.of_type("DefinedObject")
    )


@given(programs(), st.randoms(use_true_random=False))
def test_order_independence(s3d, blocks, rnd):
    shuffled = list(blocks)
    rnd.shuffle(shuffled)
    a = s3d.parse("\n".join(blocks)).graph
    b = s3d.parse("\n".join(shuffled)).graph
    assert resolution_summary(a) == resolution_summary(b)
    assert Counter(n.element_type for n in a.nodes.values()) == Counter(n.element_type for n in b.nodes.values())


exprs = st.lists(st.tuples(st.sampled_from("+*"), st.integers(0, 99)), max_size=6).flatmap(
    lambda rest: st.integers(0, 99).map(lambda first: str(first) + "".join(f"{op}{n}" for op, n in rest))
)


@given(exprs)
def test_tree_fallback_without_references(text):
    g = Language(toys.arithmetic()).parse(text).graph
    edges = g.edges()
    assert all(kind == "child" for *_, kind in edges)
    assert len(edges) == len(g.nodes) - 1
    targets = Counter(dst for _, dst, _, _ in edges)
    assert g.root not in targets and all(v == 1 for v in targets.values())


@given(programs())
def test_constraint_check_terminates_on_cycles(s3d, blocks):
    g = s3d.parse("\n".join(blocks)).graph
    visits = Counter()

    def count(node, graph):
        visits[node.node_id] += 1
        return None

    registry = {name: count for e in s3d.model for name in e.custom_constraints}
    report = check_constraints(g, s3d.model, registry)
    assert report.ok
    hooks = {e.name: len(e.custom_constraints) for e in s3d.model}
    expected = {n.node_id: hooks[n.element_type] for n in g.nodes.values() if hooks[n.element_type]}
    assert dict(visits) == expected


# -- constraints --------------------------------------------------------------


def test_repeat_count_violation(s3d):
    report = s3d.parse("scene [ repeat 2.5 times [ draw cube ] ]", check=False).constraints
    (v,) = report.violations
    assert v.constraint == "scene3d.integer_count"
    assert "repeat count must be an integer" in v.message


def test_integer_parameter_passes(s3d, snail):
    assert snail.constraints.ok
    assert s3d.parse("define snail [ draw cube ] scene [ draw snail 400 ]").constraints.ok


def test_no_constrained_elements_gives_empty_report():
    result = Language(toys.arithmetic()).parse("1+2")
    assert result.constraints.violations == ()


@pytest.mark.parametrize(
    "source, hook",
    [
        ("scene [ scale ]", "scene3d.scale_arguments"),
        ("scene [ scale 2 x 1 ]", "scene3d.scale_arguments"),
        ("scene [ rotate angle 5 ]", "scene3d.rotation_axis"),
        ("scene [ rotate x 0 angle 5 ]", "scene3d.rotation_axis"),
        ("scene [ translate ]", "scene3d.translate_axes"),
        ("scene [ color relative ]", "scene3d.color_channels"),
        ("scene [ repeat -1 times [ ] ]", "scene3d.integer_count"),
    ],
)
def test_scene3d_hooks(s3d, source, hook):
    (v,) = s3d.parse(source, check=False).constraints.violations
    assert v.constraint == hook


def test_unknown_hook():
    b = ModelBuilder(start="N").basic("N", "[0-9]+", constraints="nobody.registered.this")
    lang = Language(b.build())
    with pytest.raises(UnknownConstraint):
        lang.parse("1")


def test_decorator_registration():
    @constraint("tests.even")
    def even(node, graph):
        return None if int(node.fields["value"]) % 2 == 0 else "odd"

    lang = Language(ModelBuilder(start="N").basic("N", "[0-9]+", constraints="tests.even").build())
    assert lang.parse("4").constraints.ok
    assert lang.parse("5", check=False).constraints.violations[0].message == "odd"


# -- serialisation ------------------------------------------------------------


def test_json_uses_node_ids_for_references(snail):
    doc = json.loads(snail.graph.to_json())
    (definition,) = [n for n in doc["nodes"] if n["type"] == "Definition"]
    refs = [n["fields"]["ref"] for n in doc["nodes"] if n["type"] == "DefinedObject"]
    assert refs and all(r == {"ref": definition["id"]} for r in refs)
    assert [n["id"] for n in doc["nodes"]] == sorted(n["id"] for n in doc["nodes"])


def test_dot_marks_reference_edges(snail):
    dot = snail.graph.to_dot()
    assert dot.startswith("digraph asg {")
    assert dot.count("style=dashed") == len(snail.graph.slots())
