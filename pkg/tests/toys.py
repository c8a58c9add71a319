"""Small models used across the parser tests."""

from asgcc.model import UNBOUNDED, ModelBuilder, member


def arithmetic():
    """Expr over + and *, left-associative, + binding looser than *."""
    b = ModelBuilder(start="Expr")
    b.selection("Expr", "Add", "Mul", "Num")
    b.composite("Add", member("left", "Expr"), member("right", "Expr", prefix="+"), associativity="left", priority=1)
    b.composite("Mul", member("left", "Expr"), member("right", "Expr", prefix="*"), associativity="left", priority=2)
    b.basic("Num", "[0-9]+")
    return b.build()


def groups():
    """Parenthesised, comma separated, possibly empty nested lists."""
    b = ModelBuilder(start="Group")
    b.composite("Group", member("items", "Group", minimum=0, maximum=UNBOUNDED, separator=","), prefix="(", suffix=")")
    return b.build()


def ambiguous_pairs():
    """No disambiguation at all: ``a a a`` has several readings."""
    b = ModelBuilder(start="S")
    b.selection("S", "Pair", "A")
    b.composite("Pair", member("left", "S"), member("right", "S"))
    b.composite("A", prefix="a")
    return b.build()


def free_order():
    """``p`` followed by optional ``x`` and ``y`` arguments in any order."""
    b = ModelBuilder(start="P")
    b.composite(
        "P",
        member("x", "X", optional=True, free_order="g"),
        member("y", "Y", optional=True, free_order="g"),
        prefix="p",
    )
    b.composite("X", prefix="x")
    b.composite("Y", prefix="y")
    return b.build()


# one lexeme per token symbol, for turning token strings into text
SAMPLE_LEXEME = {"<Num>": "1"}


def messages():
    """Users identified by a number; messages refer to sender and receiver."""
    b = ModelBuilder(start="Mailbox")
    b.composite("Mailbox", member("entries", "Entry", minimum=0, maximum=UNBOUNDED))
    b.selection("Entry", "User", "Message")
    b.composite("User", member("number", "UserNumber"), member("name", "Name"), prefix="user", id="number")
    b.composite(
        "Message",
        member("sender", "User", prefix="from", reference=True),
        member("receiver", "User", prefix="to", reference=True),
        member("text", "Text"),
        prefix="message",
    )
    b.basic("UserNumber", "[0-9]+")
    b.basic("Name", "[a-z]+")
    b.basic("Text", '"[^"]*"')
    return b.build()


def number_only():
    return ModelBuilder(start="Number").basic("Number", "[0-9]+").build()
