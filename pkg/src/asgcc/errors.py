"""Exception hierarchy shared by the pipeline stages.

Every error carries a short stable ``code`` used by the command-line
front end as the diagnostic prefix.
"""

from __future__ import annotations


def line_col(text: str, offset: int) -> tuple[int, int]:
    """1-based line and column of a character offset."""
    offset = max(0, min(offset, len(text)))
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


class AsgError(Exception):
    code = "error"


class ModelError(AsgError):
    code = "model"


class UnknownType(ModelError):
    code = "unknown-type"


class DuplicateElementName(ModelError):
    code = "duplicate-element"


class FreeOrderTooLarge(ModelError):
    code = "free-order-too-large"


class ModelFileError(ModelError):
    code = "model-file"


class SourceError(AsgError):
    """An error tied to an offset in the parsed source text."""

    def __init__(self, message: str, offset: int = 0, text: str | None = None):
        super().__init__(message)
        self.message = message
        self.offset = offset
        self.line, self.column = line_col(text, offset) if text is not None else (1, offset + 1)


class LexError(SourceError):
    code = "lex"


class ParseSyntaxError(SourceError):
    """No complete parse; named to avoid shadowing the builtin."""

    code = "syntax"

    def __init__(self, message: str, offset: int, text: str | None = None, expected: tuple[str, ...] = ()):
        super().__init__(message, offset, text)
        self.expected = expected


class AmbiguityError(SourceError):
    code = "ambiguity"

    def __init__(self, message: str, offset: int, text: str | None = None, alternatives: tuple = ()):
        super().__init__(message, offset, text)
        self.alternatives = alternatives


class UnresolvedReference(SourceError):
    code = "unresolved-reference"

    def __init__(self, message: str, offset: int, text: str | None = None, target: str = "", key: tuple = ()):
        super().__init__(message, offset, text)
        self.target = target
        self.key = key


class ConstraintViolation(AsgError):
    code = "constraint"

    def __init__(self, report):
        self.report = report
        first = report.violations[0]
        super().__init__(f"{len(report.violations)} constraint violation(s); first: {first.message}")


class EvaluationError(AsgError):
    code = "evaluation"


class NextOutsideInvocation(EvaluationError):
    code = "next-outside-invocation"


class NegativeParam(EvaluationError):
    code = "negative-parameter"

