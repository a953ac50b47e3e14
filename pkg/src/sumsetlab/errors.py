"""Exception hierarchy.

Every error carries a short machine-readable ``code`` used by the CLI when
it reports failures, and an ``exit_code`` following the CLI convention
(2 = usage / precondition, 3 = resource limits).
"""

from __future__ import annotations


class SumsetLabError(Exception):
    code = "error"
    exit_code = 2


class SizeCapExceeded(SumsetLabError):
    """A sumset would enumerate more tuples than the configured cap."""

    code = "size_cap_exceeded"
    exit_code = 3

    def __init__(self, predicted: int, cap: int):
        self.predicted = predicted
        self.cap = cap
        super().__init__(f"predicted {predicted} tuples exceeds size cap {cap}")


class ModeMismatch(SumsetLabError):
    code = "mode_mismatch"


class TooSmall(SumsetLabError, ValueError):
    code = "too_small"


class BadInterval(SumsetLabError, ValueError):
    code = "bad_interval"


class InvalidSpec(SumsetLabError, ValueError):
    code = "invalid_spec"


class ExprSyntaxError(SumsetLabError, ValueError):
    """Malformed function expression; ``offset`` is the 1-based column."""

    code = "syntax_error"

    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")


class UnknownFunction(SumsetLabError, ValueError):
    code = "unknown_function"

    def __init__(self, name: str, offset: int):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown function {name!r} at offset {offset}")


class DomainError(SumsetLabError, ArithmeticError):
    """Evaluation left the domain of a partial node (log, division, ...)."""

    code = "domain_error"

    def __init__(self, node: str, argument, message: str = ""):
        self.node = node
        self.argument = argument
        detail = message or "argument outside domain"
        super().__init__(f"{node}: {detail} (argument={argument})")


class TooManyPieces(SumsetLabError):
    code = "too_many_pieces"


class DegreeTooLow(SumsetLabError, ValueError):
    code = "degree_too_low"


class EmptyDomain(SumsetLabError, ValueError):
    code = "empty_domain"


class NotConvex(SumsetLabError, ValueError):
    code = "not_convex"


class PreconditionViolated(SumsetLabError, ValueError):
    code = "precondition_violated"


class InjectivityViolation(SumsetLabError):
    code = "injectivity_violation"


class TooFewElements(SumsetLabError, ValueError):
    code = "too_few_elements"


class DisjointTranslateShortfall(SumsetLabError):
    code = "disjoint_translate_shortfall"


class HypothesisViolated(SumsetLabError):
    code = "hypothesis_violated"


class Degenerate(SumsetLabError, ValueError):
    code = "degenerate"
