"""Exception hierarchy shared across the pipeline."""

from __future__ import annotations


class SSRError(Exception):
    """Base class for every error raised by this package."""


class ParseError(SSRError):
    """Raised on malformed surface syntax or a malformed envelope.

    ``position`` is a 1-based column into the offending text (0 for
    envelope-level errors that have no column).
    """

    def __init__(self, position: int, reason: str, text: str | None = None) -> None:
        self.position = position
        self.reason = reason
        self.text = text
        super().__init__(f"column {position}: {reason}")


class SortConflict(SSRError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"predicate {name!r} used both as numeric and Boolean")


class DomainEmpty(SSRError):
    pass


class BudgetExceeded(SSRError):
    pass


class InvariantViolation(SSRError):
    pass


class MissingAtom(SSRError):
    pass


class SideUnsat(SSRError):
    pass


class EmptyTrace(SSRError):
    pass


class KernelUnsupported(SSRError):
    """A ground formula cannot be lowered to the vectorised kernel."""


class GatewayError(SSRError):
    pass


class NetworkError(GatewayError):
    pass


class FixtureMissing(GatewayError):
    def __init__(self, key: str, kind: str) -> None:
        self.key = key
        self.kind = kind
        super().__init__(f"no fixture for {kind} request {key}")


class MalformedEnvelope(GatewayError):
    def __init__(self, reason: str, raw: str) -> None:
        self.raw = raw
        super().__init__(reason)


class GatewayUnavailable(GatewayError):
    pass


class SchemaError(SSRError):
    def __init__(self, line: int, reason: str) -> None:
        self.line = line
        super().__init__(f"line {line}: {reason}")


class TooFewPremises(SSRError):
    pass


class DegenerateMarginal(SSRError):
    pass
