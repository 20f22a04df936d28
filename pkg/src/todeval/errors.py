"""Exception hierarchy shared by all todeval modules.

Validation problems (bad content) and I/O problems (unreadable files) are
kept distinct because the CLI maps them to different exit codes.
"""


class EvaluationError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(EvaluationError):
    """Input content violates a contract (schema, invariant, configuration)."""


class ParseError(ValidationError):
    """A file could not be parsed; carries the location when known."""

    def __init__(self, message: str, *, path: str | None = None, location: str | None = None):
        self.path = path
        self.location = location
        parts = [message]
        if path:
            parts.append(f"file={path}")
        if location:
            parts.append(f"at {location}")
        super().__init__(": ".join(parts))


class OntologyError(ValidationError):
    """A placeholder or slot name is not covered by the slot ontology."""
