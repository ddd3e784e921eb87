"""Exception hierarchy shared across the engine."""

from __future__ import annotations


class OrdlogError(Exception):
    """Base class for all engine errors."""


class CyclicOrder(OrdlogError):
    """A relation that should be a strict partial order contains a cycle.

    ``witness`` is one cycle as a list of element indices, first == last.
    """

    def __init__(self, message: str, witness: list | None = None):
        super().__init__(message)
        self.witness = witness or []


class InconsistentLog(OrdlogError):
    """The explicit order contradicts the timestamps somewhere.

    Carries the full consistency report so callers can surface the
    offending pairs.
    """

    def __init__(self, report):
        super().__init__(
            f"event log is inconsistent ({len(report.violations)} violating pair(s))"
        )
        self.report = report


class TiebreakerConflict(OrdlogError):
    """Applying a tiebreaker would create a cycle in the explicit order."""

    def __init__(self, conflicts):
        super().__init__(f"tiebreaker conflicts with the explicit order ({len(conflicts)} pair(s))")
        self.conflicts = list(conflicts)


class ResourceLimit(OrdlogError):
    """A computation exceeded a configured size cap."""


class ParseError(OrdlogError):
    """Input log bytes could not be parsed."""

    def __init__(self, message: str, location: str | None = None):
        super().__init__(message if location is None else f"{location}: {message}")
        self.location = location


class TimestampError(ParseError):
    """A timestamp value matched none of the configured patterns."""

    def __init__(self, value: str, patterns, location: str | None = None):
        super().__init__(
            f"timestamp {value!r} matches none of the configured patterns {list(patterns)}",
            location,
        )
        self.value = value
        self.patterns = list(patterns)
