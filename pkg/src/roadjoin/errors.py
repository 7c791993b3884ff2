"""Exception types shared across the package."""


class RoadJoinError(Exception):
    """Base class for all roadjoin errors."""


class ParseError(RoadJoinError):
    """A text input file could not be parsed (message carries file and line)."""


class IntegrityError(RoadJoinError):
    """Input data is self-inconsistent, e.g. an edge references an unknown vertex."""


class DomainError(RoadJoinError, ValueError):
    """A parameter is outside its valid domain."""


class FormatError(RoadJoinError):
    """A serialized artifact (hierarchy file) is corrupted or has the wrong version."""
