"""Exception hierarchy shared by every catsim module."""


class CatError(Exception):
    """Base class for all catsim errors."""


class RuleParseError(CatError, ValueError):
    """A rule string does not match the LTL grammar."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class UnsupportedRuleError(CatError, ValueError):
    """A well-formed rule that this engine cannot simulate."""


class GeometryError(CatError, ValueError):
    """Grid side, fragment size or word width constraints are violated."""


class LayoutError(CatError, ValueError):
    """An operation received a grid in the wrong memory layout."""


class ShapeError(CatError, ValueError):
    """Fragment operands do not share one side length."""


class UnsupportedRadiusError(CatError, ValueError):
    """Radius outside the range a fragment can represent."""


class SequencingError(CatError, RuntimeError):
    """A pipeline stage ran before its inputs were ready (e.g. stale halo)."""


class ConsistencyError(CatError, RuntimeError):
    """A reduction produced a value that no correct reduction can produce.

    ``index`` locates the first offending entry in the array being processed
    (engines translate it to an interior ``(row, col)`` cell where they can).
    """

    def __init__(self, message: str, index: tuple | None = None):
        self.index = index
        super().__init__(message)


class InfeasibleTargetError(CatError, ValueError):
    """No admissible tile efficiency factor reaches the requested speedup."""


class SnapshotFormatError(CatError, ValueError):
    """A snapshot file has a bad magic, version or geometry."""
