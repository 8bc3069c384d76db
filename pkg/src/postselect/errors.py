class PostSelectError(Exception):
    """Base class for errors raised by postselect."""


class ShapeError(PostSelectError, ValueError):
    """Party counts or table widths do not line up."""


class UndefinedSettingError(PostSelectError, ValueError):
    """An operation needed a setting that the behavior leaves undefined."""


class TotalRejection(PostSelectError, ValueError):
    """Post-selection accepted no trial at all (efficiency 0)."""


class ExpressionError(PostSelectError, ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class DimacsError(PostSelectError, ValueError):
    """Malformed DIMACS CNF input."""


class NoPostSelectionNeeded(PostSelectError, ValueError):
    """The target value is already reached by the resource without dropping trials."""
