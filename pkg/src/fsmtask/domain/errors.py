"""Exception hierarchy for the tasking engine.

Every error is also a ``ValueError`` so callers validating configuration
the usual way keep working.
"""


class TaskingError(ValueError):
    """Base class for all tasking errors."""


class DimensionError(TaskingError):
    """Raised when raster or grid dimensions are invalid or do not fit."""


class DomainError(TaskingError):
    """Raised when a value lies outside the domain of an operation."""


class PreconditionError(TaskingError):
    """Raised when an algorithm's optimality precondition is violated."""


class ContractError(TaskingError):
    """Raised when collaborating objects disagree (e.g. a policy with holes)."""


class InputError(TaskingError):
    """Raised when input data is malformed or incomplete."""

    def __init__(
        self, message: str, *, image_id: str | None = None, path: str | None = None
    ) -> None:
        self.image_id = image_id
        self.path = path
        super().__init__(message)
