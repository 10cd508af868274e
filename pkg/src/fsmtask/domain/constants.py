from typing import Any

WORKERS_ENV = "FSMTASK_WORKERS"
LOG_LEVEL_ENV = "FSMTASK_LOG_LEVEL"


class _Auto:
    """Default argument marker: the callee builds the dependency itself."""

    def __bool__(self):
        return False

    def __repr__(self) -> str:
        return "Auto"


Auto: Any = _Auto()
