from .unit_of_work import UnitOfWork
from .message_bus import MessageBus


__all__ = ["MessageBus", "UnitOfWork"]
