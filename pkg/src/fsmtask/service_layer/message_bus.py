import logging
from typing import Any, Callable

from ..domain import Event, Command, TaskingError
from .unit_of_work import UnitOfWork

logger = logging.getLogger(__name__)

Message = Event | Command


class MessageBus:
    """
    Dispatches commands to exactly one handler and events to any number of
    handlers. Events raised while handling a message are collected from the
    UnitOfWork and processed before ``handle`` returns.
    """

    def __init__(
        self,
        uow: UnitOfWork,
        event_handlers: dict[type[Event], list[Callable]],
        command_handlers: dict[type[Command], Callable],
    ):
        self.uow = uow
        self.event_handlers = event_handlers
        self.command_handlers = command_handlers
        self.queue: list[Message] = []

    def handle(self, message: Message) -> Any:
        """Handle a message; returns the command handler's result."""
        result = None
        self.queue.append(message)
        while self.queue:
            message = self.queue.pop(0)
            if isinstance(message, Event):
                self.handle_event(message)
            elif isinstance(message, Command):
                result = self.handle_command(message)
            else:
                raise Exception(f"Cannot handle message of type {message}")
        return result

    def handle_event(self, event: Event):
        for handler in self.event_handlers.get(type(event), []):
            try:
                logger.debug("handling event %s with handler %s", event, handler)
                handler(event)
                self.queue.extend(self.uow.collect_new_events())
            except Exception:
                logger.exception("Exception handling event %s", event)
                continue

    def handle_command(self, command: Command) -> Any:
        logger.debug("handling command %s", type(command).__name__)
        try:
            handler = self.command_handlers[type(command)]
            result = handler(command)
            self.queue.extend(self.uow.collect_new_events())
            return result
        except TaskingError as e:
            self.uow.discard_events()
            # expected input problems, reported by the caller
            logger.debug("command %s rejected: %s", type(command).__name__, e)
            raise
        except Exception:
            self.uow.discard_events()
            logger.exception("Exception handling command %s", type(command).__name__)
            raise
