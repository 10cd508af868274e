import logging
from typing import Self, TYPE_CHECKING

from ..domain import Auto, Event

if TYPE_CHECKING:
    from .message_bus import Message

from ..adapters.repositories import ArtifactStore, InMemoryArtifactStore

logger = logging.getLogger(__name__)


class UnitOfWork:
    """Stages a run's artifacts and writes them to the store all at once.

    Leaving the ``with`` block normally commits; an exception rolls the
    staged artifacts back so no partial output is written.
    """

    def __init__(self, store: ArtifactStore = Auto) -> None:
        self.store = store if store else InMemoryArtifactStore()
        self._staged: dict[str, bytes] = {}
        self._new_messages: list["Message"] = []

    def __enter__(self) -> Self:
        self._staged = {}
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if exc_type:
            self.rollback()
        else:
            self.commit()

    def stage(self, name: str, data: bytes | str) -> None:
        """Stage an artifact; text is encoded as UTF-8."""
        if isinstance(data, str):
            data = data.encode("utf-8")
        self._staged[name] = data

    def commit(self):
        for name in sorted(self._staged):
            self.store.put(name, self._staged[name])
        if self._staged:
            logger.debug("committed %d artifact(s)", len(self._staged))
        self._staged = {}

    def rollback(self):
        if self._staged:
            logger.debug("discarded %d staged artifact(s)", len(self._staged))
        self._staged = {}
        self.discard_events()

    def add_event(self, event: Event) -> None:
        """Add an event to the unit of work."""
        self._new_messages.append(event)

    def discard_events(self) -> None:
        """Drop events of a command that did not complete."""
        if self._new_messages:
            logger.debug("dropped %d pending event(s)", len(self._new_messages))
        self._new_messages = []

    def collect_new_events(self):
        """Collect all new messages."""
        while self._new_messages:
            yield self._new_messages.pop(0)
