import logging

import pytest

from fsmtask.adapters.repositories import InMemoryArtifactStore
from fsmtask.domain import Command, Event
from fsmtask.domain.events import RewardScaleDegenerate
from fsmtask.service_layer import MessageBus, UnitOfWork


class Ping(Command):
    pass


class Boom(Command):
    pass


class TestUnitOfWork:
    def test_commits_on_success(self):
        store = InMemoryArtifactStore()
        uow = UnitOfWork(store=store)

        with uow:
            uow.stage("b.txt", "text")
            uow.stage("a.bin", b"\x00\x01")

        assert store.artifacts == {"a.bin": b"\x00\x01", "b.txt": b"text"}

    def test_rolls_back_on_error(self):
        store = InMemoryArtifactStore()
        uow = UnitOfWork(store=store)

        with pytest.raises(RuntimeError):
            with uow:
                uow.stage("a.txt", "partial")
                raise RuntimeError("handler failed")

        assert store.list() == []

    def test_defaults_to_in_memory_store(self):
        assert isinstance(UnitOfWork().store, InMemoryArtifactStore)

    def test_rollback_drops_pending_events(self):
        uow = UnitOfWork()
        uow.add_event(RewardScaleDegenerate(source="before"))

        with pytest.raises(RuntimeError):
            with uow:
                raise RuntimeError("handler failed")

        assert list(uow.collect_new_events()) == []

    def test_collects_events_once(self):
        uow = UnitOfWork()
        event = RewardScaleDegenerate(source="test")
        uow.add_event(event)

        assert list(uow.collect_new_events()) == [event]
        assert list(uow.collect_new_events()) == []


class TestMessageBus:
    def make_bus(self, uow, seen):
        def ping(command):
            uow.add_event(RewardScaleDegenerate(source="ping"))
            return "pong"

        def boom(command):
            uow.add_event(RewardScaleDegenerate(source="boom"))
            raise RuntimeError("boom")

        return MessageBus(
            uow=uow,
            event_handlers={RewardScaleDegenerate: [seen.append]},
            command_handlers={Ping: ping, Boom: boom},
        )

    def test_returns_command_result_and_dispatches_events(self):
        seen: list[Event] = []
        bus = self.make_bus(UnitOfWork(), seen)

        assert bus.handle(Ping()) == "pong"
        assert seen == [RewardScaleDegenerate(source="ping")]

    def test_command_errors_propagate(self, caplog):
        bus = self.make_bus(UnitOfWork(), [])

        with caplog.at_level(logging.ERROR):
            with pytest.raises(RuntimeError):
                bus.handle(Boom())

        assert "Boom" in caplog.text

    def test_events_of_a_failed_command_are_dropped(self):
        seen: list[Event] = []
        bus = self.make_bus(UnitOfWork(), seen)

        with pytest.raises(RuntimeError):
            bus.handle(Boom())
        bus.handle(Ping())

        assert seen == [RewardScaleDegenerate(source="ping")]

    def test_event_handler_errors_are_logged_not_raised(self, caplog):
        def broken(event):
            raise RuntimeError("broken handler")

        bus = MessageBus(
            uow=UnitOfWork(),
            event_handlers={RewardScaleDegenerate: [broken]},
            command_handlers={},
        )

        with caplog.at_level(logging.ERROR):
            bus.handle(RewardScaleDegenerate(source="x"))

        assert "Exception handling event" in caplog.text

    def test_rejects_unknown_messages(self):
        bus = self.make_bus(UnitOfWork(), [])
        with pytest.raises(Exception, match="Cannot handle message"):
            bus.handle("not a message")
