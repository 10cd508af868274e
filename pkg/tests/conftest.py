import pytest

from fsmtask.adapters.repositories import InMemoryArtifactStore
from fsmtask.adapters.runner import SerialRealizationRunner
from fsmtask.domain import RewardGrid, RunConfig


@pytest.fixture
def store():
    return InMemoryArtifactStore()


@pytest.fixture
def bus(store):
    """
    Fixture to create a MessageBus writing into an in-memory store and
    evaluating realizations serially.
    """
    from fsmtask.bootstrap import bootstrap

    return bootstrap(store=store, runner=SerialRealizationRunner())


@pytest.fixture
def run_config():
    def make(subcommand: str = "test", seed: int = 0) -> RunConfig:
        return RunConfig(subcommand=subcommand, seed=seed, out_dir="out")

    return make


@pytest.fixture
def small_grid():
    """3x3 FSM grid whose poorest tile is the bottom-right corner."""
    return RewardGrid.from_rows(
        [
            [0.5, 0.1, 0.1],
            [0.1, 0.9, 0.1],
            [0.1, 0.1, 0.0],
        ]
    )


@pytest.fixture
def anyio_backend():
    return "asyncio"
