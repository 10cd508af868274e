import logging
import math
import os

import anyio
import numpy as np
from anyio import to_thread
from anyio.from_thread import BlockingPortalProvider

from ...domain.constants import WORKERS_ENV
from ...domain.grid import RewardGrid
from ...domain.mc_config import McConfig
from ...domain.stochastic import RealizationTally, tally_realizations
from .interface import RealizationRunner

logger = logging.getLogger(__name__)


DEFAULT_WORKERS = 4


def workers_from_env() -> int:
    value = os.environ.get(WORKERS_ENV, "").strip()
    if not value:
        return DEFAULT_WORKERS
    try:
        workers = int(value)
    except ValueError:
        logger.warning("%s is not an integer, using default %s", WORKERS_ENV, DEFAULT_WORKERS)
        return DEFAULT_WORKERS
    if workers <= 0:
        logger.warning("%s must be > 0, using default %s", WORKERS_ENV, DEFAULT_WORKERS)
        return DEFAULT_WORKERS
    return workers


def chunk_indices(iterations: int, chunks: int) -> list[range]:
    """Split ``range(iterations)`` into at most ``chunks`` contiguous ranges."""
    step = max(1, math.ceil(iterations / chunks))
    return [range(start, min(start + step, iterations)) for start in range(0, iterations, step)]


class ThreadedRealizationRunner(RealizationRunner):
    """Evaluates chunks of realizations on anyio worker threads.

    Each realization owns a substream derived from ``(seed, index)`` and
    the per-chunk integer counts are summed once all chunks finished, so
    the result never depends on scheduling.
    """

    def __init__(
        self, portal_provider: BlockingPortalProvider, workers: int | None = None
    ) -> None:
        self.portal_provider = portal_provider
        self.workers = workers if workers is not None else workers_from_env()

    def tally(self, mean_grid: RewardGrid, cfg: McConfig) -> RealizationTally:
        chunks = chunk_indices(cfg.iterations, self.workers)

        async def run_chunks() -> list[RealizationTally]:
            limiter = anyio.CapacityLimiter(self.workers)
            results: list[RealizationTally | None] = [None] * len(chunks)

            async def run_one(position: int, indices: range) -> None:
                results[position] = await to_thread.run_sync(
                    tally_realizations, mean_grid, cfg, indices, limiter=limiter
                )

            async with anyio.create_task_group() as tg:
                for position, indices in enumerate(chunks):
                    tg.start_soon(run_one, position, indices)
            return [result for result in results if result is not None]

        with self.portal_provider as portal:
            results = portal.call(run_chunks)

        logger.debug(
            "evaluated %d realizations in %d chunks on %d workers",
            cfg.iterations,
            len(chunks),
            self.workers,
        )
        counts = np.zeros(mean_grid.shape, dtype=np.int64)
        clamped_tiles = 0
        for result in results:
            counts += result.counts
            clamped_tiles += result.clamped_tiles
        return RealizationTally(counts, clamped_tiles)
