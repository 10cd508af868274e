from typing import Protocol

from ...domain.grid import RewardGrid
from ...domain.mc_config import McConfig
from ...domain.stochastic import RealizationTally


class RealizationRunner(Protocol):
    """A runner interface for evaluating Monte Carlo realizations."""

    def tally(self, mean_grid: RewardGrid, cfg: McConfig) -> RealizationTally:
        """Count path crossings over all ``cfg.iterations`` realizations."""
        ...
