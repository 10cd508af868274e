from ...domain.grid import RewardGrid
from ...domain.mc_config import McConfig
from ...domain.stochastic import RealizationTally, tally_realizations
from .interface import RealizationRunner


class SerialRealizationRunner(RealizationRunner):
    """Evaluates realizations one after another in the calling thread."""

    def tally(self, mean_grid: RewardGrid, cfg: McConfig) -> RealizationTally:
        return tally_realizations(mean_grid, cfg, range(cfg.iterations))
