"""Aleatoric uncertainty propagation.

Every realization ``r`` of the reward grid draws from its own substream,
``SeedSequence(seed, spawn_key=(r,))`` feeding a Philox counter-based bit
generator, with normals from numpy's ziggurat ``standard_normal``. The
substream depends only on ``(seed, r)``, so realizations can be evaluated
in any order or in parallel and still give bit-identical results.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .errors import DomainError
from .grid import RewardGrid, clamp_non_negative
from .mc_config import GoalMode, McConfig
from .search import CostKind, GridPos, Path, path_cost, path_indicator, select_goal, ucs

logger = logging.getLogger(__name__)


DEFAULT_SHARPNESS_THRESHOLD = 0.05


@dataclass(frozen=True, eq=False)
class PathProbabilityMatrix:
    """Empirical probability that the optimal path crosses each tile."""

    probs: np.ndarray
    iterations: int
    clamped_tiles: int = 0

    @classmethod
    def from_counts(
        cls, counts: np.ndarray, iterations: int, clamped_tiles: int = 0
    ) -> "PathProbabilityMatrix":
        probs = counts / iterations
        probs.flags.writeable = False
        return cls(probs=probs, iterations=iterations, clamped_tiles=clamped_tiles)

    @property
    def rows(self) -> int:
        return self.probs.shape[0]

    @property
    def cols(self) -> int:
        return self.probs.shape[1]

    def as_grid(self) -> RewardGrid:
        return RewardGrid(self.probs)


class RealizationTally(NamedTuple):
    counts: np.ndarray
    clamped_tiles: int


class PathMargin(NamedTuple):
    mean: float
    std: float


def realization_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for realization ``index`` of the run seeded with ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def _draw(mean_grid: RewardGrid, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    noise = rng.standard_normal(mean_grid.shape)
    return mean_grid.values + math.sqrt(sigma2) * noise


def sample_realization(
    mean_grid: RewardGrid,
    sigma2: float,
    rng: np.random.Generator,
    clamp: bool = False,
) -> RewardGrid:
    """Draw every tile from N(mean, sigma2); with ``clamp`` negative draws become 0."""
    values = _draw(mean_grid, sigma2, rng)
    if clamp:
        values = np.maximum(values, 0.0)
    return RewardGrid(values)


def _realize(mean_grid: RewardGrid, cfg: McConfig, index: int) -> tuple[RewardGrid, int]:
    values = _draw(mean_grid, cfg.sigma2, realization_rng(cfg.seed, index))
    clamped = 0
    # fsm_sum needs non-negative tiles for UCS to stay optimal
    if cfg.cost_model.kind == CostKind.FSM_SUM:
        negative = values < 0.0
        clamped = int(np.count_nonzero(negative))
        values = np.where(negative, 0.0, values)
    return RewardGrid(values), clamped


def realization_path(
    mean_grid: RewardGrid, cfg: McConfig, index: int
) -> tuple[Path, int]:
    """Optimal path of realization ``index`` and the number of clamped tiles."""
    realization, clamped = _realize(mean_grid, cfg, index)
    if cfg.goal_mode == GoalMode.FIXED:
        goal = select_goal(mean_grid)
    else:
        goal = select_goal(realization)
    return ucs(realization, cfg.fixed_start, goal, cfg.cost_model), clamped


def mean_path(mean_grid: RewardGrid, cfg: McConfig) -> Path:
    """Optimal path on the mean grid, clamped the same way as the realizations."""
    _require_start(mean_grid, cfg.fixed_start)
    grid = mean_grid
    if cfg.cost_model.kind == CostKind.FSM_SUM:
        grid = clamp_non_negative(mean_grid)
    return ucs(grid, cfg.fixed_start, select_goal(mean_grid), cfg.cost_model)


def tally_realizations(
    mean_grid: RewardGrid, cfg: McConfig, indices: Iterable[int]
) -> RealizationTally:
    """Count, per tile, how many of the given realizations' paths cross it."""
    counts = np.zeros(mean_grid.shape, dtype=np.int64)
    clamped_tiles = 0
    for index in indices:
        path, clamped = realization_path(mean_grid, cfg, index)
        counts += path_indicator(path, mean_grid.rows, mean_grid.cols)
        clamped_tiles += clamped
    return RealizationTally(counts, clamped_tiles)


def path_probability_matrix(mean_grid: RewardGrid, cfg: McConfig) -> PathProbabilityMatrix:
    """Estimate how likely the optimal path crosses each tile.

    Raises:
        ValueError: If the configuration is invalid
        DomainError: If the start is off-grid
    """
    cfg.validate()
    _require_start(mean_grid, cfg.fixed_start)
    tally = tally_realizations(mean_grid, cfg, range(cfg.iterations))
    if tally.clamped_tiles:
        logger.debug("clamped %d negative tile draws to 0", tally.clamped_tiles)
    return PathProbabilityMatrix.from_counts(tally.counts, cfg.iterations, tally.clamped_tiles)


def _require_start(mean_grid: RewardGrid, start: GridPos) -> None:
    if not (0 <= start.row < mean_grid.rows and 0 <= start.col < mean_grid.cols):
        raise DomainError(f"start {start} is outside the {mean_grid.rows}x{mean_grid.cols} grid")


def sharpness(
    matrix: PathProbabilityMatrix, threshold: float = DEFAULT_SHARPNESS_THRESHOLD
) -> int:
    """Number of tiles whose crossing probability exceeds ``threshold``."""
    return int(np.count_nonzero(matrix.probs > threshold))


def path_cost_margin(mean_grid: RewardGrid, path: Path, cfg: McConfig) -> PathMargin:
    """Mean and spread of a fixed path's cost across the configured realizations."""
    cfg.validate()
    cost = cfg.cost_model
    costs = np.array(
        [
            path_cost(_realize(mean_grid, cfg, index)[0], path.positions, cost)
            for index in range(cfg.iterations)
        ]
    )
    std = float(np.std(costs, ddof=1)) if costs.size > 1 else 0.0
    return PathMargin(float(np.mean(costs)), std)
