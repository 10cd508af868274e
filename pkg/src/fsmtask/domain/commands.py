from dataclasses import dataclass, field

from .grid import ImageRaster, PredictionSet, RewardGrid
from .mc_config import McConfig
from .mdp_config import MdpConfig
from .run_config import RunConfig
from .search import GridPos


class Command:
    """Base class for all commands."""


@dataclass
class SynthesizeGrid(Command):
    """Generate a synthetic reward grid."""

    run: RunConfig
    rows: int
    cols: int
    pattern: str


@dataclass
class TileImage(Command):
    """Cut an image into tiles and summarize them."""

    run: RunConfig
    image: ImageRaster
    grid_rows: int = 33
    grid_cols: int = 33
    tile_height: int = 12
    tile_width: int = 12
    resize: int | None = None
    upsample: int = 28
    export_tiles: bool = False


@dataclass
class PlanPath(Command):
    """Find the deterministic optimal path (clear sky, exact predictions)."""

    run: RunConfig
    grid: RewardGrid
    start: GridPos | None = None
    goal: GridPos | None = None
    cost: str = "fsm_sum"


@dataclass
class EstimatePathProbabilities(Command):
    """Propagate prediction noise into a path-probability matrix."""

    run: RunConfig
    grid: RewardGrid
    config: McConfig
    predictions: PredictionSet | None = None


@dataclass
class SolveTaskingMdp(Command):
    """Solve the cloud-aware MDP and export its policy."""

    run: RunConfig
    grid: RewardGrid
    config: MdpConfig = field(default_factory=MdpConfig)
    start: GridPos | None = None
    max_steps: int = 200


@dataclass
class SimulateTasking(Command):
    """Fly the MDP policy through one realization of the cloud cover."""

    run: RunConfig
    grid: RewardGrid
    config: MdpConfig = field(default_factory=MdpConfig)
    start: GridPos | None = None
    max_steps: int = 200
    cost: str = "fsm_sum"


@dataclass
class EstimateVariance(Command):
    """Estimate the global prediction variance."""

    run: RunConfig
    predictions: PredictionSet
