from .events import Event
from .commands import Command
from .constants import Auto
from .errors import (
    ContractError,
    DimensionError,
    DomainError,
    InputError,
    PreconditionError,
    TaskingError,
)
from .grid import (
    FsmBin,
    ImagePredictions,
    ImageRaster,
    PredictionSet,
    RewardGrid,
    TileSet,
)
from .search import CostModel, GridPos, Path
from .stochastic import PathProbabilityMatrix
from .mc_config import McConfig
from .mdp import CloudField, CloudModel, MdpState, Policy, TaskingMdp, ValueFunction
from .mdp_config import MdpConfig
from .run_config import RunConfig


__all__ = [
    "Auto",
    "CloudField",
    "CloudModel",
    "Command",
    "ContractError",
    "CostModel",
    "DimensionError",
    "DomainError",
    "Event",
    "FsmBin",
    "GridPos",
    "ImagePredictions",
    "ImageRaster",
    "InputError",
    "McConfig",
    "MdpConfig",
    "MdpState",
    "Path",
    "PathProbabilityMatrix",
    "Policy",
    "PredictionSet",
    "PreconditionError",
    "RewardGrid",
    "RunConfig",
    "TaskingError",
    "TaskingMdp",
    "TileSet",
    "ValueFunction",
]
