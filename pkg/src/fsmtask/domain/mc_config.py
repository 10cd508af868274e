"""Monte Carlo configuration domain model."""

from dataclasses import dataclass
from typing import Literal, TypeAlias

from .search import CostModel, GridPos


class GoalMode:
    PER_REALIZATION: Literal["per_realization"] = "per_realization"
    FIXED: Literal["fixed"] = "fixed"


GoalModeType: TypeAlias = Literal["per_realization", "fixed"]

VALID_GOAL_MODES = {GoalMode.PER_REALIZATION, GoalMode.FIXED}


@dataclass
class McConfig:
    """Typed configuration for Monte Carlo path-probability estimation.

    Attributes:
        fixed_start: Start tile shared by every realization
        iterations: Number of realizations (MCIters)
        sigma2: Shared prediction variance in FSM units squared
        seed: Master seed, substreams are derived per realization
        cost: Cost model name ("unit", "fsm" or "fsm_sum")
        goal_mode: Recompute the goal per realization or keep the mean grid's goal
    """

    fixed_start: GridPos
    iterations: int = 100
    sigma2: float = 0.0
    seed: int = 0
    cost: str = "fsm_sum"
    goal_mode: GoalModeType = GoalMode.PER_REALIZATION

    MAX_SEED = 2**64 - 1

    @property
    def cost_model(self) -> CostModel:
        return CostModel.from_name(self.cost)

    @classmethod
    def from_dict(cls, data: dict) -> "McConfig":
        """Deserialize from a metadata dictionary.

        Raises:
            ValueError: If required fields are missing
        """
        if "start" not in data:
            raise ValueError("start is required")
        start = data["start"]
        if isinstance(start, str):
            start = GridPos.parse(start)
        return cls(
            fixed_start=GridPos(*start),
            iterations=int(data.get("iterations", 100)),
            sigma2=float(data.get("sigma2", 0.0)),
            seed=int(data.get("seed", 0)),
            cost=data.get("cost", "fsm_sum"),
            goal_mode=data.get("goal_mode", GoalMode.PER_REALIZATION),
        )

    def to_dict(self) -> dict:
        return {
            "start": str(self.fixed_start),
            "iterations": self.iterations,
            "sigma2": self.sigma2,
            "seed": self.seed,
            "cost": self.cost,
            "goal_mode": self.goal_mode,
        }

    def validate(self) -> bool:
        """Validate configuration values.

        Raises:
            ValueError: If a value is out of range
        """
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")

        if not self.sigma2 >= 0.0:
            raise ValueError("sigma2 must be zero or positive")

        if not 0 <= self.seed <= self.MAX_SEED:
            raise ValueError("seed must be a non-negative 64-bit integer")

        if self.goal_mode not in VALID_GOAL_MODES:
            raise ValueError(f"goal_mode must be one of {sorted(VALID_GOAL_MODES)}")

        CostModel.from_name(self.cost)
        return True
