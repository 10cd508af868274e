from dataclasses import dataclass


class Event:
    """Base class for all events."""


@dataclass
class RewardScaleDegenerate(Event):
    """A constant grid could not be scaled."""

    source: str


@dataclass
class ValueIterationNotConverged(Event):
    """Value iteration ran out of sweeps."""

    iterations: int
    residual: float


@dataclass
class RealizationsClamped(Event):
    """Negative Monte Carlo draws were clamped to zero."""

    tiles: int
    iterations: int
