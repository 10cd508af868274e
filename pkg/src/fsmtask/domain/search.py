"""Deterministic path search on a reward grid.

Uniform Cost Search from a start tile to the most food-insecure tile,
with 4-connected moves and a frontier ordered by (cost, row, col,
insertion order) so results never depend on the platform.
"""

import heapq
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Literal, NamedTuple, Sequence, TypeAlias

import numpy as np

from .errors import ContractError, DomainError, PreconditionError
from .grid import RewardGrid

logger = logging.getLogger(__name__)


class GridPos(NamedTuple):
    row: int
    col: int

    def __str__(self) -> str:
        return f"{self.row},{self.col}"

    @classmethod
    def parse(cls, text: str) -> "GridPos":
        """Parse ``"row,col"``."""
        try:
            row, col = (int(part) for part in text.split(","))
        except ValueError as e:
            raise DomainError(f"position must look like 'row,col', got {text!r}") from e
        return cls(row, col)


# up, down, left, right
MOVES: tuple[tuple[int, int], ...] = ((-1, 0), (1, 0), (0, -1), (0, 1))


class CostKind:
    UNIT: Literal["unit"] = "unit"
    FSM_SUM: Literal["fsm_sum"] = "fsm_sum"


CostKindType: TypeAlias = Literal["unit", "fsm_sum"]

_COST_ALIASES = {"unit": CostKind.UNIT, "fsm": CostKind.FSM_SUM, "fsm_sum": CostKind.FSM_SUM}


@dataclass(frozen=True)
class CostModel:
    """How much a move costs.

    ``unit`` charges 1 per move, ``fsm_sum`` charges the FSM value of the
    tile entered.
    """

    kind: CostKindType = CostKind.FSM_SUM

    @classmethod
    def from_name(cls, name: str) -> "CostModel":
        try:
            return cls(_COST_ALIASES[name])
        except KeyError:
            raise DomainError(
                f"Invalid cost model: {name}. Must be one of {sorted(_COST_ALIASES)}"
            ) from None

    def step_cost(self, grid: RewardGrid, entered: GridPos) -> float:
        if self.kind == CostKind.UNIT:
            return 1.0
        return float(grid.values[entered.row, entered.col])


DEFAULT_COST = CostModel()


@dataclass(frozen=True)
class Path:
    positions: tuple[GridPos, ...]
    total_cost: float

    def __len__(self) -> int:
        return len(self.positions)

    @property
    def start(self) -> GridPos:
        return self.positions[0]

    @property
    def end(self) -> GridPos:
        return self.positions[-1]

    def validate(self, grid: RewardGrid) -> bool:
        """Check bounds and 4-connected adjacency of every step.

        Raises:
            ContractError: If the path leaves the grid or jumps
        """
        if not self.positions:
            raise ContractError("path is empty")
        for pos in self.positions:
            if not in_bounds(pos, grid):
                raise ContractError(f"path position {pos} is outside the grid")
        for before, after in itertools.pairwise(self.positions):
            if abs(before.row - after.row) + abs(before.col - after.col) != 1:
                raise ContractError(f"path jumps from {before} to {after}")
        return True


def in_bounds(pos: GridPos, grid: RewardGrid) -> bool:
    return 0 <= pos.row < grid.rows and 0 <= pos.col < grid.cols


def _require_in_bounds(pos: GridPos, grid: RewardGrid) -> None:
    if not in_bounds(pos, grid):
        raise DomainError(f"position {pos} is outside the {grid.rows}x{grid.cols} grid")


def neighbors(pos: GridPos, grid: RewardGrid) -> list[GridPos]:
    """In-bounds orthogonal neighbors in the order up, down, left, right."""
    _require_in_bounds(pos, grid)
    result = []
    for d_row, d_col in MOVES:
        candidate = GridPos(pos.row + d_row, pos.col + d_col)
        if in_bounds(candidate, grid):
            result.append(candidate)
    return result


def select_goal(grid: RewardGrid) -> GridPos:
    """Position of the lowest FSM value, i.e. the poorest region.

    Ties go to the smallest row, then the smallest column.
    """
    row, col = np.unravel_index(int(np.argmin(grid.values)), grid.shape)
    return GridPos(int(row), int(col))


def random_start(grid: RewardGrid, rng: np.random.Generator) -> GridPos:
    """Pick a start tile uniformly at random."""
    return GridPos(int(rng.integers(grid.rows)), int(rng.integers(grid.cols)))


def path_cost(grid: RewardGrid, positions: Sequence[GridPos], cost: CostModel) -> float:
    total = 0.0
    for pos in positions[1:]:
        total += cost.step_cost(grid, pos)
    return total


def path_indicator(path: Path, rows: int, cols: int) -> np.ndarray:
    """0/1 matrix marking the tiles a path crosses."""
    on_path = np.zeros((rows, cols), dtype=np.int64)
    for pos in path.positions:
        on_path[pos.row, pos.col] = 1
    return on_path


def ucs(
    grid: RewardGrid,
    start: GridPos,
    goal: GridPos,
    cost: CostModel = DEFAULT_COST,
) -> Path:
    """Find a minimum-cost path from ``start`` to ``goal`` with Uniform Cost Search.

    Raises:
        DomainError: If start or goal is outside the grid
        PreconditionError: If ``fsm_sum`` cost meets a negative tile value
    """
    start, goal = GridPos(*start), GridPos(*goal)
    _require_in_bounds(start, grid)
    _require_in_bounds(goal, grid)
    if cost.kind == CostKind.FSM_SUM and grid.value_min < 0.0:
        raise PreconditionError(
            f"fsm_sum cost requires non-negative tile values, grid minimum is {grid.value_min}"
        )

    counter = itertools.count()
    frontier: list[tuple[float, int, int, int, GridPos]] = [
        (0.0, start.row, start.col, next(counter), start)
    ]
    best: dict[GridPos, float] = {start: 0.0}
    parent: dict[GridPos, GridPos] = {}
    closed: set[GridPos] = set()

    while frontier:
        g, _, _, _, pos = heapq.heappop(frontier)
        if pos in closed:
            continue
        if pos == goal:
            positions = [pos]
            while positions[-1] in parent:
                positions.append(parent[positions[-1]])
            positions.reverse()
            logger.debug("ucs %s -> %s: cost %s, expanded %d", start, goal, g, len(closed))
            return Path(tuple(positions), g)
        closed.add(pos)
        for nb in neighbors(pos, grid):
            if nb in closed:
                continue
            candidate = g + cost.step_cost(grid, nb)
            if candidate < best.get(nb, math.inf):
                best[nb] = candidate
                parent[nb] = pos
                heapq.heappush(frontier, (candidate, nb.row, nb.col, next(counter), nb))

    # grids have no obstacles, every tile is reachable
    raise ContractError(f"goal {goal} unreachable from {start}")
