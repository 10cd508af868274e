"""Epistemic uncertainty: planning around cloud cover.

The planner works on the small state space (tile, cloud bit at the agent's
tile) and solves it with Jacobi value iteration. The simulator replays a
policy against a full per-tile cloud field realized from the same Markov
chain.
"""

import enum
import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ContractError, DimensionError, DomainError
from .grid import RewardGrid, scale_rewards
from .search import MOVES, GridPos

logger = logging.getLogger(__name__)


DEFAULT_GAMMA = 0.95
DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITERS = 10_000

NO_ACTION = -1


class Action(enum.IntEnum):
    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, label: str) -> "Action":
        try:
            return cls[label.upper()]
        except KeyError:
            raise DomainError(f"unknown action {label!r}") from None


def _require_tile(mdp: "TaskingMdp", pos: GridPos) -> None:
    if not (0 <= pos.row < mdp.rows and 0 <= pos.col < mdp.cols):
        raise DomainError(f"position {pos} is outside the {mdp.rows}x{mdp.cols} grid")


def _require_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must be a probability in [0, 1], got {value}")


@dataclass(frozen=True)
class CloudModel:
    """Bernoulli start plus a two-state Markov chain for cloud cover.

    Only p(C=1), p(C'=1|C=0) and p(C'=1|C=1) are stored; complements are
    always derived.
    """

    p_init: float = 0.2
    p_1_given_0: float = 0.5
    p_1_given_1: float = 0.5

    def __post_init__(self) -> None:
        _require_probability("p_init", self.p_init)
        _require_probability("p_1_given_0", self.p_1_given_0)
        _require_probability("p_1_given_1", self.p_1_given_1)

    def p_cloudy_next(self, cloud: int) -> float:
        return self.p_1_given_1 if cloud else self.p_1_given_0

    def transition_matrix(self) -> np.ndarray:
        """Row ``c`` holds p(C'=0|C=c), p(C'=1|C=c)."""
        return np.array(
            [
                [1.0 - self.p_1_given_0, self.p_1_given_0],
                [1.0 - self.p_1_given_1, self.p_1_given_1],
            ]
        )


CLEAR_SKY = CloudModel(0.0, 0.0, 0.0)


class MdpState(NamedTuple):
    pos: GridPos
    cloud: int


@dataclass(frozen=True, eq=False)
class TaskingMdp:
    """Satellite tasking MDP over (tile, cloud bit) states.

    ``grid`` holds rewards scaled to [0, 1] where 1 marks the most
    food-insecure tile; that tile is the absorbing terminal.
    """

    grid: RewardGrid
    clouds: CloudModel = CloudModel()
    gamma: float = DEFAULT_GAMMA
    terminal: GridPos = field(init=False)

    def __post_init__(self) -> None:
        if self.grid.value_min < 0.0 or self.grid.value_max > 1.0:
            raise DomainError("MDP rewards must be scaled into [0, 1]")
        if not 0.0 < self.gamma < 1.0:
            raise DomainError(f"gamma must lie in (0, 1), got {self.gamma}")
        row, col = np.unravel_index(int(np.argmax(self.grid.values)), self.grid.shape)
        object.__setattr__(self, "terminal", GridPos(int(row), int(col)))

    @classmethod
    def from_fsm_grid(
        cls, fsm_grid: RewardGrid, clouds: CloudModel = CloudModel(), gamma: float = DEFAULT_GAMMA
    ) -> "TaskingMdp":
        """Build the MDP from raw FSM predictions (low value = food insecure)."""
        scaled = scale_rewards(fsm_grid, invert=True)
        return cls(grid=scaled.grid, clouds=clouds, gamma=gamma)

    @property
    def rows(self) -> int:
        return self.grid.rows

    @property
    def cols(self) -> int:
        return self.grid.cols

    def move(self, pos: GridPos, action: Action) -> GridPos:
        """Deterministic 4-connected move; off-grid moves stay in place."""
        d_row, d_col = MOVES[action]
        row, col = pos.row + d_row, pos.col + d_col
        if 0 <= row < self.rows and 0 <= col < self.cols:
            return GridPos(row, col)
        return pos

    def successor_table(self) -> np.ndarray:
        """Flat successor index for every (action, flat tile index)."""
        table = np.empty((len(Action), self.rows * self.cols), dtype=np.int64)
        for action in Action:
            for row in range(self.rows):
                for col in range(self.cols):
                    nxt = self.move(GridPos(row, col), action)
                    table[action, row * self.cols + col] = nxt.row * self.cols + nxt.col
        return table


@dataclass(frozen=True, eq=False)
class ValueFunction:
    """State values, shaped ``(rows, cols, 2)`` and indexed by cloud bit last."""

    values: np.ndarray

    def __getitem__(self, state: MdpState) -> float:
        return float(self.values[state.pos.row, state.pos.col, state.cloud])


@dataclass(frozen=True, eq=False)
class Policy:
    """Greedy action per state; terminal states hold ``NO_ACTION``."""

    actions: np.ndarray

    def action_for(self, state: MdpState) -> Action:
        rows, cols, _ = self.actions.shape
        if not (0 <= state.pos.row < rows and 0 <= state.pos.col < cols):
            raise ContractError(f"policy has no entry for {state}")
        action = int(self.actions[state.pos.row, state.pos.col, state.cloud])
        if action == NO_ACTION:
            raise ContractError(f"policy has no action for {state}")
        return Action(action)


@dataclass(frozen=True, eq=False)
class ValueIterationResult:
    values: ValueFunction
    policy: Policy
    iterations: int
    converged: bool
    residual: float
    residuals: tuple[float, ...]


@dataclass(frozen=True, eq=False)
class CloudField:
    """Realized per-tile cloud masks, one per timestep."""

    history: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if not self.history:
            raise DimensionError("cloud field needs at least one mask")
        shape = self.history[0].shape
        masks = []
        for mask in self.history:
            if mask.shape != shape:
                raise DimensionError("all cloud masks must share one shape")
            frozen = np.asarray(mask, dtype=bool).copy()
            frozen.flags.writeable = False
            masks.append(frozen)
        object.__setattr__(self, "history", tuple(masks))

    @property
    def mask(self) -> np.ndarray:
        return self.history[0]

    @property
    def rows(self) -> int:
        return self.mask.shape[0]

    @property
    def cols(self) -> int:
        return self.mask.shape[1]

    def __len__(self) -> int:
        return len(self.history)

    def at(self, timestep: int) -> np.ndarray:
        """Mask at ``timestep``; the last realized mask is held beyond the horizon."""
        return self.history[min(timestep, len(self.history) - 1)]


class Trajectory(NamedTuple):
    states: list[MdpState]
    total_reward: float
    discounted_reward: float

    @property
    def positions(self) -> list[GridPos]:
        return [state.pos for state in self.states]


def reward(mdp: TaskingMdp, state: MdpState) -> float:
    """Scaled tile value, or 0 where clouds hide the tile."""
    if state.cloud:
        return 0.0
    return mdp.grid.value_at(state.pos.row, state.pos.col)


def transition(
    mdp: TaskingMdp, state: MdpState, action: Action
) -> list[tuple[MdpState, float]]:
    """Successor distribution; zero-probability successors are left out."""
    if state.pos == mdp.terminal:
        nxt = state.pos
    else:
        nxt = mdp.move(state.pos, Action(action))
    p_cloudy = mdp.clouds.p_cloudy_next(state.cloud)
    outcomes = [(MdpState(nxt, 0), 1.0 - p_cloudy), (MdpState(nxt, 1), p_cloudy)]
    return [(successor, p) for successor, p in outcomes if p > 0.0]


class _Backup:
    """Precomputed arrays for vectorized Bellman backups."""

    def __init__(self, mdp: TaskingMdp) -> None:
        n = mdp.rows * mdp.cols
        self.shape = (mdp.rows, mdp.cols, 2)
        self.gamma = mdp.gamma
        self.successors = mdp.successor_table()
        self.terminal = mdp.terminal.row * mdp.cols + mdp.terminal.col
        self.rewards = np.zeros((n, 2))
        self.rewards[:, 0] = mdp.grid.values.ravel()
        self.continues = np.ones((n, 1))
        self.continues[self.terminal] = 0.0
        self.transitions_t = mdp.clouds.transition_matrix().T

    def initial(self) -> np.ndarray:
        values = np.zeros((self.shape[0] * self.shape[1], 2))
        values[self.terminal] = self.rewards[self.terminal]
        return values

    def q_values(self, values: np.ndarray) -> np.ndarray:
        # entering the terminal pays its reward once, nothing accrues afterwards
        landing = self.rewards + self.gamma * self.continues * values
        return np.stack(
            [landing[self.successors[action]] @ self.transitions_t for action in Action]
        )

    def sweep(self, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        q = self.q_values(values)
        updated = q.max(axis=0)
        updated[self.terminal] = self.rewards[self.terminal]
        return updated, q

    def greedy(self, q: np.ndarray) -> np.ndarray:
        # argmax keeps the first maximum, i.e. the fixed order up, down, left, right
        actions = np.argmax(q, axis=0).astype(np.int64)
        actions[self.terminal] = NO_ACTION
        return actions


def bellman_backup(mdp: TaskingMdp, values: ValueFunction) -> tuple[ValueFunction, Policy]:
    """One Jacobi sweep of the Bellman optimality operator plus its greedy policy."""
    backup = _Backup(mdp)
    updated, q = backup.sweep(values.values.reshape(-1, 2))
    return (
        ValueFunction(updated.reshape(backup.shape)),
        Policy(backup.greedy(q).reshape(backup.shape)),
    )


def greedy_policy(mdp: TaskingMdp, values: ValueFunction) -> Policy:
    backup = _Backup(mdp)
    q = backup.q_values(values.values.reshape(-1, 2))
    return Policy(backup.greedy(q).reshape(backup.shape))


def value_iteration(
    mdp: TaskingMdp, tol: float = DEFAULT_TOL, max_iters: int = DEFAULT_MAX_ITERS
) -> ValueIterationResult:
    """Solve the MDP by value iteration and extract the greedy policy.

    Stops once the sup-norm change of a sweep drops below ``tol``; when
    ``max_iters`` sweeps are used up first the result is flagged as not
    converged.
    """
    if tol <= 0.0:
        raise DomainError(f"tol must be positive, got {tol}")
    if max_iters < 1:
        raise DomainError(f"max_iters must be at least 1, got {max_iters}")

    backup = _Backup(mdp)
    values = backup.initial()
    residuals: list[float] = []
    converged = False
    for _ in range(max_iters):
        updated, _q = backup.sweep(values)
        residual = float(np.max(np.abs(updated - values)))
        residuals.append(residual)
        values = updated
        if residual < tol:
            converged = True
            break

    if converged:
        logger.debug("value iteration converged after %d sweeps", len(residuals))
    else:
        logger.info(
            "value iteration did not converge within %d sweeps, residual %g",
            max_iters,
            residuals[-1],
        )
    actions = backup.greedy(backup.q_values(values))
    return ValueIterationResult(
        values=ValueFunction(values.reshape(backup.shape)),
        policy=Policy(actions.reshape(backup.shape)),
        iterations=len(residuals),
        converged=converged,
        residual=residuals[-1],
        residuals=tuple(residuals),
    )


def realize_clouds(
    clouds: CloudModel,
    rows: int,
    cols: int,
    timesteps: int,
    rng: np.random.Generator,
    regions: Sequence[tuple[np.ndarray, CloudModel]] = (),
) -> CloudField:
    """Realize an independent cloud chain per tile.

    ``regions`` pairs a boolean mask with the model used for the tiles it
    covers; later regions win where masks overlap.
    """
    if rows < 1 or cols < 1 or timesteps < 1:
        raise DimensionError("cloud field needs at least one tile and one timestep")
    p_init = np.full((rows, cols), clouds.p_init)
    p_1_given_0 = np.full((rows, cols), clouds.p_1_given_0)
    p_1_given_1 = np.full((rows, cols), clouds.p_1_given_1)
    for mask, model in regions:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (rows, cols):
            raise DimensionError(f"region mask shape {mask.shape} does not match {(rows, cols)}")
        p_init[mask] = model.p_init
        p_1_given_0[mask] = model.p_1_given_0
        p_1_given_1[mask] = model.p_1_given_1

    current = rng.random((rows, cols)) < p_init
    history = [current]
    for _ in range(1, timesteps):
        p_cloudy = np.where(current, p_1_given_1, p_1_given_0)
        current = rng.random((rows, cols)) < p_cloudy
        history.append(current)
    return CloudField(tuple(history))


def simulate_trajectory(
    mdp: TaskingMdp,
    policy: Policy,
    field: CloudField,
    start: GridPos,
    max_steps: int,
) -> Trajectory:
    """Follow ``policy`` through a realized cloud field.

    Each step reads the cloud bit of the agent's tile, moves, and collects
    the reward of the entered tile under its realized cloud bit.

    Raises:
        ContractError: If the field does not match the grid or the policy
            lacks an action for a visited state
    """
    if (field.rows, field.cols) != mdp.grid.shape:
        raise ContractError("cloud field does not match the grid")
    if len(field) < max_steps:
        raise ContractError(f"cloud field covers {len(field)} timesteps, {max_steps} needed")

    pos = GridPos(*start)
    _require_tile(mdp, pos)
    state = MdpState(pos, int(field.at(0)[pos.row, pos.col]))
    states = [state]
    total = 0.0
    discounted = 0.0
    step = 0
    while state.pos != mdp.terminal and step < max_steps:
        nxt = mdp.move(state.pos, policy.action_for(state))
        state = MdpState(nxt, int(field.at(step + 1)[nxt.row, nxt.col]))
        gained = reward(mdp, state)
        total += gained
        discounted += mdp.gamma**step * gained
        states.append(state)
        step += 1
    return Trajectory(states, total, discounted)


def greedy_rollout(
    mdp: TaskingMdp, policy: Policy, start: GridPos, max_steps: int
) -> list[GridPos]:
    """Positions visited under a permanently clear sky."""
    pos = GridPos(*start)
    _require_tile(mdp, pos)
    positions = [pos]
    while pos != mdp.terminal and len(positions) <= max_steps:
        pos = mdp.move(pos, policy.action_for(MdpState(pos, 0)))
        positions.append(pos)
    return positions


def cloud_stationary(clouds: CloudModel) -> float:
    """Long-run probability of a cloudy tile.

    Raises:
        DomainError: If the chain never leaves its start state
    """
    denominator = clouds.p_1_given_0 + (1.0 - clouds.p_1_given_1)
    if denominator <= 0.0:
        raise DomainError("cloud chain is degenerate: it never leaves either state")
    return clouds.p_1_given_0 / denominator


def estimate_cloud_model(field: CloudField) -> CloudModel:
    """Maximum likelihood cloud model from a realized history.

    A transition probability with no observed departures is estimated as 0.
    """
    history = np.stack(field.history)
    p_init = float(history[0].mean())
    before, after = history[:-1], history[1:]

    def rate(from_cloudy: bool) -> float:
        departures = before == from_cloudy
        total = int(np.count_nonzero(departures))
        if total == 0:
            return 0.0
        return int(np.count_nonzero(departures & after)) / total

    return CloudModel(p_init=p_init, p_1_given_0=rate(False), p_1_given_1=rate(True))
