import logging
from typing import Callable

import numpy as np

from ..adapters import codecs
from ..adapters.heatmap import render_heatmap
from ..adapters.runner import RealizationRunner
from ..domain import commands, events
from ..domain.grid import (
    RewardGrid,
    bin_grid,
    clamp_non_negative,
    estimate_global_variance,
    occlude,
    resize_bilinear,
    scale_rewards,
    tile_image,
    upsample_tile,
)
from ..domain.mc_config import McConfig
from ..domain.mdp_config import MdpConfig
from ..domain.mdp import (
    TaskingMdp,
    greedy_rollout,
    realize_clouds,
    simulate_trajectory,
    value_iteration,
)
from ..domain.run_config import META_FILE, RunConfig
from ..domain.search import CostModel, GridPos, random_start, select_goal, ucs
from ..domain.stochastic import (
    PathProbabilityMatrix,
    mean_path,
    path_cost_margin,
    sharpness,
)
from ..domain.synth import seeded_rng, synth_grid
from .unit_of_work import UnitOfWork

logger = logging.getLogger(__name__)

Summary = dict[str, object]


def _stage_metadata(uow: UnitOfWork, run: RunConfig) -> None:
    uow.stage(META_FILE, run.to_metadata())


def _start_for(grid: RewardGrid, start: GridPos | None, run: RunConfig) -> GridPos:
    if start is not None:
        return start
    start = random_start(grid, seeded_rng(run.seed))
    logger.info("no start given, picked %s from seed %d", start, run.seed)
    return start


def _tasking_mdp(grid: RewardGrid, config: MdpConfig, uow: UnitOfWork) -> TaskingMdp:
    scaled = scale_rewards(grid, invert=True)
    if scaled.degenerate:
        uow.add_event(events.RewardScaleDegenerate(source="mdp rewards"))
    return TaskingMdp(grid=scaled.grid, clouds=config.cloud_model, gamma=config.gamma)


def synthesize_grid(cmd: commands.SynthesizeGrid, uow: UnitOfWork) -> Summary:
    """Generate a synthetic reward grid."""
    grid = synth_grid(cmd.rows, cmd.cols, cmd.pattern, cmd.run.seed)
    with uow:
        uow.stage("grid.txt", codecs.format_grid(grid))
        if grid.value_min >= 0.0:
            uow.stage("bins.txt", codecs.format_int_grid(bin_grid(grid)))
        uow.stage("heatmap.ppm", render_heatmap(grid))
        _stage_metadata(uow, cmd.run)
    return {"rows": grid.rows, "cols": grid.cols, "min": grid.value_min, "max": grid.value_max}


def tile_raster(cmd: commands.TileImage, uow: UnitOfWork) -> Summary:
    """Tile an image and export per-tile mean intensities."""
    image = cmd.image
    if cmd.resize is not None:
        image = resize_bilinear(image, cmd.resize, cmd.resize)
    tiles = tile_image(image, cmd.grid_rows, cmd.grid_cols, cmd.tile_height, cmd.tile_width)
    means = RewardGrid(
        np.array([tile.data.mean() for tile in tiles.tiles]).reshape(
            tiles.grid_rows, tiles.grid_cols
        )
    )
    with uow:
        uow.stage("tile_means.txt", codecs.format_grid(means))
        uow.stage("heatmap.ppm", render_heatmap(means))
        if cmd.export_tiles:
            for row in range(tiles.grid_rows):
                for col in range(tiles.grid_cols):
                    upsampled = upsample_tile(tiles.tile(row, col), cmd.upsample, cmd.upsample)
                    uow.stage(
                        f"tiles/tile_{row:03d}_{col:03d}.ppm", codecs.raster_to_ppm(upsampled)
                    )
        _stage_metadata(uow, cmd.run)
    return {
        "tiles": len(tiles),
        "offset": f"{tiles.offset_row},{tiles.offset_col}",
        "tile_size": f"{tiles.tile_height}x{tiles.tile_width}",
    }


def plan_path(cmd: commands.PlanPath, uow: UnitOfWork) -> Summary:
    """Deterministic optimal path with Uniform Cost Search."""
    start = _start_for(cmd.grid, cmd.start, cmd.run)
    goal = cmd.goal if cmd.goal is not None else select_goal(cmd.grid)
    path = ucs(cmd.grid, start, goal, CostModel.from_name(cmd.cost))
    with uow:
        uow.stage("path.txt", codecs.format_path(path))
        uow.stage("heatmap.ppm", render_heatmap(cmd.grid, path))
        _stage_metadata(uow, cmd.run)
    return {"start": str(start), "goal": str(goal), "cost": path.total_cost, "steps": len(path) - 1}


def estimate_path_probabilities(
    cmd: commands.EstimatePathProbabilities, uow: UnitOfWork, runner: RealizationRunner
) -> Summary:
    """Monte Carlo path-probability matrix under prediction noise."""
    cfg = cmd.config
    if cmd.predictions is not None:
        sigma2 = estimate_global_variance(cmd.predictions)
        cfg = McConfig.from_dict({**cfg.to_dict(), "sigma2": sigma2})
        logger.info("estimated sigma2 %g from %d image(s)", cfg.sigma2, len(cmd.predictions.images))
    cfg.validate()

    mean = mean_path(cmd.grid, cfg)
    tally = runner.tally(cmd.grid, cfg)
    matrix = PathProbabilityMatrix.from_counts(tally.counts, cfg.iterations, tally.clamped_tiles)
    if tally.clamped_tiles:
        uow.add_event(
            events.RealizationsClamped(tiles=tally.clamped_tiles, iterations=cfg.iterations)
        )
    margin = path_cost_margin(cmd.grid, mean, cfg)

    with uow:
        uow.stage("path_probability.txt", codecs.format_grid(matrix.as_grid()))
        uow.stage("heatmap.ppm", render_heatmap(matrix))
        uow.stage("path.txt", codecs.format_path(mean))
        uow.stage(
            "margin.txt",
            f"sigma2 {cfg.sigma2!r}\n"
            f"mean {margin.mean!r}\n"
            f"std {margin.std!r}\n"
            f"sharpness {sharpness(matrix)}\n",
        )
        _stage_metadata(uow, cmd.run)
    return {
        "sigma2": cfg.sigma2,
        "iterations": cfg.iterations,
        "sharpness": sharpness(matrix),
        "path_cost": mean.total_cost,
        "margin_std": margin.std,
    }


def solve_tasking_mdp(cmd: commands.SolveTaskingMdp, uow: UnitOfWork) -> Summary:
    """Value iteration on the cloud-aware MDP."""
    cmd.config.validate()
    mdp = _tasking_mdp(cmd.grid, cmd.config, uow)
    result = value_iteration(mdp, tol=cmd.config.tol, max_iters=cmd.config.max_iters)
    if not result.converged:
        uow.add_event(
            events.ValueIterationNotConverged(
                iterations=result.iterations, residual=result.residual
            )
        )
    start = _start_for(cmd.grid, cmd.start, cmd.run)
    preview = greedy_rollout(mdp, result.policy, start, cmd.max_steps)

    with uow:
        uow.stage("policy.txt", codecs.format_policy(result.policy))
        clear, cloudy = result.values.values[:, :, 0], result.values.values[:, :, 1]
        uow.stage("values_clear.txt", codecs.format_grid(RewardGrid(clear)))
        uow.stage("values_cloudy.txt", codecs.format_grid(RewardGrid(cloudy)))
        uow.stage("rollout.txt", codecs.format_positions(preview))
        uow.stage("heatmap.ppm", render_heatmap(mdp.grid, preview))
        _stage_metadata(uow, cmd.run)
    return {
        "iterations": result.iterations,
        "converged": result.converged,
        "residual": result.residual,
        "terminal": str(mdp.terminal),
    }


def simulate_tasking(cmd: commands.SimulateTasking, uow: UnitOfWork) -> Summary:
    """Fly the optimal policy through one realized cloud field."""
    cmd.config.validate()
    mdp = _tasking_mdp(cmd.grid, cmd.config, uow)
    result = value_iteration(mdp, tol=cmd.config.tol, max_iters=cmd.config.max_iters)
    if not result.converged:
        uow.add_event(
            events.ValueIterationNotConverged(
                iterations=result.iterations, residual=result.residual
            )
        )

    rng = seeded_rng(cmd.run.seed)
    start = cmd.start if cmd.start is not None else random_start(cmd.grid, rng)
    field = realize_clouds(mdp.clouds, mdp.rows, mdp.cols, cmd.max_steps + 1, rng)
    trajectory = simulate_trajectory(mdp, result.policy, field, start, cmd.max_steps)
    clear_path = ucs(
        clamp_non_negative(cmd.grid), start, select_goal(cmd.grid), CostModel.from_name(cmd.cost)
    )

    with uow:
        uow.stage("trajectory.txt", codecs.format_trajectory(trajectory))
        uow.stage("clouds.txt", codecs.format_cloud_field(field))
        uow.stage("ucs_path.txt", codecs.format_path(clear_path))
        occluded = occlude(mdp.grid, field.mask)
        uow.stage("occluded.txt", codecs.format_grid(occluded))
        uow.stage("occluded.ppm", render_heatmap(occluded, trajectory.positions))
        uow.stage("heatmap.ppm", render_heatmap(mdp.grid, trajectory.positions))
        _stage_metadata(uow, cmd.run)
    return {
        "start": str(start),
        "steps": len(trajectory.states) - 1,
        "reward": trajectory.total_reward,
        "reached_terminal": trajectory.states[-1].pos == mdp.terminal,
        "differs_from_ucs": trajectory.positions != list(clear_path.positions),
    }


def estimate_variance(cmd: commands.EstimateVariance, uow: UnitOfWork) -> Summary:
    """Global prediction variance from per-image tile predictions."""
    sigma2 = estimate_global_variance(cmd.predictions)
    with uow:
        uow.stage("variance.txt", f"sigma2 {sigma2!r}\nimages {len(cmd.predictions.images)}\n")
        _stage_metadata(uow, cmd.run)
    return {"sigma2": sigma2, "images": len(cmd.predictions.images)}


def reward_scale_degenerate(event: events.RewardScaleDegenerate) -> None:
    logger.warning("%s: constant grid, rewards set to 0.5 everywhere", event.source)


def value_iteration_not_converged(event: events.ValueIterationNotConverged) -> None:
    logger.warning(
        "value iteration stopped after %d sweeps with residual %g; policy may be suboptimal",
        event.iterations,
        event.residual,
    )


def realizations_clamped(event: events.RealizationsClamped) -> None:
    logger.warning(
        "clamped %d negative tile draw(s) to 0 over %d realization(s)",
        event.tiles,
        event.iterations,
    )


EVENT_HANDLERS: dict[type[events.Event], list[Callable]] = {
    events.RewardScaleDegenerate: [reward_scale_degenerate],
    events.ValueIterationNotConverged: [value_iteration_not_converged],
    events.RealizationsClamped: [realizations_clamped],
}

COMMAND_HANDLERS: dict[type[commands.Command], Callable] = {
    commands.SynthesizeGrid: synthesize_grid,
    commands.TileImage: tile_raster,
    commands.PlanPath: plan_path,
    commands.EstimatePathProbabilities: estimate_path_probabilities,
    commands.SolveTaskingMdp: solve_tasking_mdp,
    commands.SimulateTasking: simulate_tasking,
    commands.EstimateVariance: estimate_variance,
}
