import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Callable, Sequence

from ..adapters.codecs import load_grid, load_image, load_predictions, read_text
from ..adapters.repositories import FileSystemArtifactStore
from ..bootstrap import bootstrap
from ..domain import DomainError, GridPos, McConfig, MdpConfig, RunConfig, TaskingError
from ..domain import commands
from ..domain.constants import LOG_LEVEL_ENV
from ..domain.mc_config import GoalMode
from ..domain.mdp import DEFAULT_GAMMA, DEFAULT_MAX_ITERS, DEFAULT_TOL
from ..domain.search import random_start
from ..domain.synth import PATTERNS, Pattern, seeded_rng, synth_raster

logger = logging.getLogger(__name__)


EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_USAGE_ERROR = 2

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
DEFAULT_SIGMA2 = 0.01
DEFAULT_MAX_STEPS = 200

# argparse destinations that are not replayed from the metadata record
_NOT_RECORDED = {"command", "seed", "out", "log_level"}


def setup_logging(log_level: str):
    logging.basicConfig(
        level=getattr(logging, log_level),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )


def default_log_level() -> str:
    value = os.environ.get(LOG_LEVEL_ENV, "").strip().upper()
    if value in LOG_LEVELS:
        return value
    return "WARNING"


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be zero or positive, got {value}")
    return value


def non_negative_float(text: str) -> float:
    value = float(text)
    if not value >= 0.0:
        raise argparse.ArgumentTypeError(f"must be zero or positive, got {text}")
    return value


def positive_float(text: str) -> float:
    value = float(text)
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must be a probability in [0, 1], got {text}")
    return value


def discount(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {text}")
    return value


def grid_pos(text: str) -> GridPos:
    try:
        return GridPos.parse(text)
    except DomainError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _add_mdp_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--grid", required=True, help="Path to the FSM grid file")
    parser.add_argument("--start", type=grid_pos, help="Start tile as row,col (default: random)")
    parser.add_argument(
        "--gamma", type=discount, default=DEFAULT_GAMMA, help=f"Discount (default: {DEFAULT_GAMMA})"
    )
    parser.add_argument(
        "--tol",
        type=positive_float,
        default=DEFAULT_TOL,
        help=f"Residual tolerance (default: {DEFAULT_TOL})",
    )
    parser.add_argument(
        "--max-iters",
        type=positive_int,
        default=DEFAULT_MAX_ITERS,
        help=f"Maximum Bellman sweeps (default: {DEFAULT_MAX_ITERS})",
    )
    parser.add_argument("--p-init", type=probability, default=0.2, help="p(C=1) (default: 0.2)")
    parser.add_argument("--p10", type=probability, default=0.5, help="p(C'=1|C=0) (default: 0.5)")
    parser.add_argument("--p11", type=probability, default=0.5, help="p(C'=1|C=1) (default: 0.5)")
    parser.add_argument(
        "--max-steps",
        type=positive_int,
        default=DEFAULT_MAX_STEPS,
        help=f"Trajectory step limit (default: {DEFAULT_MAX_STEPS})",
    )


def _add_cost_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--cost",
        choices=["unit", "fsm", "fsm_sum"],
        default="fsm",
        help="Move cost: 1 per move or FSM of the entered tile (default: fsm)",
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=non_negative_int, default=0, help="Random seed (default: 0)")
    common.add_argument("--out", default="out", help="Output directory (default: out)")
    common.add_argument(
        "--log-level",
        default=default_log_level(),
        choices=LOG_LEVELS,
        help="Set the logging level (default: WARNING or $FSMTASK_LOG_LEVEL)",
    )

    parser = argparse.ArgumentParser(
        prog="fsmtask", description="Satellite tasking over food security reward grids"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    synth = subparsers.add_parser("synth", parents=[common], help="Generate a synthetic grid")
    synth.add_argument("--rows", type=positive_int, default=33, help="Grid rows (default: 33)")
    synth.add_argument("--cols", type=positive_int, default=33, help="Grid columns (default: 33)")
    synth.add_argument(
        "--pattern",
        choices=list(PATTERNS),
        default=Pattern.BLOBS,
        help="Grid pattern (default: blobs)",
    )

    tile = subparsers.add_parser("tile", parents=[common], help="Tile an image")
    tile.add_argument(
        "--image", help="Image file in any format Pillow reads (default: synthetic raster)"
    )
    tile.add_argument(
        "--synthetic",
        type=positive_int,
        default=400,
        help="Size of the synthetic raster (default: 400)",
    )
    tile.add_argument("--grid-rows", type=positive_int, default=33, help="Tile rows (default: 33)")
    tile.add_argument(
        "--grid-cols", type=positive_int, default=33, help="Tile columns (default: 33)"
    )
    tile.add_argument(
        "--tile-size", type=positive_int, default=12, help="Tile edge in pixels (default: 12)"
    )
    tile.add_argument("--resize", type=positive_int, help="Resize the image to NxN before tiling")
    tile.add_argument(
        "--upsample", type=positive_int, default=28, help="Exported tile size (default: 28)"
    )
    tile.add_argument(
        "--export-tiles", action="store_true", help="Write every upsampled tile as PPM"
    )

    ucs = subparsers.add_parser("ucs", parents=[common], help="Deterministic optimal path")
    ucs.add_argument("--grid", required=True, help="Path to the FSM grid file")
    ucs.add_argument("--start", type=grid_pos, help="Start tile as row,col (default: random)")
    ucs.add_argument("--goal", type=grid_pos, help="Goal tile (default: lowest FSM)")
    _add_cost_argument(ucs)

    mc = subparsers.add_parser("mc", parents=[common], help="Monte Carlo path probabilities")
    mc.add_argument("--grid", required=True, help="Path to the FSM grid file")
    mc.add_argument("--start", type=grid_pos, help="Start tile as row,col (default: random)")
    mc.add_argument("--iters", type=positive_int, default=100, help="Realizations (default: 100)")
    noise = mc.add_mutually_exclusive_group()
    noise.add_argument(
        "--sigma2", type=non_negative_float, help=f"Prediction variance (default: {DEFAULT_SIGMA2})"
    )
    noise.add_argument("--predictions", help="Estimate the variance from a predictions file")
    mc.add_argument(
        "--goal-mode",
        choices=[GoalMode.PER_REALIZATION, GoalMode.FIXED],
        default=GoalMode.PER_REALIZATION,
        help="Recompute the goal per realization or keep the mean grid's goal",
    )
    _add_cost_argument(mc)

    vi = subparsers.add_parser("vi", parents=[common], help="Solve the cloud-aware MDP")
    _add_mdp_arguments(vi)

    simulate = subparsers.add_parser(
        "simulate", parents=[common], help="Fly the MDP policy through realized clouds"
    )
    _add_mdp_arguments(simulate)
    _add_cost_argument(simulate)

    variance = subparsers.add_parser(
        "variance", parents=[common], help="Global prediction variance"
    )
    variance.add_argument("--predictions", required=True, help="Predictions file")

    replay = subparsers.add_parser("replay", help="Re-run from a run.meta record")
    replay.add_argument("--meta", required=True, help="Metadata record of an earlier run")
    replay.add_argument("--out", help="Output directory (default: the recorded one)")
    replay.add_argument(
        "--log-level", default=default_log_level(), choices=LOG_LEVELS, help="Set the logging level"
    )
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    recorded = {}
    for key, value in sorted(vars(args).items()):
        if key in _NOT_RECORDED or value is None:
            continue
        if isinstance(value, bool):
            recorded[key] = "true" if value else "false"
        else:
            recorded[key] = str(value)
    return RunConfig(subcommand=args.command, seed=args.seed, out_dir=args.out, args=recorded)


def _mdp_config(args: argparse.Namespace) -> MdpConfig:
    return MdpConfig(
        gamma=args.gamma,
        tol=args.tol,
        max_iters=args.max_iters,
        p_init=args.p_init,
        p10=args.p10,
        p11=args.p11,
    )


def _synth(args: argparse.Namespace, run: RunConfig) -> commands.Command:
    return commands.SynthesizeGrid(run=run, rows=args.rows, cols=args.cols, pattern=args.pattern)


def _tile(args: argparse.Namespace, run: RunConfig) -> commands.Command:
    if args.image:
        image = load_image(Path(args.image))
    else:
        image = synth_raster(args.synthetic, args.synthetic, channels=3, seed=args.seed)
    return commands.TileImage(
        run=run,
        image=image,
        grid_rows=args.grid_rows,
        grid_cols=args.grid_cols,
        tile_height=args.tile_size,
        tile_width=args.tile_size,
        resize=args.resize,
        upsample=args.upsample,
        export_tiles=args.export_tiles,
    )


def _ucs(args: argparse.Namespace, run: RunConfig) -> commands.Command:
    return commands.PlanPath(
        run=run, grid=load_grid(Path(args.grid)), start=args.start, goal=args.goal, cost=args.cost
    )


def _mc(args: argparse.Namespace, run: RunConfig) -> commands.Command:
    grid = load_grid(Path(args.grid))
    predictions = load_predictions(Path(args.predictions)) if args.predictions else None
    start = args.start if args.start is not None else random_start(grid, seeded_rng(args.seed))
    config = McConfig(
        fixed_start=start,
        iterations=args.iters,
        sigma2=args.sigma2 if args.sigma2 is not None else DEFAULT_SIGMA2,
        seed=args.seed,
        cost=args.cost,
        goal_mode=args.goal_mode,
    )
    return commands.EstimatePathProbabilities(
        run=run, grid=grid, config=config, predictions=predictions
    )


def _vi(args: argparse.Namespace, run: RunConfig) -> commands.Command:
    return commands.SolveTaskingMdp(
        run=run,
        grid=load_grid(Path(args.grid)),
        config=_mdp_config(args),
        start=args.start,
        max_steps=args.max_steps,
    )


def _simulate(args: argparse.Namespace, run: RunConfig) -> commands.Command:
    return commands.SimulateTasking(
        run=run,
        grid=load_grid(Path(args.grid)),
        config=_mdp_config(args),
        start=args.start,
        max_steps=args.max_steps,
        cost=args.cost,
    )


def _variance(args: argparse.Namespace, run: RunConfig) -> commands.Command:
    return commands.EstimateVariance(run=run, predictions=load_predictions(Path(args.predictions)))


COMMAND_BUILDERS: dict[str, Callable[[argparse.Namespace, RunConfig], commands.Command]] = {
    "synth": _synth,
    "tile": _tile,
    "ucs": _ucs,
    "mc": _mc,
    "vi": _vi,
    "simulate": _simulate,
    "variance": _variance,
}


def _replay(args: argparse.Namespace) -> int:
    try:
        run = RunConfig.from_metadata(read_text(Path(args.meta)))
    except ValueError as e:
        logger.error(f"Cannot replay {args.meta}: {e}")
        return EXIT_INPUT_ERROR
    if run.subcommand not in COMMAND_BUILDERS:
        logger.error(f"Cannot replay {args.meta}: unknown subcommand {run.subcommand!r}")
        return EXIT_INPUT_ERROR
    argv = run.to_argv(out_dir=args.out)
    logger.info(f"Replaying: {' '.join(argv)}")
    return cli_run(argv)


def cli_run(argv: Sequence[str] | None = None) -> int:
    """Run one subcommand; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse already printed the usage message
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE_ERROR

    setup_logging(args.log_level)
    if args.command == "replay":
        return _replay(args)

    run = _run_config(args)
    try:
        command = COMMAND_BUILDERS[args.command](args, run)
        bus = bootstrap(store=FileSystemArtifactStore(args.out))
        summary = bus.handle(command)
    except TaskingError as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_INPUT_ERROR
    except ValueError as e:
        logger.error(f"{args.command}: invalid parameters: {e}")
        return EXIT_USAGE_ERROR
    except OSError as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_INPUT_ERROR

    for key, value in summary.items():
        print(f"{key}: {value}")
    return EXIT_OK


def main():
    """CLI entrypoint."""
    sys.exit(cli_run())


if __name__ == "__main__":
    main()
