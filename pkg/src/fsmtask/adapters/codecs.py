"""Text and binary file formats.

Grids are UTF-8 text: ``rows cols`` on the first line, then one line of
space-separated reals per row. Floats are written with ``repr`` so they
read back exactly.
"""

import io
import logging
from pathlib import Path as FilePath
from typing import Iterable

import numpy as np
from PIL import Image

from ..domain import InputError
from ..domain.grid import ImagePredictions, ImageRaster, PredictionSet, RewardGrid
from ..domain.mdp import NO_ACTION, Action, CloudField, MdpState, Policy, Trajectory
from ..domain.search import GridPos, Path

logger = logging.getLogger(__name__)


def read_text(path: FilePath) -> str:
    try:
        return FilePath(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise InputError(f"file not found: {path}", path=str(path)) from None
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"cannot read {path}: {e}", path=str(path)) from e


def _format_rows(rows: Iterable[Iterable[object]]) -> str:
    return "".join(" ".join(str(value) for value in row) + "\n" for row in rows)


def format_grid(grid: RewardGrid) -> str:
    lines = f"{grid.rows} {grid.cols}\n"
    return lines + _format_rows([repr(float(value)) for value in row] for row in grid.values)


def format_int_grid(values: np.ndarray) -> str:
    rows, cols = values.shape
    return f"{rows} {cols}\n" + _format_rows((int(value) for value in row) for row in values)


def parse_grid(text: str, source: str = "<grid>") -> RewardGrid:
    """Parse the grid text format.

    Raises:
        InputError: If the header or a row is malformed
    """
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise InputError(f"{source}: empty grid file", path=source)
    try:
        rows, cols = (int(token) for token in lines[0].split())
    except ValueError:
        raise InputError(f"{source}: first line must be 'rows cols'", path=source) from None
    if rows < 1 or cols < 1:
        raise InputError(f"{source}: grid must be at least 1x1", path=source)
    if len(lines) - 1 != rows:
        raise InputError(f"{source}: expected {rows} rows, found {len(lines) - 1}", path=source)

    values = []
    for number, line in enumerate(lines[1:], start=2):
        try:
            row = [float(token) for token in line.split()]
        except ValueError:
            raise InputError(f"{source}: line {number} is not numeric", path=source) from None
        if len(row) != cols:
            raise InputError(
                f"{source}: line {number} has {len(row)} values, expected {cols}", path=source
            )
        values.append(row)
    try:
        return RewardGrid(np.array(values))
    except ValueError as e:
        raise InputError(f"{source}: {e}", path=source) from e


def load_grid(path: FilePath) -> RewardGrid:
    grid = parse_grid(read_text(path), str(path))
    logger.debug("loaded %dx%d grid from %s", grid.rows, grid.cols, path)
    return grid


def format_predictions(preds: PredictionSet) -> str:
    return _format_rows(
        [image.image_id, *(repr(float(value)) for value in image.values)] for image in preds.images
    )


def parse_predictions(text: str, source: str = "<predictions>") -> PredictionSet:
    """Parse ``image_id v1 v2 ... vT`` lines.

    Raises:
        InputError: If a value is not numeric or an image has no values
    """
    images = []
    for number, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        image_id, raw_values = tokens[0], tokens[1:]
        try:
            values = [float(token) for token in raw_values]
        except ValueError:
            raise InputError(
                f"{source}: line {number} ({image_id}) is not numeric",
                image_id=image_id,
                path=source,
            ) from None
        images.append(ImagePredictions(image_id, np.array(values)))
    preds = PredictionSet(tuple(images))
    preds.validate()
    return preds


def load_predictions(path: FilePath) -> PredictionSet:
    preds = parse_predictions(read_text(path), str(path))
    logger.debug("loaded predictions for %d image(s) from %s", len(preds.images), path)
    return preds


def format_path(path: Path) -> str:
    return f"cost {path.total_cost!r}\n" + format_positions(path.positions)


def format_positions(positions: Iterable[GridPos]) -> str:
    return _format_rows((pos.row, pos.col) for pos in positions)


def parse_path(text: str, source: str = "<path>") -> Path:
    lines = [line.split() for line in text.splitlines() if line.strip()]
    try:
        if not lines or lines[0][0] != "cost":
            raise ValueError
        total_cost = float(lines[0][1])
        positions = tuple(GridPos(int(row), int(col)) for row, col in lines[1:])
    except (ValueError, IndexError):
        raise InputError(f"{source}: malformed path file", path=source) from None
    return Path(positions, total_cost)


def format_policy(policy: Policy) -> str:
    """``row col cloud action`` for every state that has an action."""
    rows, cols, _ = policy.actions.shape
    lines = []
    for row in range(rows):
        for col in range(cols):
            for cloud in (0, 1):
                action = int(policy.actions[row, col, cloud])
                if action != NO_ACTION:
                    lines.append((row, col, cloud, Action(action).label))
    return _format_rows(lines)


def parse_policy(text: str, rows: int, cols: int, source: str = "<policy>") -> Policy:
    actions = np.full((rows, cols, 2), NO_ACTION, dtype=np.int64)
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            row, col, cloud, label = line.split()
            actions[int(row), int(col), int(cloud)] = Action.from_label(label)
        except (ValueError, IndexError):
            raise InputError(f"{source}: line {number} is malformed", path=source) from None
    return Policy(actions)


def format_cloud_field(field: CloudField) -> str:
    """One 0/1 mask per timestep, masks separated by blank lines."""
    return "\n".join(
        _format_rows((int(cell) for cell in row) for row in mask) for mask in field.history
    )


def parse_cloud_field(text: str, source: str = "<clouds>") -> CloudField:
    masks = []
    for block in text.strip().split("\n\n"):
        try:
            rows = [[int(cell) for cell in line.split()] for line in block.splitlines()]
            masks.append(np.array(rows))
        except ValueError:
            raise InputError(f"{source}: malformed cloud mask", path=source) from None
    try:
        return CloudField(tuple(mask.astype(bool) for mask in masks))
    except ValueError as e:
        raise InputError(f"{source}: {e}", path=source) from e


def format_trajectory(trajectory: Trajectory) -> str:
    header = (
        f"reward {trajectory.total_reward!r}\n"
        f"discounted {trajectory.discounted_reward!r}\n"
    )
    return header + _format_rows(_state_row(state) for state in trajectory.states)


def _state_row(state: MdpState) -> tuple[int, int, int]:
    return state.pos.row, state.pos.col, state.cloud


# full-scale sample value per Pillow mode
MODE_MAX_VALUES = {
    "1": 1,
    "L": 255,
    "LA": 255,
    "RGB": 255,
    "RGBA": 255,
    "I": 65535,
    "I;16": 65535,
    "I;16B": 65535,
    "I;16L": 65535,
}


def decode_image(data: bytes, source: str = "<image>") -> ImageRaster:
    """Decode any image Pillow can read into a raster scaled to [0, 1].

    Palette and other color modes are converted to RGB first.

    Raises:
        InputError: If Pillow cannot identify or fully decode the image
    """
    try:
        with Image.open(io.BytesIO(data)) as img:
            img.load()
            decoded = img if img.mode in MODE_MAX_VALUES else img.convert("RGB")
            pixels = np.asarray(decoded, dtype=float) / MODE_MAX_VALUES[decoded.mode]
    except (OSError, ValueError, Image.DecompressionBombError) as e:
        raise InputError(f"{source}: cannot decode image ({e})", path=source) from None
    logger.debug("decoded %s image %s (%s)", decoded.mode, decoded.size, source)
    return ImageRaster(pixels)


def load_image(path: FilePath) -> ImageRaster:
    try:
        data = FilePath(path).read_bytes()
    except FileNotFoundError:
        raise InputError(f"file not found: {path}", path=str(path)) from None
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}", path=str(path)) from e
    return decode_image(data, str(path))


def encode_ppm(pixels: np.ndarray) -> bytes:
    """Encode an ``(height, width, 3)`` uint8 array as binary PPM."""
    height, width, _ = pixels.shape
    header = f"P6\n{width} {height}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(pixels, dtype=np.uint8).tobytes()


def raster_to_ppm(img: ImageRaster) -> bytes:
    """Encode a raster as PPM; one channel becomes gray, a fourth is dropped."""
    data = img.data
    if img.channels == 1:
        data = np.repeat(data, 3, axis=2)
    elif img.channels == 2:
        data = np.concatenate([data, data[:, :, :1]], axis=2)
    pixels = np.floor(data[:, :, :3] * 255.0 + 0.5).astype(np.uint8)
    return encode_ppm(pixels)
