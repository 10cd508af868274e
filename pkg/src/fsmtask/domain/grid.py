"""Reward grid domain model.

Rasters, tilings and reward grids are immutable value objects backed by
read-only numpy arrays, so every operation here is a pure function.
"""

import bisect
import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionError, DomainError, InputError

logger = logging.getLogger(__name__)


DEFAULT_TILE_SIZE = 28


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class ImageRaster:
    """Row-major image with 1 to 4 channels and values in [0, 1].

    ``data`` is stored with shape ``(height, width, channels)``; a 2-d array
    is accepted and treated as a single channel.
    """

    data: np.ndarray

    MAX_CHANNELS = 4

    def __post_init__(self) -> None:
        data = np.array(self.data, dtype=float)
        if data.ndim == 2:
            data = data[:, :, np.newaxis]
        if data.ndim != 3:
            raise DimensionError(f"raster must be 2-d or 3-d, got {data.ndim}-d")
        height, width, channels = data.shape
        if height < 1 or width < 1:
            raise DimensionError(f"raster is empty: {height}x{width}")
        if not 1 <= channels <= self.MAX_CHANNELS:
            raise DimensionError(
                f"raster must have 1 to {self.MAX_CHANNELS} channels, got {channels}"
            )
        if not np.all(np.isfinite(data)):
            raise DomainError("raster contains non-finite values")
        if data.min() < 0.0 or data.max() > 1.0:
            raise DomainError("raster values must lie within [0, 1]")
        object.__setattr__(self, "data", _frozen(data))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    def __repr__(self) -> str:
        return f"ImageRaster(height={self.height}, width={self.width}, channels={self.channels})"


@dataclass(frozen=True, eq=False)
class TileSet:
    """Non-overlapping tiles cut from the centered crop of an image.

    Tiles are stored row-major by grid position.
    """

    grid_rows: int
    grid_cols: int
    tile_height: int
    tile_width: int
    tiles: tuple[ImageRaster, ...]
    offset_row: int = 0
    offset_col: int = 0

    def __post_init__(self) -> None:
        if len(self.tiles) != self.grid_rows * self.grid_cols:
            raise DimensionError(
                f"expected {self.grid_rows * self.grid_cols} tiles, got {len(self.tiles)}"
            )
        for tile in self.tiles:
            if (tile.height, tile.width) != (self.tile_height, self.tile_width):
                raise DimensionError("all tiles must share the same dimensions")

    def __len__(self) -> int:
        return len(self.tiles)

    def tile(self, row: int, col: int) -> ImageRaster:
        return self.tiles[row * self.grid_cols + col]

    def origin(self, row: int, col: int) -> tuple[int, int]:
        """Pixel position of tile (row, col)'s top-left corner in the source image."""
        return (
            self.offset_row + row * self.tile_height,
            self.offset_col + col * self.tile_width,
        )


@dataclass(frozen=True, eq=False)
class RewardGrid:
    """Dense matrix of per-tile FSM values.

    ``value_min`` and ``value_max`` are derived from ``values`` and always
    equal its true extrema.
    """

    values: np.ndarray
    value_min: float = field(init=False)
    value_max: float = field(init=False)

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.size == 0:
            raise DimensionError(
                f"reward grid must be a non-empty matrix, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("reward grid contains non-finite values")
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "value_min", float(values.min()))
        object.__setattr__(self, "value_max", float(values.max()))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "RewardGrid":
        return cls(np.asarray(rows, dtype=float))

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def value_at(self, row: int, col: int) -> float:
        return float(self.values[row, col])

    def __repr__(self) -> str:
        return (
            f"RewardGrid(rows={self.rows}, cols={self.cols}, "
            f"value_min={self.value_min}, value_max={self.value_max})"
        )


@dataclass(frozen=True, eq=False)
class ImagePredictions:
    image_id: str
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _frozen(np.array(self.values, dtype=float).ravel()))


@dataclass(frozen=True, eq=False)
class PredictionSet:
    """Per-image collections of per-tile FSM predictions."""

    images: tuple[ImagePredictions, ...]

    @classmethod
    def from_mapping(cls, mapping: dict[str, Sequence[float]]) -> "PredictionSet":
        return cls(
            tuple(ImagePredictions(image_id, values) for image_id, values in mapping.items())
        )

    def validate(self) -> bool:
        """Validate the prediction set.

        Raises:
            InputError: If the set is empty, an image has fewer than two
                predictions or a prediction is not finite
        """
        if not self.images:
            raise InputError("prediction set contains no images")
        for image in self.images:
            if image.values.size < 2:
                raise InputError(
                    f"image {image.image_id!r} has {image.values.size} tile prediction(s), "
                    "at least 2 are required",
                    image_id=image.image_id,
                )
            if not np.all(np.isfinite(image.values)):
                raise InputError(
                    f"image {image.image_id!r} has non-finite predictions",
                    image_id=image.image_id,
                )
        return True


@dataclass(frozen=True)
class FsmBin:
    """Classification bin for a food security metric.

    Bin 0 is the singleton {0}; the others are lower-inclusive,
    upper-exclusive, and the last one is unbounded.
    """

    index: int
    lower: float
    upper: float

    def contains(self, value: float) -> bool:
        if self.index == 0:
            return value == 0.0
        if self.index == 1:
            return self.lower < value < self.upper
        return self.lower <= value < self.upper


FSM_BINS: tuple[FsmBin, ...] = (
    FsmBin(0, 0.0, 0.0),
    FsmBin(1, 0.0, 0.1),
    FsmBin(2, 0.1, 0.2),
    FsmBin(3, 0.2, 0.3),
    FsmBin(4, 0.3, 0.4),
    FsmBin(5, 0.4, math.inf),
)

_BIN_EDGES = [0.1, 0.2, 0.3, 0.4]


class ScaledRewards(NamedTuple):
    grid: RewardGrid
    degenerate: bool


def _sample_coords(size_in: int, size_out: int) -> np.ndarray:
    # corner-aligned: first and last output samples sit on the first and last input pixels
    if size_out == 1 or size_in == 1:
        return np.zeros(size_out)
    return np.arange(size_out) * (size_in - 1) / (size_out - 1)


def resize_bilinear(img: ImageRaster, out_height: int, out_width: int) -> ImageRaster:
    """Resize a raster with corner-aligned bilinear interpolation.

    Raises:
        DimensionError: If a requested dimension is smaller than 1
    """
    if out_height < 1 or out_width < 1:
        raise DimensionError(f"output size must be at least 1x1, got {out_height}x{out_width}")

    ys = _sample_coords(img.height, out_height)
    xs = _sample_coords(img.width, out_width)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, img.height - 1)
    x1 = np.minimum(x0 + 1, img.width - 1)
    wy = (ys - y0)[:, np.newaxis, np.newaxis]
    wx = (xs - x0)[np.newaxis, :, np.newaxis]

    data = img.data
    top = data[y0][:, x0] * (1.0 - wx) + data[y0][:, x1] * wx
    bottom = data[y1][:, x0] * (1.0 - wx) + data[y1][:, x1] * wx
    resized = top * (1.0 - wy) + bottom * wy
    return ImageRaster(np.clip(resized, 0.0, 1.0))


def tile_image(
    img: ImageRaster, grid_rows: int, grid_cols: int, tile_height: int, tile_width: int
) -> TileSet:
    """Cut a ``grid_rows`` x ``grid_cols`` grid of tiles from the centered crop of ``img``.

    The crop starts at ``((H - grid_rows*tile_height) // 2, (W - grid_cols*tile_width) // 2)``.

    Raises:
        DimensionError: If the grid does not fit into the image
    """
    if min(grid_rows, grid_cols, tile_height, tile_width) < 1:
        raise DimensionError("grid and tile dimensions must be at least 1")
    crop_height = grid_rows * tile_height
    crop_width = grid_cols * tile_width
    if crop_height > img.height or crop_width > img.width:
        raise DimensionError(
            f"{grid_rows}x{grid_cols} grid of {tile_height}x{tile_width} tiles "
            f"does not fit into a {img.height}x{img.width} image"
        )

    offset_row = (img.height - crop_height) // 2
    offset_col = (img.width - crop_width) // 2
    tiles = []
    for row in range(grid_rows):
        top = offset_row + row * tile_height
        for col in range(grid_cols):
            left = offset_col + col * tile_width
            window = img.data[top : top + tile_height, left : left + tile_width]
            tiles.append(ImageRaster(window.copy()))

    logger.debug(
        "tiled %r into %d tiles at offset (%d, %d)", img, len(tiles), offset_row, offset_col
    )
    return TileSet(
        grid_rows=grid_rows,
        grid_cols=grid_cols,
        tile_height=tile_height,
        tile_width=tile_width,
        tiles=tuple(tiles),
        offset_row=offset_row,
        offset_col=offset_col,
    )


def upsample_tile(
    tile: ImageRaster,
    out_height: int = DEFAULT_TILE_SIZE,
    out_width: int = DEFAULT_TILE_SIZE,
) -> ImageRaster:
    """Upsample a tile to the model's input resolution (28x28 by default)."""
    return resize_bilinear(tile, out_height, out_width)


def bin_fsm(value: float) -> FsmBin:
    """Return the classification bin containing ``value``.

    Raises:
        DomainError: If ``value`` is negative or not finite
    """
    if not math.isfinite(value) or value < 0.0:
        raise DomainError(f"FSM value must be finite and non-negative, got {value}")
    if value == 0.0:
        return FSM_BINS[0]
    return FSM_BINS[1 + bisect.bisect_right(_BIN_EDGES, value)]


def bin_grid(grid: RewardGrid) -> np.ndarray:
    """Bin every tile of ``grid``; returns an integer matrix of bin indices."""
    return np.array(
        [[bin_fsm(float(value)).index for value in row] for row in grid.values], dtype=int
    )


def scale_rewards(grid: RewardGrid, invert: bool = False) -> ScaledRewards:
    """Map grid values affinely onto [0, 1], optionally reversing the order.

    A constant grid cannot be scaled; every value becomes 0.5 and the
    result is flagged as degenerate.
    """
    if grid.value_max == grid.value_min:
        logger.debug(
            "cannot scale constant grid (all values %s), using 0.5 everywhere", grid.value_min
        )
        return ScaledRewards(RewardGrid(np.full(grid.shape, 0.5)), True)

    scaled = (grid.values - grid.value_min) / (grid.value_max - grid.value_min)
    if invert:
        scaled = 1.0 - scaled
    return ScaledRewards(RewardGrid(scaled), False)


def clamp_non_negative(grid: RewardGrid) -> RewardGrid:
    """Replace negative tiles by 0; a grid without negatives is returned as is."""
    if grid.value_min >= 0.0:
        return grid
    return RewardGrid(np.maximum(grid.values, 0.0))


def occlude(grid: RewardGrid, mask: np.ndarray) -> RewardGrid:
    """Zero out every tile covered by clouds, as seen from the satellite."""
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != grid.shape:
        raise DimensionError(f"mask shape {mask.shape} does not match grid shape {grid.shape}")
    return RewardGrid(np.where(mask, 0.0, grid.values))


def estimate_global_variance(preds: PredictionSet) -> float:
    """Average the unbiased per-image variance of the tile predictions.

    Raises:
        InputError: If an image has fewer than two predictions
    """
    preds.validate()
    variances = [float(np.var(image.values, ddof=1)) for image in preds.images]
    return float(np.mean(variances))
