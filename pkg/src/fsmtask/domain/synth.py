"""Seeded synthetic inputs standing in for restricted survey-derived grids."""

from typing import Literal, TypeAlias

import numpy as np

from .errors import DimensionError, DomainError
from .grid import ImageRaster, RewardGrid


class Pattern:
    GRADIENT: Literal["gradient"] = "gradient"
    BLOBS: Literal["blobs"] = "blobs"
    CHECKER: Literal["checker"] = "checker"


PatternType: TypeAlias = Literal["gradient", "blobs", "checker"]

PATTERNS = (Pattern.GRADIENT, Pattern.BLOBS, Pattern.CHECKER)


def seeded_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def _gradient(rows: int, cols: int) -> np.ndarray:
    size = rows * cols
    if size == 1:
        return np.zeros((1, 1))
    return (np.arange(size) / (size - 1)).reshape(rows, cols)


def _checker(rows: int, cols: int) -> np.ndarray:
    row_idx, col_idx = np.indices((rows, cols))
    return ((row_idx + col_idx) % 2).astype(float)


def _blobs(rows: int, cols: int, seed: int) -> np.ndarray:
    rng = seeded_rng(seed)
    count = max(1, min(rows, cols) // 3)
    row_idx, col_idx = np.indices((rows, cols))
    values = np.zeros((rows, cols))
    for _ in range(count):
        center_row = rng.uniform(0, rows)
        center_col = rng.uniform(0, cols)
        width = 0.5 + rng.uniform(0.1, 0.3) * max(rows, cols)
        amplitude = rng.uniform(0.5, 1.0)
        distance2 = (row_idx - center_row) ** 2 + (col_idx - center_col) ** 2
        values += amplitude * np.exp(-distance2 / (2.0 * width**2))
    return values


def synth_grid(rows: int, cols: int, pattern: str, seed: int = 0) -> RewardGrid:
    """Build a deterministic synthetic reward grid.

    ``gradient`` is a row-major linear ramp from 0 to 1, ``checker``
    alternates 0 and 1 starting with 0, ``blobs`` sums seeded Gaussian bumps.

    Raises:
        DimensionError: If rows or cols is smaller than 1
        DomainError: If the pattern is unknown
    """
    if rows < 1 or cols < 1:
        raise DimensionError(f"grid must be at least 1x1, got {rows}x{cols}")
    if pattern == Pattern.GRADIENT:
        return RewardGrid(_gradient(rows, cols))
    if pattern == Pattern.CHECKER:
        return RewardGrid(_checker(rows, cols))
    if pattern == Pattern.BLOBS:
        return RewardGrid(_blobs(rows, cols, seed))
    raise DomainError(f"Invalid pattern: {pattern}. Must be one of {list(PATTERNS)}")


def synth_raster(height: int, width: int, channels: int = 3, seed: int = 0) -> ImageRaster:
    """Uniform noise raster, e.g. a stand-in 400x400 satellite image."""
    return ImageRaster(seeded_rng(seed).random((height, width, channels)))
