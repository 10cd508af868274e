"""Heatmap export as binary portable pixmaps.

Values are normalized to t in [0, 1] by the matrix extrema (a constant
matrix maps to t = 0), then ramp index k = floor(255 * t + 0.5) is
colored (k, 0, 255 - k): blue for the minimum, red for the maximum.
Path tiles are overdrawn in green.
"""

import logging
from pathlib import Path as FilePath
from typing import Sequence

import numpy as np

from ..domain.grid import RewardGrid
from ..domain.search import GridPos, Path
from ..domain.stochastic import PathProbabilityMatrix
from .codecs import encode_ppm

logger = logging.getLogger(__name__)


PATH_COLOR = (0, 255, 0)


def ramp_indices(values: np.ndarray) -> np.ndarray:
    low, high = float(values.min()), float(values.max())
    if high == low:
        return np.zeros(values.shape, dtype=np.int64)
    t = (values - low) / (high - low)
    return np.floor(255.0 * t + 0.5).astype(np.int64)


def ramp_colors(indices: np.ndarray) -> np.ndarray:
    pixels = np.zeros((*indices.shape, 3), dtype=np.uint8)
    pixels[..., 0] = indices
    pixels[..., 2] = 255 - indices
    return pixels


def heatmap_pixels(
    matrix: RewardGrid | PathProbabilityMatrix, path: Path | Sequence[GridPos] | None = None
) -> np.ndarray:
    values = matrix.probs if isinstance(matrix, PathProbabilityMatrix) else matrix.values
    pixels = ramp_colors(ramp_indices(values))
    if path is not None:
        positions = path.positions if isinstance(path, Path) else path
        for pos in positions:
            pixels[pos.row, pos.col] = PATH_COLOR
    return pixels


def render_heatmap(
    matrix: RewardGrid | PathProbabilityMatrix,
    path: Path | Sequence[GridPos] | None = None,
    out_file: FilePath | None = None,
) -> bytes:
    """Render one pixel per tile; writes to ``out_file`` when given.

    Raises:
        OSError: If ``out_file`` cannot be written
    """
    data = encode_ppm(heatmap_pixels(matrix, path))
    if out_file is not None:
        FilePath(out_file).write_bytes(data)
        logger.debug("wrote heatmap %s", out_file)
    return data
