import numpy as np
import pytest

from fsmtask.domain import DimensionError, DomainError
from fsmtask.domain.synth import PATTERNS, synth_grid, synth_raster


def test_gradient_ramps_row_major():
    grid = synth_grid(2, 3, "gradient")
    np.testing.assert_allclose(grid.values, [[0.0, 0.2, 0.4], [0.6, 0.8, 1.0]])


def test_checker_starts_with_zero():
    grid = synth_grid(3, 3, "checker")
    np.testing.assert_array_equal(grid.values, [[0, 1, 0], [1, 0, 1], [0, 1, 0]])


def test_blobs_depend_on_seed():
    first = synth_grid(8, 8, "blobs", seed=1)
    np.testing.assert_array_equal(first.values, synth_grid(8, 8, "blobs", seed=1).values)
    assert not np.array_equal(first.values, synth_grid(8, 8, "blobs", seed=2).values)
    assert first.value_min >= 0.0


@pytest.mark.parametrize("pattern", PATTERNS)
def test_every_pattern_fills_the_grid(pattern):
    grid = synth_grid(33, 33, pattern, seed=0)
    assert grid.shape == (33, 33)


def test_single_tile_gradient():
    assert synth_grid(1, 1, "gradient").value_at(0, 0) == 0.0


def test_unknown_pattern():
    with pytest.raises(DomainError):
        synth_grid(3, 3, "stripes")


def test_empty_grid():
    with pytest.raises(DimensionError):
        synth_grid(0, 3, "gradient")


def test_raster_is_a_valid_image():
    img = synth_raster(40, 30, channels=4, seed=2)
    assert (img.height, img.width, img.channels) == (40, 30, 4)
    assert 0.0 <= img.data.min() and img.data.max() <= 1.0
