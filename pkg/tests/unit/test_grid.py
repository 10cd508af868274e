import numpy as np
import pytest

from fsmtask.domain import DimensionError, DomainError, InputError
from fsmtask.domain.grid import (
    FSM_BINS,
    ImageRaster,
    PredictionSet,
    RewardGrid,
    bin_fsm,
    bin_grid,
    clamp_non_negative,
    estimate_global_variance,
    occlude,
    resize_bilinear,
    scale_rewards,
    tile_image,
    upsample_tile,
)
from fsmtask.domain.synth import synth_raster


class TestImageRaster:
    def test_two_dimensional_data_becomes_single_channel(self):
        img = ImageRaster(np.zeros((4, 5)))
        assert (img.height, img.width, img.channels) == (4, 5, 1)

    @pytest.mark.parametrize("channels", [0, 5])
    def test_channel_count_is_checked(self, channels):
        with pytest.raises(DimensionError):
            ImageRaster(np.zeros((2, 2, channels)))

    @pytest.mark.parametrize("bad_value", [1.5, -0.1, np.nan])
    def test_values_must_lie_in_unit_interval(self, bad_value):
        data = np.zeros((2, 2))
        data[1, 1] = bad_value
        with pytest.raises(DomainError):
            ImageRaster(data)

    def test_data_is_read_only(self):
        img = ImageRaster(np.zeros((2, 2, 3)))
        with pytest.raises(ValueError):
            img.data[0, 0, 0] = 1.0


class TestRewardGrid:
    def test_extrema_follow_values(self):
        grid = RewardGrid.from_rows([[0.3, -1.0], [2.5, 0.0]])
        assert grid.value_min == -1.0
        assert grid.value_max == 2.5
        assert grid.shape == (2, 2)

    def test_rejects_non_finite_values(self):
        with pytest.raises(DomainError):
            RewardGrid.from_rows([[0.0, np.inf]])

    def test_rejects_vectors(self):
        with pytest.raises(DimensionError):
            RewardGrid(np.zeros(3))

    def test_values_cannot_be_mutated(self):
        grid = RewardGrid.from_rows([[0.0, 1.0]])
        with pytest.raises(ValueError):
            grid.values[0, 0] = 5.0


class TestTiling:
    def test_default_grid_is_cut_from_centered_crop(self):
        img = synth_raster(400, 400, channels=3, seed=1)

        tiles = tile_image(img, 33, 33, 12, 12)

        assert len(tiles) == 33 * 33
        assert (tiles.offset_row, tiles.offset_col) == (2, 2)
        np.testing.assert_array_equal(tiles.tile(0, 0).data, img.data[2:14, 2:14])
        np.testing.assert_array_equal(tiles.tile(32, 32).data, img.data[386:398, 386:398])

    def test_origin_reports_pixel_position(self):
        tiles = tile_image(ImageRaster(np.zeros((10, 13))), 2, 3, 4, 4)
        assert (tiles.offset_row, tiles.offset_col) == (1, 0)
        assert tiles.origin(1, 2) == (5, 8)

    def test_tiles_must_fit(self):
        with pytest.raises(DimensionError):
            tile_image(ImageRaster(np.zeros((10, 10))), 3, 3, 4, 4)

    def test_upsample_defaults_to_model_input_size(self):
        tile = ImageRaster(np.full((12, 12, 3), 0.25))
        upsampled = upsample_tile(tile)
        assert (upsampled.height, upsampled.width, upsampled.channels) == (28, 28, 3)
        np.testing.assert_allclose(upsampled.data, 0.25)

    def test_every_tile_matches_the_index_map(self):
        size = 400
        index_map = np.arange(size * size, dtype=float).reshape(size, size)
        img = ImageRaster(index_map / (size * size - 1))
        rows = np.arange(12)[:, None]
        cols = np.arange(12)[None, :]

        tiles = tile_image(img, 33, 33, 12, 12)

        for r in range(33):
            for c in range(33):
                tile = tiles.tile(r, c)
                indices = np.rint(tile.data[:, :, 0] * (size * size - 1)).astype(int)
                expected = (2 + 12 * r + rows) * size + (2 + 12 * c + cols)
                np.testing.assert_array_equal(indices, expected)
                upsampled = upsample_tile(tile)
                assert upsampled.data.shape == (28, 28, 1)
                assert upsampled.data[0, 0, 0] == tile.data[0, 0, 0]
                assert upsampled.data[27, 27, 0] == tile.data[11, 11, 0]


class TestResize:
    def test_corners_are_preserved_and_center_interpolated(self):
        img = ImageRaster(np.array([[0.0, 1.0], [1.0, 0.0]]))

        resized = resize_bilinear(img, 3, 3)

        values = resized.data[:, :, 0]
        assert values[0, 0] == 0.0
        assert values[0, 2] == 1.0
        assert values[2, 0] == 1.0
        assert values[1, 1] == pytest.approx(0.5)
        assert values[0, 1] == pytest.approx(0.5)

    def test_same_size_is_identity(self):
        img = synth_raster(5, 7, channels=2, seed=3)
        np.testing.assert_allclose(resize_bilinear(img, 5, 7).data, img.data)

    def test_rejects_empty_output(self):
        with pytest.raises(DimensionError):
            resize_bilinear(ImageRaster(np.zeros((2, 2))), 0, 4)

    def test_column_is_interpolated_between_its_ends(self):
        img = ImageRaster(np.array([[0.0], [1.0]]))

        resized = resize_bilinear(img, 3, 1)

        np.testing.assert_allclose(resized.data[:, 0, 0], [0.0, 0.5, 1.0])


class TestBinning:
    @pytest.mark.parametrize(
        "value, expected",
        [
            (0.0, 0),
            (0.05, 1),
            (0.1, 2),
            (0.15, 2),
            (0.2, 3),
            (0.3, 4),
            (0.4, 5),
            (2.5, 5),
        ],
    )
    def test_bin_edges(self, value, expected):
        assert bin_fsm(value).index == expected

    @pytest.mark.parametrize("value", [-0.01, np.nan, np.inf])
    def test_rejects_values_outside_domain(self, value):
        with pytest.raises(DomainError):
            bin_fsm(value)

    def test_bins_agree_with_contains(self):
        for value in np.linspace(0.0, 0.6, 121):
            found = bin_fsm(float(value))
            assert found.contains(float(value))
            assert sum(b.contains(float(value)) for b in FSM_BINS) == 1

    def test_bin_grid(self):
        grid = RewardGrid.from_rows([[0.0, 0.15], [0.35, 1.0]])
        np.testing.assert_array_equal(bin_grid(grid), [[0, 2], [4, 5]])


class TestScaleRewards:
    def test_affine_onto_unit_interval(self):
        grid = RewardGrid.from_rows([[0.0, 2.0], [4.0, 8.0]])

        scaled = scale_rewards(grid)

        assert not scaled.degenerate
        np.testing.assert_allclose(scaled.grid.values, [[0.0, 0.25], [0.5, 1.0]])

    def test_invert_reverses_order(self):
        grid = RewardGrid.from_rows([[0.0, 2.0], [4.0, 8.0]])
        inverted = scale_rewards(grid, invert=True).grid
        np.testing.assert_allclose(inverted.values, [[1.0, 0.75], [0.5, 0.0]])

    def test_inverting_twice_restores_scaled_grid(self):
        grid = RewardGrid.from_rows([[0.3, 0.7, 0.1], [0.05, 0.9, 0.4]])

        twice = scale_rewards(scale_rewards(grid, invert=True).grid, invert=True).grid

        assert twice.values == pytest.approx(scale_rewards(grid).grid.values)

    def test_constant_grid_is_degenerate(self):
        scaled = scale_rewards(RewardGrid(np.full((2, 3), 0.4)), invert=True)
        assert scaled.degenerate
        np.testing.assert_array_equal(scaled.grid.values, np.full((2, 3), 0.5))


class TestOcclude:
    def test_cloudy_tiles_read_zero(self):
        grid = RewardGrid.from_rows([[0.2, 0.4], [0.6, 0.8]])
        occluded = occlude(grid, np.array([[True, False], [False, True]]))
        np.testing.assert_array_equal(occluded.values, [[0.0, 0.4], [0.6, 0.0]])

    def test_mask_shape_must_match(self):
        grid = RewardGrid.from_rows([[0.2, 0.4]])
        with pytest.raises(DimensionError):
            occlude(grid, np.zeros((2, 1), dtype=bool))


class TestGlobalVariance:
    def test_mean_of_unbiased_per_image_variances(self):
        preds = PredictionSet.from_mapping({"a": [0.0, 2.0], "b": [1.0, 3.0, 5.0]})
        assert estimate_global_variance(preds) == pytest.approx(3.0)

    def test_single_prediction_names_the_image(self):
        preds = PredictionSet.from_mapping({"a": [0.0, 2.0], "lonely": [1.0]})

        with pytest.raises(InputError) as excinfo:
            estimate_global_variance(preds)

        assert excinfo.value.image_id == "lonely"
        assert "lonely" in str(excinfo.value)

    def test_empty_set_is_rejected(self):
        with pytest.raises(InputError):
            estimate_global_variance(PredictionSet(()))

    @pytest.mark.parametrize(
        "predictions, expected",
        [([1.0, 1.0, 1.0], 0.0), ([0.0, 2.0], 2.0), ([1.0, 2.0, 3.0, 4.0, 5.0], 2.5)],
    )
    def test_worked_examples(self, predictions, expected):
        preds = PredictionSet.from_mapping({"img": predictions})
        assert estimate_global_variance(preds) == pytest.approx(expected)

    def test_shift_and_scale_behaviour_on_random_sets(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            mapping = {
                f"img{i}": rng.random(int(rng.integers(3, 9)))
                for i in range(int(rng.integers(1, 6)))
            }
            base = estimate_global_variance(PredictionSet.from_mapping(mapping))
            shifts = {name: rng.uniform(-1.0, 1.0) for name in mapping}
            shifted = {name: values + shifts[name] for name, values in mapping.items()}
            s = rng.uniform(0.5, 2.0)
            scaled = {name: np.sqrt(s) * values for name, values in mapping.items()}

            assert estimate_global_variance(PredictionSet.from_mapping(shifted)) == pytest.approx(
                base, rel=1e-12, abs=1e-15
            )
            assert estimate_global_variance(PredictionSet.from_mapping(scaled)) == pytest.approx(
                s * base, rel=1e-12
            )


class TestClampNonNegative:
    def test_negative_tiles_become_zero(self):
        grid = RewardGrid.from_rows([[0.3, -0.05], [0.0, -0.2]])

        clamped = clamp_non_negative(grid)

        np.testing.assert_array_equal(clamped.values, [[0.3, 0.0], [0.0, 0.0]])
        assert grid.value_min == -0.2

    def test_non_negative_grid_is_returned_unchanged(self):
        grid = RewardGrid.from_rows([[0.3, 0.0]])
        assert clamp_non_negative(grid) is grid
