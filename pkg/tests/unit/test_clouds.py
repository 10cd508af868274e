"""Cloud cover realization and estimation."""

import numpy as np
import pytest

from fsmtask.domain import DimensionError, DomainError
from fsmtask.domain.mdp import (
    CLEAR_SKY,
    CloudField,
    CloudModel,
    cloud_stationary,
    estimate_cloud_model,
    realize_clouds,
)
from fsmtask.domain.synth import seeded_rng


def test_long_run_statistics_follow_the_chain():
    model = CloudModel(p_init=0.2, p_1_given_0=0.3, p_1_given_1=0.6)

    field = realize_clouds(model, 10, 10, 10_000, seeded_rng(7))

    history = np.stack(field.history)
    assert history.mean() == pytest.approx(cloud_stationary(model), abs=0.01)
    estimated = estimate_cloud_model(field)
    assert estimated.p_1_given_0 == pytest.approx(0.3, abs=0.01)
    assert estimated.p_1_given_1 == pytest.approx(0.6, abs=0.01)


def test_initial_cover_follows_p_init():
    model = CloudModel(p_init=0.2, p_1_given_0=0.5, p_1_given_1=0.5)

    field = realize_clouds(model, 200, 200, 1, seeded_rng(3))

    assert field.mask.mean() == pytest.approx(0.2, abs=0.02)
    assert estimate_cloud_model(field).p_init == pytest.approx(0.2, abs=0.02)


def test_stationary_probability():
    assert cloud_stationary(CloudModel(0.2, 0.2, 0.8)) == pytest.approx(0.5)
    assert cloud_stationary(CloudModel(0.2, 0.5, 0.5)) == pytest.approx(0.5)
    assert cloud_stationary(CloudModel(0.0, 0.1, 0.0)) == pytest.approx(0.1 / 1.1)


def test_stationary_probability_of_frozen_chain():
    with pytest.raises(DomainError):
        cloud_stationary(CloudModel(0.5, 0.0, 1.0))


def test_same_generator_state_gives_same_field():
    model = CloudModel()
    first = realize_clouds(model, 4, 5, 20, seeded_rng(11))
    second = realize_clouds(model, 4, 5, 20, seeded_rng(11))
    for a, b in zip(first.history, second.history):
        np.testing.assert_array_equal(a, b)


def test_regions_override_the_base_model():
    covered = np.zeros((6, 6), dtype=bool)
    covered[:, :3] = True
    overcast = CloudModel(1.0, 1.0, 1.0)

    field = realize_clouds(CLEAR_SKY, 6, 6, 30, seeded_rng(0), regions=[(covered, overcast)])

    for mask in field.history:
        np.testing.assert_array_equal(mask, covered)


def test_region_mask_must_match():
    with pytest.raises(DimensionError):
        realize_clouds(CLEAR_SKY, 3, 3, 2, seeded_rng(0), regions=[(np.ones((2, 2)), CLEAR_SKY)])


def test_field_holds_last_mask_beyond_horizon():
    masks = (np.zeros((2, 2), dtype=bool), np.ones((2, 2), dtype=bool))
    field = CloudField(masks)

    assert len(field) == 2
    np.testing.assert_array_equal(field.at(0), masks[0])
    np.testing.assert_array_equal(field.at(7), masks[1])


def test_field_masks_must_share_a_shape():
    with pytest.raises(DimensionError):
        CloudField((np.zeros((2, 2), dtype=bool), np.zeros((3, 2), dtype=bool)))


def test_estimate_without_departures_is_zero():
    field = CloudField(tuple(np.zeros((2, 2), dtype=bool) for _ in range(4)))
    estimated = estimate_cloud_model(field)
    assert estimated.p_1_given_1 == 0.0
    assert estimated.p_1_given_0 == 0.0


@pytest.mark.parametrize(
    "p_1_given_0, p_1_given_1",
    [(0.5, 0.5), (0.2, 0.8), (0.1, 0.3), (0.7, 0.4), (0.05, 0.9)],
)
def test_long_run_cloudy_frequency_matches_stationary_probability(p_1_given_0, p_1_given_1):
    model = CloudModel(p_init=0.5, p_1_given_0=p_1_given_0, p_1_given_1=p_1_given_1)

    field = realize_clouds(model, 5, 5, 10_000, seeded_rng(11))

    assert np.stack(field.history).mean() == pytest.approx(cloud_stationary(model), abs=0.02)
