import json

import pytest

from trasonet.config import CompletionParams, ScenarioConfig, load_config, revalidate
from trasonet.exception import ConfigurationException
from .utils import small_config, write_config


def test_defaults_follow_the_case_study():
    config = ScenarioConfig()

    assert config.n_vehicles == 20_000
    assert len(config.social_spots) == 5
    assert config.n_vertical_streets == config.n_horizontal_streets == 20
    assert config.n_floating_cars == 260
    assert config.duty_cycle_s == 30.0
    assert config.network.enb_capacity_mbps == 100.0
    assert config.network.rsu_radius_m == 200.0
    assert config.completion.speed_bounds == (0.0, 80.0)


def test_speed_bounds_follow_the_speed_limit():
    config = ScenarioConfig(speed_limit_kmh=60.0)
    assert config.completion.speed_bounds == (0.0, 60.0)

    explicit = ScenarioConfig(speed_limit_kmh=60.0, completion=CompletionParams(speed_bounds=(0.0, 50.0)))
    assert explicit.completion.speed_bounds == (0.0, 50.0)


def test_load_config(tmp_path):
    path = write_config(tmp_path, small_config())
    config = load_config(path)

    assert config == small_config()


def test_malformed_json_is_a_configuration_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{ not json", encoding="utf-8")

    with pytest.raises(ConfigurationException):
        load_config(path)


def test_missing_config_is_a_configuration_error(tmp_path):
    with pytest.raises(ConfigurationException):
        load_config(tmp_path / "missing.json")


def test_unknown_keys_are_rejected():
    with pytest.raises(ConfigurationException):
        ScenarioConfig.from_json(json.dumps({"n_vehicles": 10, "n_probe_vehicles": 5, "n_floating_cars": 1, "colour": "red"}))


@pytest.mark.parametrize(
    "fields",
    [
        {"n_probe_vehicles": 0, "n_floating_cars": 0},
        {"n_vehicles": 10, "n_probe_vehicles": 10, "n_floating_cars": 1},
        {"social_spots": []},
        {"social_spots": [(-1.0, 5.0)]},
        {"gamma": 0.0},
        {"n_vertical_streets": 1},
        {"service_mix": 1.5},
        {"duty_cycle_s": 0.0},
        {"rng_seed": -1},
    ],
)
def test_invalid_configs(fields):
    text = json.dumps(fields)
    with pytest.raises(ConfigurationException):
        ScenarioConfig.from_json(text)


def test_network_params_must_be_positive():
    with pytest.raises(ConfigurationException):
        ScenarioConfig.from_json(json.dumps({"network": {"rsu_capacity_mbps": 0}}))


def test_revalidate_catches_unvalidated_copies():
    broken = small_config().model_copy(update={"n_vehicles": 3})

    with pytest.raises(ConfigurationException):
        revalidate(broken)
