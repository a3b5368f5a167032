import asyncio
import inspect
from pathlib import Path

from trasonet.config import NetworkParams, ScenarioConfig


def asyncio_run(async_func):
    if not inspect.iscoroutinefunction(async_func):
        raise Exception(f"{async_func.__name__} is not async function")

    def wrapper(*args, **kwargs):
        return asyncio.run(async_func(*args, **kwargs))

    wrapper.__signature__ = inspect.signature(
        async_func
    )  # without this, fixtures are not injected

    return wrapper


def small_config(**overrides) -> ScenarioConfig:
    """
    1 km x 1 km city, streets every 200 m, one spot on the (400, 400) intersection and RSUs on
    every intersection. Runs in well under a second.
    """
    values = dict(
        map_width_m=1000.0,
        map_height_m=1000.0,
        n_vertical_streets=6,
        n_horizontal_streets=6,
        social_spots=[(400.0, 400.0)],
        n_vehicles=200,
        n_probe_vehicles=20,
        n_floating_cars=5,
        horizon_cycles=12,
        refresh_cycles=4,
        mobility_radius_m=500.0,
        n_tiers=5,
        rng_seed=7,
        network=NetworkParams(rsu_spacing_m=200.0),
    )
    values.update(overrides)
    return ScenarioConfig(**values)


def desk_config(seed: int) -> ScenarioConfig:
    """
    2 km x 2 km, 2 social spots, 2,000 vehicles over 60 cycles, one eNB and an RSU on every
    intersection.
    """
    return ScenarioConfig(
        map_width_m=2000.0,
        map_height_m=2000.0,
        n_vertical_streets=11,
        n_horizontal_streets=11,
        social_spots=[(600.0, 600.0), (1400.0, 1400.0)],
        n_vehicles=2000,
        n_probe_vehicles=200,
        n_floating_cars=20,
        horizon_cycles=60,
        mobility_radius_m=1000.0,
        rng_seed=seed,
        network=NetworkParams(rsu_spacing_m=200.0),
    )


def write_config(directory: Path, config: ScenarioConfig, name: str = "config.json") -> Path:
    path = Path(directory) / name
    path.write_text(config.model_dump_json(indent=2), encoding="utf-8")
    return path
