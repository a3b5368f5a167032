import logging
import math
from typing import List

import numpy as np

from trasonet.config import Position, ScenarioConfig
from trasonet.scenario.models import Deployment, RoadNetwork

logger = logging.getLogger(__name__)


def enb_grid(config: ScenarioConfig) -> List[Position]:
    spacing = config.network.enb_grid_spacing_m
    nx = max(1, round(config.map_width_m / spacing))
    ny = max(1, round(config.map_height_m / spacing))
    return [
        ((i + 0.5) * config.map_width_m / nx, (j + 0.5) * config.map_height_m / ny)
        for j in range(ny)
        for i in range(nx)
    ]


def rsu_layout(config: ScenarioConfig, network: RoadNetwork) -> List[Position]:
    """
    RSUs every `rsu_spacing_m` along each street, kept where they fall within
    `rsu_zone_radius_m` of some social spot.
    """
    params = config.network
    spots = np.array(config.social_spots, dtype=float)
    candidates = set()
    for x in network.vertical_streets_m:
        for y in np.arange(0.0, network.map_height_m + 1e-9, params.rsu_spacing_m):
            candidates.add((round(float(x), 6), round(float(y), 6)))
    for y in network.horizontal_streets_m:
        for x in np.arange(0.0, network.map_width_m + 1e-9, params.rsu_spacing_m):
            candidates.add((round(float(x), 6), round(float(y), 6)))

    result = []
    for position in sorted(candidates):
        d = np.hypot(spots[:, 0] - position[0], spots[:, 1] - position[1])
        if d.min() <= params.rsu_zone_radius_m:
            result.append(position)
    return result


def build_deployment(config: ScenarioConfig, network: RoadNetwork) -> Deployment:
    """
    Place eNBs on a regular grid over the map and RSUs along the streets around the social spots.

    Explicit `network.rsu_positions` in the config replace the generated RSU layout.
    """
    if config.network.rsu_positions is not None:
        rsus = [tuple(p) for p in config.network.rsu_positions]
    else:
        rsus = rsu_layout(config, network)
    deployment = Deployment(
        enb_positions=enb_grid(config),
        rsu_positions=rsus,
        rsu_radius_m=config.network.rsu_radius_m,
    )
    coverage = len(rsus) * math.pi * config.network.rsu_radius_m**2 / (config.map_width_m * config.map_height_m)
    logger.info(
        f"Deployment has {len(deployment.enb_positions)} eNBs and {len(rsus)} RSUs (nominal coverage {coverage:.2f})"
    )
    return deployment
