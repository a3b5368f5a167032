import logging
from typing import List

import numpy as np

from trasonet.config import ScenarioConfig, revalidate
from trasonet.models import Axis
from trasonet.scenario.models import RoadNetwork, Segment, SocialSpot

logger = logging.getLogger(__name__)


def build_road_network(config: ScenarioConfig) -> RoadNetwork:
    """
    Lay out a grid of uniformly spaced streets covering the whole map.

    Vertical blocks get the lower segment ids (street by street, bottom to top), horizontal
    blocks follow (street by street, left to right), so ids are stable for identical configs.

    :param config: Scenario definition
    :return: The road network
    """
    config = revalidate(config)

    xs = np.linspace(0.0, config.map_width_m, config.n_vertical_streets).tolist()
    ys = np.linspace(0.0, config.map_height_m, config.n_horizontal_streets).tolist()

    segments: List[Segment] = []
    for v in range(len(xs)):
        for k in range(len(ys) - 1):
            segments.append(
                Segment(
                    segment_id=len(segments),
                    axis=Axis.Vertical,
                    street_index=v,
                    block_index=k,
                    start_m=ys[k],
                    end_m=ys[k + 1],
                )
            )
    for h in range(len(ys)):
        for k in range(len(xs) - 1):
            segments.append(
                Segment(
                    segment_id=len(segments),
                    axis=Axis.Horizontal,
                    street_index=h,
                    block_index=k,
                    start_m=xs[k],
                    end_m=xs[k + 1],
                )
            )

    network = RoadNetwork(
        segments=segments,
        segment_length_m=float(np.mean([s.length_m for s in segments])),
        speed_limit_kmh=config.speed_limit_kmh,
        vertical_streets_m=xs,
        horizontal_streets_m=ys,
        map_width_m=config.map_width_m,
        map_height_m=config.map_height_m,
    )
    logger.debug(f"Built road network with {network.n_segments} segments")
    return network


def build_social_spots(config: ScenarioConfig) -> List[SocialSpot]:
    return [
        SocialSpot(position=p, mobility_radius_m=config.mobility_radius_m, n_tiers=config.n_tiers)
        for p in config.social_spots
    ]
