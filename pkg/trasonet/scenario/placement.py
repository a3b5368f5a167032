import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from trasonet.config import Position, ScenarioConfig
from trasonet.models import Role
from trasonet.scenario.models import Heading, RoadNetwork, SocialSpot, VehicleState
from trasonet.scenario.road_network import build_social_spots
from trasonet.utils.rng import spawn_generators

logger = logging.getLogger(__name__)


def tier_probabilities(spot: SocialSpot, gamma: float) -> np.ndarray:
    """
    Probability of each tier so that the areal density decays as r^(-gamma).
    """
    weights = spot.tier_mid_radii() ** (-gamma) * spot.tier_areas()
    return weights / weights.sum()


def _circle_street_points(
    center: Position, radius: float, network: RoadNetwork
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Points where the circle meets a street inside the map, with the axis flag (True = vertical street).
    """
    cx, cy = center
    points = []
    vertical = []
    for x in network.vertical_streets_m:
        dx = x - cx
        if abs(dx) <= radius:
            dy = math.sqrt(max(radius * radius - dx * dx, 0.0))
            for y in (cy + dy, cy - dy):
                if 0.0 <= y <= network.map_height_m:
                    points.append((x, y))
                    vertical.append(True)
    for y in network.horizontal_streets_m:
        dy = y - cy
        if abs(dy) <= radius:
            dx = math.sqrt(max(radius * radius - dy * dy, 0.0))
            for x in (cx + dx, cx - dx):
                if 0.0 <= x <= network.map_width_m:
                    points.append((x, y))
                    vertical.append(False)
    return np.array(points, dtype=float).reshape(-1, 2), np.array(vertical, dtype=bool)


def nearest_street_point(position: Position, network: RoadNetwork) -> Tuple[Position, bool]:
    x = min(max(position[0], 0.0), network.map_width_m)
    y = min(max(position[1], 0.0), network.map_height_m)
    xs = np.asarray(network.vertical_streets_m)
    ys = np.asarray(network.horizontal_streets_m)
    vx = float(xs[np.argmin(np.abs(xs - x))])
    hy = float(ys[np.argmin(np.abs(ys - y))])
    if abs(vx - x) <= abs(hy - y):
        return (vx, y), True
    return (x, hy), False


def snap_to_street(
    spot: SocialSpot, radius: float, angle: float, network: RoadNetwork
) -> Tuple[Position, bool]:
    """
    Move a sampled point onto a street while keeping its distance to the spot.

    Among the street points on the circle of `radius` around the spot, the one closest in angle
    to the sample wins. When the circle misses every street inside the map the nearest street
    point is used instead.

    :return: Snapped position and whether it lies on a vertical street
    """
    points, vertical = _circle_street_points(spot.position, radius, network)
    if len(points):
        angles = np.arctan2(points[:, 1] - spot.position[1], points[:, 0] - spot.position[0])
        diff = np.abs((angles - angle + math.pi) % (2 * math.pi) - math.pi)
        best = int(np.argmin(diff))
        return (float(points[best, 0]), float(points[best, 1])), bool(vertical[best])

    sample = (
        spot.position[0] + radius * math.cos(angle),
        spot.position[1] + radius * math.sin(angle),
    )
    position, on_vertical = nearest_street_point(sample, network)
    if spot.distance(position) > spot.mobility_radius_m:
        position, on_vertical = nearest_street_point(spot.position, network)
        if spot.distance(position) > spot.mobility_radius_m:
            logger.warning(
                f"No street within {spot.mobility_radius_m} m of spot {spot.position}, vehicle is placed outside its region"
            )
    return position, on_vertical


def place_vehicles(
    config: ScenarioConfig,
    network: RoadNetwork,
    rng: Optional[np.random.Generator] = None,
) -> List[VehicleState]:
    """
    Place vehicles around their social spots following the tiered power law.

    :param config: Scenario definition
    :param network: Road network built from the same config
    :param rng: Generator to draw from, defaults to the config's placement stream
    :return: Vehicles ordered by id; probe vehicles first, floating cars next
    """
    n = config.n_vehicles
    if n == 0:
        return []
    if rng is None:
        rng = spawn_generators(config.rng_seed)["placement"]

    spots = build_social_spots(config)
    edges = spots[0].tier_edges()
    probs = tier_probabilities(spots[0], config.gamma)

    homes = rng.integers(0, len(spots), size=n)
    tiers = rng.choice(len(probs), size=n, p=probs)
    u_radius = rng.random(n)
    angles = rng.random(n) * 2 * math.pi
    speeds = rng.random(n) * config.speed_limit_kmh
    signs = np.where(rng.random(n) < 0.5, -1.0, 1.0)

    r0 = edges[tiers]
    r1 = edges[tiers + 1]
    radii = np.sqrt(u_radius * (r1**2 - r0**2) + r0**2)

    vehicles = []
    for i in range(n):
        spot = spots[int(homes[i])]
        position, on_vertical = snap_to_street(spot, float(radii[i]), float(angles[i]), network)
        heading: Heading = (0.0, float(signs[i])) if on_vertical else (float(signs[i]), 0.0)
        if i < config.n_probe_vehicles:
            role = Role.ProbeVehicle
        elif i < config.n_reporting:
            role = Role.FloatingCar
        else:
            role = Role.Regular
        vehicles.append(
            VehicleState(
                vehicle_id=i,
                home_spot=int(homes[i]),
                position=position,
                speed_kmh=float(speeds[i]),
                heading=heading,
                role=role,
            )
        )

    logger.info(f"Placed {n} vehicles around {len(spots)} social spots")
    return vehicles


def radial_density_exponent(vehicles: Sequence[VehicleState], config: ScenarioConfig) -> float:
    """
    Least-squares slope of log areal density against log tier mid-radius, pooled over all spots.
    """
    spots = build_social_spots(config)
    spot = spots[0]
    distances = np.array([spots[v.home_spot].distance(v.position) for v in vehicles])
    counts, _ = np.histogram(distances, bins=spot.tier_edges())
    density = counts / spot.tier_areas()
    keep = counts > 0
    if keep.sum() < 2:
        return float("nan")
    slope, _ = np.polyfit(np.log(spot.tier_mid_radii()[keep]), np.log(density[keep]), 1)
    return float(slope)
