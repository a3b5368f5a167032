import bisect
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from trasonet.config import Position
from trasonet.models import Axis, Role
from trasonet.scenario.models import HEADINGS, Heading, Intersection, RoadNetwork, SocialSpot, VehicleState

logger = logging.getLogger(__name__)

_EPS = 1e-9
# bounds the number of legs walked in a single step
_MAX_LEGS = 256
_ON_STREET_M = 1e-6


def _next_intersection(
    position: Position, heading: Heading, network: RoadNetwork
) -> Optional[Tuple[Intersection, float]]:
    """
    The first intersection strictly ahead along `heading` and the distance to it.
    """
    x, y = position
    hx, hy = heading
    if hx != 0.0:
        ahead = _index_ahead(network.vertical_streets_m, x, hx)
        if ahead is None:
            return None
        h = _street_index(network.horizontal_streets_m, y)
        return (ahead, h), abs(network.vertical_streets_m[ahead] - x)
    ahead = _index_ahead(network.horizontal_streets_m, y, hy)
    if ahead is None:
        return None
    v = _street_index(network.vertical_streets_m, x)
    return (v, ahead), abs(network.horizontal_streets_m[ahead] - y)


def _index_ahead(streets: Sequence[float], coordinate: float, direction: float) -> Optional[int]:
    if direction > 0:
        i = bisect.bisect_right(streets, coordinate + _EPS)
        return i if i < len(streets) else None
    i = bisect.bisect_left(streets, coordinate - _EPS) - 1
    return i if i >= 0 else None


def _street_index(streets: Sequence[float], coordinate: float) -> int:
    i = bisect.bisect_left(streets, coordinate)
    if i == 0:
        return 0
    if i == len(streets):
        return len(streets) - 1
    return i if streets[i] - coordinate < coordinate - streets[i - 1] else i - 1


def _distance_to_boundary(position: Position, heading: Heading, spot: SocialSpot) -> float:
    """
    Distance along `heading` until the vehicle reaches the edge of its mobility disc.
    """
    px = position[0] - spot.position[0]
    py = position[1] - spot.position[1]
    b = px * heading[0] + py * heading[1]
    c = px * px + py * py - spot.mobility_radius_m**2
    disc = b * b - c
    if disc < 0:
        return 0.0
    return max(-b + math.sqrt(disc), 0.0)


def _turn(
    intersection: Intersection,
    heading: Heading,
    network: RoadNetwork,
    spot: SocialSpot,
    rng: np.random.Generator,
) -> Heading:
    back = (-heading[0], -heading[1])
    options = []
    for option in HEADINGS:
        if option == back:
            continue
        segment_id = network.segment_from(intersection, option)
        if segment_id is None:
            continue
        far = network.intersection_xy(network.far_end(segment_id, intersection))
        if spot.distance(far) <= spot.mobility_radius_m + _EPS:
            options.append(option)
    if not options:
        return back
    return options[int(rng.integers(len(options)))]


def _advance(
    vehicle: VehicleState,
    distance: float,
    network: RoadNetwork,
    spot: SocialSpot,
    rng: np.random.Generator,
) -> Tuple[Position, Heading]:
    position = vehicle.position
    heading = (float(vehicle.heading[0]), float(vehicle.heading[1]))
    remaining = distance
    for _ in range(_MAX_LEGS):
        if remaining <= _EPS:
            break
        to_boundary = _distance_to_boundary(position, heading, spot)
        ahead = _next_intersection(position, heading, network)
        to_intersection = ahead[1] if ahead is not None else 0.0

        if to_boundary < min(to_intersection, remaining):
            position = (position[0] + heading[0] * to_boundary, position[1] + heading[1] * to_boundary)
            remaining -= to_boundary
            heading = (-heading[0], -heading[1])
            continue
        if ahead is None:
            heading = (-heading[0], -heading[1])
            continue
        if remaining < to_intersection:
            position = (position[0] + heading[0] * remaining, position[1] + heading[1] * remaining)
            remaining = 0.0
            break
        intersection, _ = ahead
        position = network.intersection_xy(intersection)
        remaining -= to_intersection
        heading = _turn(intersection, heading, network, spot, rng)
    return position, heading


def _on_street(coordinate: float, streets: Sequence[float]) -> bool:
    i = _street_index(streets, coordinate)
    return abs(streets[i] - coordinate) < _ON_STREET_M


def _path_to_segment(position: Position, segment_id: int, network: RoadNetwork) -> List[Position]:
    """
    Corners of a shortest grid path from `position` to the midpoint of `segment_id`, target last.
    """
    segment = network.segments[segment_id]
    target = network.midpoint(segment_id)
    x, y = position
    if segment.axis is Axis.Vertical:
        street = network.vertical_streets_m[segment.street_index]
        if abs(x - street) < _ON_STREET_M:
            return [target]
        if _on_street(y, network.horizontal_streets_m):
            return [(street, y), target]
        # parallel street: cross over at the nearer end of the segment
        crossing = min((segment.start_m, segment.end_m), key=lambda c: abs(c - y))
        return [(x, crossing), (street, crossing), target]
    street = network.horizontal_streets_m[segment.street_index]
    if abs(y - street) < _ON_STREET_M:
        return [target]
    if _on_street(x, network.vertical_streets_m):
        return [(x, street), target]
    crossing = min((segment.start_m, segment.end_m), key=lambda c: abs(c - x))
    return [(crossing, y), (crossing, street), target]


def _follow_plan(vehicle: VehicleState, segment_id: int, network: RoadNetwork, dt_s: float) -> VehicleState:
    """
    Drive a floating car along the grid towards the midpoint of its planned segment, at the speed
    that gets it there this step, capped at the limit.
    """
    corners = [vehicle.position, *_path_to_segment(vehicle.position, segment_id, network)]
    legs = [abs(b[0] - a[0]) + abs(b[1] - a[1]) for a, b in zip(corners, corners[1:])]
    speed = min(network.speed_limit_kmh, sum(legs) / dt_s * 3.6)

    position = vehicle.position
    heading = (float(vehicle.heading[0]), float(vehicle.heading[1]))
    remaining = speed / 3.6 * dt_s
    for corner, leg in zip(corners[1:], legs):
        if leg <= _EPS:
            continue
        dx = corner[0] - position[0]
        dy = corner[1] - position[1]
        heading = (math.copysign(1.0, dx), 0.0) if abs(dx) >= abs(dy) else (0.0, math.copysign(1.0, dy))
        if remaining < leg - _EPS:
            position = (position[0] + heading[0] * remaining, position[1] + heading[1] * remaining)
            break
        position = corner
        remaining -= leg
    return vehicle.model_copy(update={"position": position, "heading": heading, "speed_kmh": speed})


def step_mobility(
    vehicles: Sequence[VehicleState],
    network: RoadNetwork,
    dt_s: float,
    rng: np.random.Generator,
    spots: Sequence[SocialSpot],
    fc_targets: Optional[Dict[int, int]] = None,
) -> List[VehicleState]:
    """
    Advance every vehicle by one duty cycle.

    Vehicles drive at their current speed, turn uniformly at intersections among the blocks that
    keep them inside their mobility disc, reverse when none does, and reflect at the disc edge.
    Speeds are redrawn uniformly in [0, speed limit] after each move. Floating cars listed in
    `fc_targets` drive along the grid towards the midpoint of their planned segment instead, at
    most at the speed limit.

    :param vehicles: Current states
    :param network: Road network
    :param dt_s: Step length in seconds
    :param rng: Mobility generator, consumed in vehicle order
    :param spots: Social spots indexed by `home_spot`
    :param fc_targets: Planned segment per floating car id for this cycle
    :return: New states, the inputs are left untouched
    """
    if dt_s <= 0:
        raise ValueError("dt_s must be > 0")
    fc_targets = fc_targets or {}

    result = []
    for vehicle in vehicles:
        if vehicle.role is Role.FloatingCar and vehicle.vehicle_id in fc_targets:
            result.append(_follow_plan(vehicle, fc_targets[vehicle.vehicle_id], network, dt_s))
            continue
        spot = spots[vehicle.home_spot]
        distance = vehicle.speed_kmh / 3.6 * dt_s
        position, heading = _advance(vehicle, distance, network, spot, rng)
        speed = float(rng.random() * network.speed_limit_kmh)
        result.append(vehicle.model_copy(update={"position": position, "heading": heading, "speed_kmh": speed}))
    return result
