import math

import numpy as np
import pytest

from trasonet.config import NetworkParams, ScenarioConfig
from trasonet.models import Axis, Role
from trasonet.scenario import (
    VehicleState,
    build_deployment,
    build_road_network,
    build_social_spots,
    place_vehicles,
    radial_density_exponent,
    snap_to_street,
    step_mobility,
)
from trasonet.scenario.placement import tier_probabilities
from trasonet.utils.rng import spawn_generators
from .utils import small_config


def _distance_to_streets(position, network) -> float:
    x, y = position
    return min(
        min(abs(x - s) for s in network.vertical_streets_m),
        min(abs(y - s) for s in network.horizontal_streets_m),
    )


def test_default_grid():
    network = build_road_network(ScenarioConfig())

    # 20 streets of 19 blocks in each direction
    assert network.n_segments == 2 * 20 * 19
    assert network.segments[0].axis is Axis.Vertical
    assert network.segments[-1].axis is Axis.Horizontal
    assert network.segment_length_m == pytest.approx(10_000 / 19)
    assert [s.segment_id for s in network.segments] == list(range(network.n_segments))


def test_grid_adjacency():
    network = build_road_network(small_config())

    # vertical street 1 (x = 200), block 0 runs from (200, 0) to (200, 200)
    segment_id = network.segment_at(Axis.Vertical, 1, 0)
    assert network.endpoints(segment_id) == ((1, 0), (1, 1))
    assert network.midpoint(segment_id) == (200.0, 100.0)

    neighbors = network.neighbors(segment_id)
    assert neighbors == sorted(neighbors)
    assert network.segment_at(Axis.Vertical, 1, 1) in neighbors
    assert network.segment_at(Axis.Horizontal, 1, 0) in neighbors
    assert network.segment_at(Axis.Horizontal, 1, 1) in neighbors
    assert network.segment_at(Axis.Horizontal, 0, 0) in neighbors
    assert segment_id not in neighbors
    # a corner has two streets, an inner intersection four
    assert len(network.incident((0, 0))) == 2
    assert len(network.incident((2, 2))) == 4


def test_street_length_in_cells():
    network = build_road_network(small_config())

    # streets x = 0, 200, 400 and y = 0, 200, 400 cross [0, 500) x [0, 500)
    assert network.street_length_in(0, 500, 0, 500) == pytest.approx(6 * 500)
    # the far border counts towards the last cell
    assert network.street_length_in(500, 1000, 500, 1000) == pytest.approx(6 * 500)


def test_tier_probabilities_follow_the_power_law():
    spot = build_social_spots(small_config())[0]
    probs = tier_probabilities(spot, 2.0)

    assert probs.sum() == pytest.approx(1.0)
    density = probs / spot.tier_areas()
    slope = np.polyfit(np.log(spot.tier_mid_radii()), np.log(density), 1)[0]
    assert slope == pytest.approx(-2.0)


def test_snap_keeps_the_distance_to_the_spot():
    config = small_config()
    network = build_road_network(config)
    spot = build_social_spots(config)[0]

    for radius, angle in [(50.0, 0.3), (150.0, 2.0), (333.0, -1.2), (499.0, 4.0)]:
        position, on_vertical = snap_to_street(spot, radius, angle, network)
        assert spot.distance(position) == pytest.approx(radius)
        assert _distance_to_streets(position, network) < 1e-9
        if on_vertical:
            assert min(abs(position[0] - x) for x in network.vertical_streets_m) < 1e-9


def test_place_vehicles():
    config = small_config()
    network = build_road_network(config)
    spots = build_social_spots(config)
    vehicles = place_vehicles(config, network)

    assert [v.vehicle_id for v in vehicles] == list(range(config.n_vehicles))
    roles = [v.role for v in vehicles]
    assert roles.count(Role.ProbeVehicle) == config.n_probe_vehicles
    assert roles.count(Role.FloatingCar) == config.n_floating_cars
    assert roles[: config.n_probe_vehicles] == [Role.ProbeVehicle] * config.n_probe_vehicles
    for v in vehicles:
        assert spots[v.home_spot].distance(v.position) <= config.mobility_radius_m + 1e-6
        assert _distance_to_streets(v.position, network) < 1e-9
        assert 0.0 <= v.speed_kmh <= config.speed_limit_kmh
        assert abs(v.heading[0]) + abs(v.heading[1]) == 1.0


def test_placement_is_deterministic_per_seed():
    config = small_config()
    network = build_road_network(config)

    first = place_vehicles(config, network)
    second = place_vehicles(config, network)
    other = place_vehicles(config.model_copy(update={"rng_seed": 8}), network)

    assert [v.position for v in first] == [v.position for v in second]
    assert [v.position for v in first] != [v.position for v in other]


def test_no_vehicles():
    config = small_config()
    network = build_road_network(config)

    assert place_vehicles(config.model_copy(update={"n_vehicles": 0}), network) == []


def test_radial_density_exponent_at_default_scale():
    config = ScenarioConfig()
    network = build_road_network(config)
    vehicles = place_vehicles(config, network)

    assert radial_density_exponent(vehicles, config) == pytest.approx(-2.0, abs=0.3)


def test_mobility_stays_on_streets_and_inside_the_disc():
    config = small_config()
    network = build_road_network(config)
    spots = build_social_spots(config)
    rng = spawn_generators(config.rng_seed)["mobility"]
    vehicles = place_vehicles(config, network)

    for _ in range(20):
        moved = step_mobility(vehicles, network, config.duty_cycle_s, rng, spots)
        assert [v.vehicle_id for v in moved] == [v.vehicle_id for v in vehicles]
        vehicles = moved
        for v in vehicles:
            assert spots[v.home_spot].distance(v.position) <= config.mobility_radius_m + 1e-6
            assert _distance_to_streets(v.position, network) < 1e-6
            assert 0.0 <= v.speed_kmh <= config.speed_limit_kmh


def test_mobility_leaves_inputs_untouched():
    config = small_config()
    network = build_road_network(config)
    vehicles = place_vehicles(config, network)
    before = [v.position for v in vehicles]

    step_mobility(vehicles, network, 30.0, np.random.default_rng(1), build_social_spots(config))

    assert [v.position for v in vehicles] == before


def test_mobility_moves_by_speed_times_dt():
    config = small_config()
    network = build_road_network(config)
    spots = build_social_spots(config)
    # 36 km/h for 10 s is 100 m, straight up the x = 400 street from the spot
    vehicle = place_vehicles(config, network)[0].model_copy(
        update={"home_spot": 0, "position": (400.0, 400.0), "heading": (0.0, 1.0), "speed_kmh": 36.0}
    )

    moved = step_mobility([vehicle], network, 10.0, np.random.default_rng(0), spots)[0]

    assert moved.position == pytest.approx((400.0, 500.0))
    assert moved.heading == (0.0, 1.0)


def _floating_car(position, heading=(1.0, 0.0)) -> VehicleState:
    return VehicleState(
        vehicle_id=0, home_spot=0, position=position, speed_kmh=0.0, heading=heading, role=Role.FloatingCar
    )


def test_floating_cars_follow_their_plan():
    config = small_config()
    network = build_road_network(config)
    spots = build_social_spots(config)
    # up the x = 400 street to the corner, then left to the middle of the block
    target = network.segment_at(Axis.Horizontal, 2, 1)
    car = _floating_car((400.0, 300.0))

    moved = step_mobility([car], network, 30.0, np.random.default_rng(0), spots, {0: target})[0]

    assert moved.position == pytest.approx(network.midpoint(target))
    assert moved.position == pytest.approx((300.0, 400.0))
    assert moved.heading == (-1.0, 0.0)
    assert moved.speed_kmh == pytest.approx(200.0 / 30.0 * 3.6)


def test_floating_cars_drive_at_most_at_the_limit():
    config = small_config()
    network = build_road_network(config)
    spots = build_social_spots(config)
    target = network.segment_at(Axis.Horizontal, 5, 4)

    moved = step_mobility([_floating_car((0.0, 0.0))], network, 30.0, np.random.default_rng(0), spots, {0: target})[0]

    # 1,900 m away along the grid, 80 km/h covers 666.7 m of the x = 0 street
    assert moved.speed_kmh == network.speed_limit_kmh
    assert moved.position == pytest.approx((0.0, 80.0 / 3.6 * 30.0))
    assert moved.heading == (0.0, 1.0)


def test_floating_cars_cross_over_to_a_parallel_street():
    config = small_config()
    network = build_road_network(config)
    spots = build_social_spots(config)
    target = network.segment_at(Axis.Vertical, 3, 2)

    moved = step_mobility(
        [_floating_car((200.0, 450.0), heading=(0.0, 1.0))], network, 30.0, np.random.default_rng(0), spots, {0: target}
    )[0]

    assert moved.position == pytest.approx((600.0, 500.0))
    assert moved.speed_kmh == pytest.approx((50.0 + 400.0 + 100.0) / 30.0 * 3.6)
    assert _distance_to_streets(moved.position, network) < 1e-6


def test_vehicle_turns_back_when_every_way_leaves_its_disc():
    config = small_config(mobility_radius_m=150.0)
    network = build_road_network(config)
    spots = build_social_spots(config)
    # every block out of the (400, 400) spot ends 200 m away, beyond the 150 m disc
    vehicle = VehicleState(vehicle_id=0, home_spot=0, position=(400.0, 350.0), speed_kmh=36.0, heading=(0.0, 1.0))

    moved = step_mobility([vehicle], network, 10.0, np.random.default_rng(0), spots)[0]

    assert moved.heading == (0.0, -1.0)
    assert moved.position == pytest.approx((400.0, 350.0))


def test_mobility_rejects_non_positive_steps():
    config = small_config()
    network = build_road_network(config)

    with pytest.raises(ValueError):
        step_mobility([], network, 0.0, np.random.default_rng(0), build_social_spots(config))


def test_default_deployment():
    config = ScenarioConfig()
    network = build_road_network(config)
    deployment = build_deployment(config, network)

    # 10 km / 2.5 km = 4 eNBs per side
    assert len(deployment.enb_positions) == 16
    assert deployment.enb_positions[0] == (1250.0, 1250.0)
    assert len(deployment.rsu_positions) > 0
    spots = np.array(config.social_spots)
    for x, y in deployment.rsu_positions:
        assert np.hypot(spots[:, 0] - x, spots[:, 1] - y).min() <= config.network.rsu_zone_radius_m
        assert _distance_to_streets((x, y), network) < 1e-6


def test_explicit_rsu_positions_replace_the_layout():
    config = small_config(network=NetworkParams(rsu_positions=[(0.0, 0.0), (1000.0, 1000.0)]))
    deployment = build_deployment(config, build_road_network(config))

    assert deployment.rsu_positions == [(0.0, 0.0), (1000.0, 1000.0)]
    assert deployment.nearest_rsu_in_range((100.0, 0.0)) == 0
    assert deployment.nearest_rsu_in_range((500.0, 500.0)) is None
    assert deployment.nearest_enb((0.0, 0.0)) == 0


def test_rsu_coverage_of_rectangles():
    config = small_config(network=NetworkParams(rsu_positions=[(0.0, 0.0)]))
    deployment = build_deployment(config, build_road_network(config))

    assert deployment.rsu_covers_rect(0.0, 500.0, 0.0, 500.0)
    assert deployment.rsu_covers_rect(150.0, 500.0, 100.0, 500.0)
    assert not deployment.rsu_covers_rect(150.0, 500.0, 150.0, 500.0)
    assert math.hypot(150.0, 150.0) > deployment.rsu_radius_m
