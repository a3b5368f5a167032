import logging
import math
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from trasonet.ahp.judgments import score_alternatives, vanet_over_cellular
from trasonet.ahp.models import CRITERIA, CellState, PriorityVector, RecommendationMap
from trasonet.ahp.priority import priority_vector
from trasonet.ahp.tables import criteria_matrix
from trasonet.completion.models import CompletionResult
from trasonet.config import ScenarioConfig
from trasonet.constants import CONGESTION_BOUNDS, NOMINAL_SPEED_SHARE
from trasonet.models import SERVICES, Service
from trasonet.scenario.models import Deployment, RoadNetwork, VehicleState
from trasonet.utils.table import write_csv

logger = logging.getLogger(__name__)

RECOMMENDATION_HEADER = (
    "cell_x",
    "cell_y",
    "service",
    "network",
    "index",
    "argmax",
    "vehicle_density",
    "mean_speed_kmh",
    "cell_load",
    "rsu_load",
)


def synthesize(criteria_weights: PriorityVector, alternative_priorities: Sequence[PriorityVector]) -> PriorityVector:
    """
    Overall priority of each alternative: the criteria-weighted sum of its per-criterion priorities,
    normalized over the alternatives.
    """
    if len(alternative_priorities) != len(criteria_weights):
        raise ValueError(
            f"{len(criteria_weights)} criteria weights but {len(alternative_priorities)} alternative vectors"
        )
    stacked = np.stack([p.weights for p in alternative_priorities])
    index = criteria_weights.weights @ stacked
    return PriorityVector(weights=index / index.sum())


def grid_shape(config: ScenarioConfig) -> Tuple[int, int]:
    return (
        max(1, math.ceil(config.map_width_m / config.cell_size_m)),
        max(1, math.ceil(config.map_height_m / config.cell_size_m)),
    )


def _cell_bounds(config: ScenarioConfig, cx: int, cy: int) -> Tuple[float, float, float, float]:
    size = config.cell_size_m
    return cx * size, (cx + 1) * size, cy * size, (cy + 1) * size


def cell_indices(positions: np.ndarray, config: ScenarioConfig) -> Tuple[np.ndarray, np.ndarray]:
    nx, ny = grid_shape(config)
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    cx = np.clip((positions[:, 0] // config.cell_size_m).astype(int), 0, nx - 1)
    cy = np.clip((positions[:, 1] // config.cell_size_m).astype(int), 0, ny - 1)
    return cx, cy


def street_length_grid(network: RoadNetwork, config: ScenarioConfig) -> np.ndarray:
    nx, ny = grid_shape(config)
    lengths = np.zeros((nx, ny))
    for cx in range(nx):
        for cy in range(ny):
            lengths[cx, cy] = network.street_length_in(*_cell_bounds(config, cx, cy))
    return lengths


def density_grid(vehicles: Sequence[VehicleState], network: RoadNetwork, config: ScenarioConfig) -> np.ndarray:
    """
    Vehicles per metre of street in every cell; 0 in cells without streets.
    """
    nx, ny = grid_shape(config)
    counts = np.zeros((nx, ny))
    if vehicles:
        cx, cy = cell_indices(np.array([v.position for v in vehicles]), config)
        np.add.at(counts, (cx, cy), 1)
    lengths = street_length_grid(network, config)
    return np.divide(counts, lengths, out=np.zeros_like(counts), where=lengths > 0)


def expected_demand_per_vehicle(config: ScenarioConfig) -> float:
    """
    Long-run mean offered rate (Mbps) of one vehicle under Poisson session arrivals.
    """
    mix = config.service_mix
    duration = mix * Service.Voice.mean_duration_s + (1 - mix) * Service.Video.mean_duration_s
    rate = mix * Service.Voice.demand_mbps + (1 - mix) * Service.Video.demand_mbps
    busy = config.session_rate_per_s * duration
    return busy / (1 + busy) * rate


def load_grid(vehicles: Sequence[VehicleState], config: ScenarioConfig, deployment: Deployment) -> np.ndarray:
    """
    Expected load of the eNB serving each cell centre when every vehicle uses its nearest eNB.
    """
    enbs = deployment.enb_array()
    demand = np.zeros(len(enbs))
    if vehicles:
        positions = np.array([v.position for v in vehicles])
        nearest = np.argmin(np.hypot(positions[:, None, 0] - enbs[None, :, 0], positions[:, None, 1] - enbs[None, :, 1]), axis=1)
        np.add.at(demand, nearest, expected_demand_per_vehicle(config))
    load = demand / config.network.enb_capacity_mbps

    nx, ny = grid_shape(config)
    grid = np.zeros((nx, ny))
    for cx in range(nx):
        for cy in range(ny):
            x0, x1, y0, y1 = _cell_bounds(config, cx, cy)
            grid[cx, cy] = load[deployment.nearest_enb(((x0 + x1) / 2, (y0 + y1) / 2))]
    return grid


def rsu_load_grid(
    vehicles: Sequence[VehicleState],
    config: ScenarioConfig,
    deployment: Deployment,
    congestion: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Expected load of the RSU each vehicle would reach, averaged over the vehicles of every cell that
    reach one; 0 where none does. A vehicle counts `congestion[cell]` times at its RSU.
    """
    nx, ny = grid_shape(config)
    grid = np.zeros((nx, ny))
    if not vehicles or not deployment.rsu_positions:
        return grid
    positions = np.array([v.position for v in vehicles])
    nearest = deployment.nearest_rsus_in_range(positions)
    reached = nearest >= 0
    cx, cy = cell_indices(positions, config)
    weight = np.ones(len(positions)) if congestion is None else congestion[cx, cy]

    users = np.zeros(len(deployment.rsu_positions))
    np.add.at(users, nearest[reached], weight[reached])
    load = users * expected_demand_per_vehicle(config) / config.network.rsu_capacity_mbps

    sums = np.zeros((nx, ny))
    counts = np.zeros((nx, ny))
    np.add.at(sums, (cx[reached], cy[reached]), load[nearest[reached]])
    np.add.at(counts, (cx[reached], cy[reached]), 1)
    return np.divide(sums, counts, out=grid, where=counts > 0)


def speed_grid(estimate: Optional[CompletionResult], network: RoadNetwork, config: ScenarioConfig) -> np.ndarray:
    """
    Mean estimated speed of the latest cycle over the segments whose midpoint lies in each cell.
    """
    nx, ny = grid_shape(config)
    if estimate is None or estimate.estimate.shape[1] == 0:
        return np.full((nx, ny), np.nan)
    latest = estimate.estimate[:, -1]
    midpoints = np.array([network.midpoint(s.segment_id) for s in network.segments])
    cx, cy = cell_indices(midpoints, config)
    sums = np.zeros((nx, ny))
    counts = np.zeros((nx, ny))
    np.add.at(sums, (cx, cy), latest)
    np.add.at(counts, (cx, cy), 1)
    return np.divide(sums, counts, out=np.full((nx, ny), np.nan), where=counts > 0)


def congestion_grid(speed: np.ndarray, speed_limit_kmh: float) -> np.ndarray:
    """
    How much slower than nominal (half the limit) each cell's traffic is estimated to run, as the
    nominal over the estimated speed bounded to CONGESTION_BOUNDS; 1 where no speed is estimated.
    """
    low, high = CONGESTION_BOUNDS
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = np.clip(NOMINAL_SPEED_SHARE * speed_limit_kmh / np.maximum(speed, 0.0), low, high)
    return np.where(np.isnan(speed), 1.0, factor)


def recommendation_map(
    estimate: Optional[CompletionResult],
    config: ScenarioConfig,
    vehicles: Sequence[VehicleState],
    network: RoadNetwork,
    deployment: Deployment,
    services: Sequence[Service] = SERVICES,
) -> RecommendationMap:
    """
    Run the AHP per cell and service over the two access networks.

    Vehicles in cells the estimate shows congested weigh more, in the density and at the RSUs they reach.

    :param estimate: Completed traffic matrix, supplies the per-cell speed and congestion; None
        before any estimate exists
    :param config: Scenario definition, gives the cell size
    :param vehicles: Current vehicle positions, give the per-cell density and RSU load
    :param network: Road network
    :param deployment: eNBs and RSUs, give coverage and load
    :param services: Services to score
    :return: The map; per cell and service the two indices sum to 1
    """
    nx, ny = grid_shape(config)
    speed = speed_grid(estimate, network, config)
    congestion = congestion_grid(speed, config.speed_limit_kmh)
    density = density_grid(vehicles, network, config) * congestion
    load = load_grid(vehicles, config, deployment)
    rsu_load = rsu_load_grid(vehicles, config, deployment, congestion)
    coverage = np.zeros((nx, ny), dtype=bool)
    for cx in range(nx):
        for cy in range(ny):
            coverage[cx, cy] = deployment.rsu_covers_rect(*_cell_bounds(config, cx, cy))

    weights = {service: priority_vector(criteria_matrix(service)) for service in services}
    alternatives: Dict[Tuple[float, ...], list] = {}
    index = {service: np.zeros((nx, ny, 2)) for service in services}
    for cx in range(nx):
        for cy in range(ny):
            state = CellState(
                vehicle_density=float(density[cx, cy]),
                rsu_coverage=bool(coverage[cx, cy]),
                cell_load=float(load[cx, cy]),
                rsu_load=float(rsu_load[cx, cy]),
            )
            key = tuple(vanet_over_cellular(state, c) for c in CRITERIA)
            if key not in alternatives:
                alternatives[key] = [priority_vector(score_alternatives(state, c)) for c in CRITERIA]
            for service in services:
                index[service][cx, cy] = synthesize(weights[service], alternatives[key]).weights

    logger.debug(
        f"Recommendation map over {nx}x{ny} cells, {int(coverage.sum())} with RSU coverage, "
        f"mean congestion {float(congestion.mean()):.2f}"
    )
    return RecommendationMap(
        cell_size_m=config.cell_size_m,
        n_cells_x=nx,
        n_cells_y=ny,
        vehicle_density=density,
        mean_speed_kmh=speed,
        cell_load=load,
        rsu_load=rsu_load,
        rsu_coverage=coverage,
        index=index,
    )


def write_recommendation_csv(path: Union[str, Path], rec_map: RecommendationMap) -> Path:
    return write_csv(path, RECOMMENDATION_HEADER, rec_map.rows())
