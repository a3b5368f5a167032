import logging
from typing import Sequence, Tuple

import numpy as np

from trasonet.constants import MAP_MATCH_RADIUS_M
from trasonet.scenario.models import RoadNetwork
from trasonet.sensing.map_matching import map_match_batch
from trasonet.sensing.models import GpsReport, TrafficMatrix

logger = logging.getLogger(__name__)


def build_traffic_matrix(
    reports: Sequence[GpsReport],
    network: RoadNetwork,
    horizon_cycles: int,
    radius_m: float = MAP_MATCH_RADIUS_M,
) -> TrafficMatrix:
    """
    Average the speeds of the reports matched to each (segment, cycle) cell.

    Reports that match no segment or fall outside [0, horizon_cycles) are dropped.

    :param reports: Reports of all cycles
    :param network: Road network
    :param horizon_cycles: Number of matrix columns
    :param radius_m: Map matching capture radius
    :return: The observed traffic matrix
    """
    shape = (network.n_segments, horizon_cycles)
    if not reports:
        return TrafficMatrix.empty(*shape)

    positions = np.array([r.position for r in reports], dtype=float)
    cycles = np.array([r.cycle_index for r in reports], dtype=int)
    speeds = np.array([r.speed_kmh for r in reports], dtype=float)
    segments = map_match_batch(positions, network, radius_m)

    keep = (segments >= 0) & (cycles >= 0) & (cycles < horizon_cycles)
    dropped = int((~keep).sum())
    if dropped:
        logger.warning(f"Dropped {dropped} of {len(reports)} reports (no matching segment or cycle out of range)")

    sums = np.zeros(shape)
    counts = np.zeros(shape, dtype=int)
    np.add.at(sums, (segments[keep], cycles[keep]), speeds[keep])
    np.add.at(counts, (segments[keep], cycles[keep]), 1)

    mask = counts > 0
    values = np.full(shape, np.nan)
    values[mask] = sums[mask] / counts[mask]
    return TrafficMatrix(values=values, mask=mask)


def coverage_stats(matrix: TrafficMatrix) -> Tuple[float, float]:
    """
    :return: Fraction of roads with at least one observation, and the mean fraction of observed
        cycles over those roads
    """
    if matrix.mask.size == 0:
        return 0.0, 0.0
    counts = matrix.row_counts()
    covered = counts > 0
    if not covered.any():
        return 0.0, 0.0
    road = float(covered.mean())
    time = float((counts[covered] / matrix.n_cycles).mean())
    return road, time
