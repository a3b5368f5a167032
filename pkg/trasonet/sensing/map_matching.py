from typing import Optional

import numpy as np

from trasonet.constants import MAP_MATCH_RADIUS_M
from trasonet.scenario.models import RoadNetwork
from trasonet.sensing.models import GpsReport

_TIE_TOL_M = 1e-6
# points per distance block, bounds the (points x segments) temporaries
_CHUNK = 2048


def segment_distances(points: np.ndarray, network: RoadNetwork) -> np.ndarray:
    """
    Perpendicular (clamped to the segment) distance of every point to every segment.

    :param points: (m, 2) array of positions
    :return: (m, n_segments) distances
    """
    coords = network.coords()
    a = coords[:, :2]
    d = coords[:, 2:] - a
    length2 = np.maximum((d**2).sum(axis=1), 1e-12)
    rel = points[:, None, :] - a[None, :, :]
    t = np.clip((rel * d[None, :, :]).sum(axis=2) / length2[None, :], 0.0, 1.0)
    nearest = a[None, :, :] + t[:, :, None] * d[None, :, :]
    return np.hypot(points[:, None, 0] - nearest[:, :, 0], points[:, None, 1] - nearest[:, :, 1])


def map_match_batch(
    positions: np.ndarray, network: RoadNetwork, radius_m: float = MAP_MATCH_RADIUS_M
) -> np.ndarray:
    """
    Matched segment id per position, -1 where no segment lies within `radius_m`.
    Ties go to the lowest segment id.
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    if len(positions) == 0:
        return np.zeros(0, dtype=int)
    result = np.empty(len(positions), dtype=int)
    for start in range(0, len(positions), _CHUNK):
        distances = segment_distances(positions[start : start + _CHUNK], network)
        best_distance = distances.min(axis=1)
        # first id within rounding of the minimum
        best = np.argmax(distances <= best_distance[:, None] + _TIE_TOL_M, axis=1)
        result[start : start + _CHUNK] = np.where(best_distance <= radius_m, best, -1)
    return result


def map_match(
    report: GpsReport, network: RoadNetwork, radius_m: float = MAP_MATCH_RADIUS_M
) -> Optional[int]:
    """
    Match a report to the closest road segment.

    :param report: GPS reading
    :param network: Road network
    :param radius_m: Capture radius
    :return: Segment id, or None when the report is farther than `radius_m` from every street
    """
    segment_id = int(map_match_batch(np.array([report.position]), network, radius_m)[0])
    return None if segment_id < 0 else segment_id
