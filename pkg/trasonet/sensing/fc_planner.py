import logging
from typing import Callable, List, Optional, Sequence

import numpy as np

from trasonet.scenario.models import Intersection, RoadNetwork
from trasonet.sensing.models import FcRoutePlan, TrafficMatrix

logger = logging.getLogger(__name__)

Chooser = Callable[[int, List[int]], int]
"(current segment, candidate segments) -> next segment"


def default_start_segments(n_fc: int, network: RoadNetwork) -> List[int]:
    """
    Floating cars spread evenly over the segment ids.
    """
    return [(f * network.n_segments) // n_fc for f in range(n_fc)]


def _walk(
    n_fc: int,
    network: RoadNetwork,
    horizon: int,
    start_segments: Optional[Sequence[int]],
    choose: Chooser,
) -> FcRoutePlan:
    if n_fc <= 0 or horizon <= 0:
        return FcRoutePlan(routes=[], positions=[])
    starts = list(start_segments) if start_segments is not None else default_start_segments(n_fc, network)
    if len(starts) != n_fc:
        raise ValueError(f"expected {n_fc} start segments, got {len(starts)}")

    current = list(starts)
    forward: List[Intersection] = [network.endpoints(s)[1] for s in starts]
    routes = [[s] for s in starts]
    for _ in range(1, horizon):
        for f in range(n_fc):
            candidates = [s for s in network.incident(forward[f]) if s != current[f]]
            if candidates:
                nxt = choose(current[f], sorted(candidates))
                forward[f] = network.far_end(nxt, forward[f])
            else:
                # dead end, turn around
                nxt = current[f]
                forward[f] = network.far_end(nxt, forward[f])
            current[f] = nxt
            routes[f].append(nxt)

    positions = [[network.midpoint(s) for s in route] for route in routes]
    return FcRoutePlan(routes=routes, positions=positions)


def plan_fc_routes(
    n_fc: int,
    matrix: Optional[TrafficMatrix],
    network: RoadNetwork,
    horizon: int,
    start_segments: Optional[Sequence[int]] = None,
) -> FcRoutePlan:
    """
    Greedy count balancing: every cycle each floating car drives on to the adjacent segment whose
    road has been observed least so far. Ties keep the car going straight when possible,
    otherwise go to the lowest segment id. Each visit counts as one more observation.

    :param n_fc: Number of floating cars
    :param matrix: Observations so far, None when nothing has been observed yet
    :param network: Road network
    :param horizon: Number of cycles to plan; the first one is the start segment
    :param start_segments: Current segment of each car, spread evenly over the ids by default
    :return: The plan, empty when `n_fc` is 0
    """
    if matrix is None:
        counts = np.zeros(network.n_segments, dtype=int)
    else:
        if matrix.n_segments != network.n_segments:
            raise ValueError(f"matrix has {matrix.n_segments} rows, network has {network.n_segments} segments")
        counts = matrix.row_counts().astype(int)

    if start_segments is not None:
        for s in start_segments:
            counts[s] += 1
    elif n_fc > 0 and horizon > 0:
        for s in default_start_segments(n_fc, network):
            counts[s] += 1

    def choose(current: int, candidates: List[int]) -> int:
        lowest = min(counts[c] for c in candidates)
        best = [c for c in candidates if counts[c] == lowest]
        axis = network.segments[current].axis
        straight = [c for c in best if network.segments[c].axis is axis]
        nxt = straight[0] if straight else best[0]
        counts[nxt] += 1
        return nxt

    plan = _walk(n_fc, network, horizon, start_segments, choose)
    logger.debug(f"Planned {plan.n_fc} floating car routes over {horizon} cycles")
    return plan


def random_fc_routes(
    n_fc: int,
    network: RoadNetwork,
    horizon: int,
    rng: np.random.Generator,
    start_segments: Optional[Sequence[int]] = None,
) -> FcRoutePlan:
    """
    Floating cars that pick the next segment uniformly among the ones ahead of them.
    """

    def choose(current: int, candidates: List[int]) -> int:
        return candidates[int(rng.integers(len(candidates)))]

    return _walk(n_fc, network, horizon, start_segments, choose)


def apply_routes(mask: np.ndarray, plan: FcRoutePlan, start_cycle: int = 0) -> np.ndarray:
    """
    Mark the (segment, cycle) cells visited by the plan as observed.
    """
    result = np.array(mask, dtype=bool, copy=True)
    n_cycles = result.shape[1]
    for route in plan.routes:
        for t, segment_id in enumerate(route):
            cycle = start_cycle + t
            if 0 <= cycle < n_cycles:
                result[segment_id, cycle] = True
    return result
