import logging
from collections import defaultdict
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from trasonet.config import NetworkParams, Position
from trasonet.exception import InvariantViolationException
from trasonet.models import NetworkOption
from trasonet.netsim.models import Attachment, Grant, NodeKind
from trasonet.scenario.models import Deployment

logger = logging.getLogger(__name__)

# float slack of the capacity checks
_CAPACITY_TOL = 1e-9


def max_min_fair_allocation(demand: Dict[int, float], capacity: float) -> Dict[int, float]:
    """
    Water-filling: demands below the equal share are served in full, the rest split what is left.
    """
    if not demand:
        return {}
    if sum(demand.values()) <= capacity:
        return dict(demand)

    equal_share = capacity / len(demand)
    if min(demand.values()) > equal_share:
        return {u: equal_share for u in demand}

    satisfied = {u: d for u, d in demand.items() if d <= equal_share}
    rest = {u: d for u, d in demand.items() if d > equal_share}
    satisfied.update(max_min_fair_allocation(rest, capacity - sum(satisfied.values())))
    return satisfied


def attach(
    session_id: int,
    demand: float,
    position: Position,
    requested: NetworkOption,
    deployment: Deployment,
) -> Tuple[Attachment, NetworkOption]:
    """
    Attach to the nearest eNB, or to the nearest RSU in range for VANET. A VANET request with
    no RSU in range falls back to cellular.

    :return: The attachment and the network actually used
    """
    if requested is NetworkOption.VANET:
        rsu = deployment.nearest_rsu_in_range(position)
        if rsu is not None:
            return Attachment(session_id=session_id, node_kind=NodeKind.RSU, node_index=rsu, demand=demand), requested
    enb = deployment.nearest_enb(position)
    return (
        Attachment(session_id=session_id, node_kind=NodeKind.ENB, node_index=enb, demand=demand),
        NetworkOption.Cellular,
    )


def check_attachments(
    attachments: Sequence[Attachment], positions: Dict[int, Position], deployment: Deployment
):
    """
    :raises InvariantViolationException: When a session is attached to an RSU it is out of range of
    """
    rsus = deployment.rsu_array()
    for a in attachments:
        if a.node_kind is not NodeKind.RSU:
            continue
        x, y = positions[a.session_id]
        distance = float(np.hypot(rsus[a.node_index, 0] - x, rsus[a.node_index, 1] - y))
        if distance > deployment.rsu_radius_m + _CAPACITY_TOL:
            raise InvariantViolationException(
                f"session {a.session_id} attached to RSU {a.node_index} at {distance:.1f} m, radius is {deployment.rsu_radius_m} m"
            )


def allocate_capacity(
    attachments: Sequence[Attachment],
    params: NetworkParams,
    positions: Optional[Dict[int, Position]] = None,
    deployment: Optional[Deployment] = None,
) -> Dict[int, Grant]:
    """
    Share every node's capacity max-min fairly among its sessions.

    Cellular delay grows with the overload of the eNB, base_delay * max(1, offered / capacity);
    VANET delay is the per-user delay times the number of sessions on the RSU.

    :param attachments: One attachment per session
    :param params: Capacities and delays
    :param positions: Session positions, to check RSU ranges together with `deployment`
    :param deployment: eNBs and RSUs
    :return: Granted rate and delay per session id
    :raises InvariantViolationException: When a node would serve more than its capacity or a session
        is out of range of its RSU
    """
    if positions is not None and deployment is not None:
        check_attachments(attachments, positions, deployment)

    nodes: Dict[Tuple[NodeKind, int], Dict[int, float]] = defaultdict(dict)
    for a in attachments:
        if a.session_id in nodes[(a.node_kind, a.node_index)]:
            raise InvariantViolationException(f"session {a.session_id} attached twice")
        nodes[(a.node_kind, a.node_index)][a.session_id] = a.demand

    grants: Dict[int, Grant] = {}
    for (kind, index), demand in sorted(nodes.items(), key=lambda item: (item[0][0].value, item[0][1])):
        if kind is NodeKind.ENB:
            capacity = params.enb_capacity_mbps
            delay = params.cellular_base_delay_ms * max(1.0, sum(demand.values()) / capacity)
        else:
            capacity = params.rsu_capacity_mbps
            delay = params.vanet_delay_per_user_ms * len(demand)
        rates = max_min_fair_allocation(demand, capacity)
        total = sum(rates.values())
        if total > capacity * (1 + _CAPACITY_TOL):
            raise InvariantViolationException(f"{kind.value} {index} serves {total} Mbps over capacity {capacity}")
        for session_id, rate in rates.items():
            grants[session_id] = Grant(rate=rate, delay_ms=delay)
    return grants


def achieved_qos(rate: float, demand: float, delay_ms: float, bound_ms: float) -> float:
    """
    QoS in [0, 1]: the served share of the demand, scaled down when the delay exceeds its bound.
    """
    rate_share = min(1.0, rate / demand) if demand > 0 else 1.0
    delay_share = min(1.0, bound_ms / delay_ms) if delay_ms > 0 else 1.0
    return max(0.0, rate_share * delay_share)
