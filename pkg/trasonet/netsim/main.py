import logging
import math
from typing import Dict, List, Optional, Sequence

import numpy as np

from trasonet.access.engine import AccessEngine
from trasonet.access.models import Rulebase
from trasonet.access.rulebase import load_rulebase
from trasonet.ahp.models import RecommendationMap
from trasonet.ahp.recommend import cell_indices, grid_shape, recommendation_map, street_length_grid
from trasonet.completion.als import complete_matrix
from trasonet.completion.models import CompletionResult
from trasonet.config import ScenarioConfig, revalidate
from trasonet.constants import DENSITY_BIN_EDGES, MAP_MATCH_RADIUS_M, SUCCESS_DURATION_SHARE
from trasonet.models import SERVICES, Mode, NetworkOption, Role, Service, SessionState
from trasonet.netsim.capacity import achieved_qos, allocate_capacity, attach
from trasonet.netsim.models import BillingAccount, CycleRecord, DensityBin, ServiceMetrics, SimMetrics
from trasonet.netsim.pricing import accrue_cost
from trasonet.scenario.infrastructure import build_deployment
from trasonet.scenario.mobility import step_mobility
from trasonet.scenario.models import RoadNetwork, VehicleState
from trasonet.scenario.placement import place_vehicles
from trasonet.scenario.road_network import build_road_network, build_social_spots
from trasonet.sensing.fc_planner import default_start_segments, plan_fc_routes
from trasonet.sensing.map_matching import map_match_batch
from trasonet.sensing.models import FcRoutePlan, GpsReport
from trasonet.sensing.reports import emit_reports
from trasonet.sensing.traffic_matrix import build_traffic_matrix
from trasonet.utils.rng import spawn_generators

logger = logging.getLogger(__name__)


def _fc_segments(vehicles: Sequence[VehicleState], fc_ids: List[int], network: RoadNetwork) -> List[int]:
    """
    Segment each floating car currently drives on, its default start segment when it matches none.
    """
    if not fc_ids:
        return []
    matched = map_match_batch(np.array([vehicles[i].position for i in fc_ids]), network, MAP_MATCH_RADIUS_M)
    defaults = default_start_segments(len(fc_ids), network)
    return [int(s) if s >= 0 else defaults[f] for f, s in enumerate(matched)]


def _cycles_needed(session: SessionState, dt_s: float) -> int:
    return max(1, math.ceil(session.duration_s / dt_s))


def _service_metrics(sessions: Sequence[SessionState]) -> ServiceMetrics:
    def success(group: Sequence[SessionState]) -> float:
        return sum(1 for s in group if s.satisfied_share() >= SUCCESS_DURATION_SHARE) / len(group)

    bins = []
    for lower, upper in zip(DENSITY_BIN_EDGES[:-1], DENSITY_BIN_EDGES[1:]):
        group = [s for s in sessions if lower <= s.spawn_density < upper]
        bins.append(
            DensityBin(
                lower=lower,
                upper=upper,
                n_sessions=len(group),
                success_probability=success(group) if group else None,
            )
        )

    if not sessions:
        return ServiceMetrics(
            n_sessions=0,
            no_sessions=True,
            success_probability=1.0,
            offload_fraction=0.0,
            mean_cost=0.0,
            handover_count=0,
            density_bins=bins,
        )
    total = sum(s.total_megabits for s in sessions)
    vanet = sum(s.vanet_megabits for s in sessions)
    return ServiceMetrics(
        n_sessions=len(sessions),
        no_sessions=False,
        success_probability=success(sessions),
        offload_fraction=vanet / total if total > 0 else 0.0,
        mean_cost=sum(s.cost_accrued for s in sessions) / len(sessions),
        handover_count=sum(s.handovers for s in sessions),
        density_bins=bins,
    )


def run_simulation(config: ScenarioConfig, mode: Mode, rulebase: Optional[Rulebase] = None) -> SimMetrics:
    """
    Simulate one city over the configured horizon, either cellular-only or with the recommender and
    the access engines choosing the network of every session.

    Every duty cycle vehicles move and report, sessions end and arrive, each active session is attached
    to a network and the capacity of every eNB and RSU is shared among its sessions. Every
    `refresh_cycles` cycles the traffic matrix is rebuilt, the floating cars are replanned and, in
    TrasoNET mode, the matrix is completed and the recommendation map refreshed.

    Mobility and session arrivals draw from their own streams of the config seed, so a Baseline and a
    TrasoNET run of the same config see the same vehicles and the same sessions.

    :param config: Scenario definition
    :param mode: Network selection mode
    :param rulebase: Fuzzy rulebase, read from `config.rulebase_path` or the shipped one when None
    :return: Per-service metrics and the per-cycle time series
    :raises InvariantViolationException: When a node serves more than its capacity or a session is
        attached to an RSU out of range
    """
    config = revalidate(config)
    mode = Mode(mode)
    streams = spawn_generators(config.rng_seed)
    network = build_road_network(config)
    spots = build_social_spots(config)
    deployment = build_deployment(config, network)
    vehicles = place_vehicles(config, network, streams["placement"])
    params = config.network
    dt = config.duty_cycle_s
    horizon = config.horizon_cycles
    refresh = config.refresh_cycles

    if mode is Mode.TrasoNET and rulebase is None:
        rulebase = load_rulebase(config.rulebase_path)

    logger.info(
        f"Simulating {mode.value} seed {config.rng_seed}: {len(vehicles)} vehicles, {horizon} cycles, "
        f"{len(deployment.enb_positions)} eNBs, {len(deployment.rsu_positions)} RSUs"
    )

    fc_ids = [v.vehicle_id for v in vehicles if v.role is Role.FloatingCar]
    street_lengths = street_length_grid(network, config)
    # plan routes hold the current segment first, so cycle c drives route[c - plan_origin]
    plan: FcRoutePlan = plan_fc_routes(len(fc_ids), None, network, refresh + 1, _fc_segments(vehicles, fc_ids, network))
    plan_origin = -1

    rec_map: Optional[RecommendationMap] = None
    estimate: Optional[CompletionResult] = None
    if mode is Mode.TrasoNET:
        rec_map = recommendation_map(estimate, config, vehicles, network, deployment)

    reports: List[GpsReport] = []
    sessions: List[SessionState] = []
    active: Dict[int, SessionState] = {}
    accounts: Dict[int, BillingAccount] = {}
    engines: Dict[int, AccessEngine] = {}
    time_series: List[CycleRecord] = []
    spawn_p = 1.0 - math.exp(-config.session_rate_per_s * dt)
    sessions_rng = streams["sessions"]

    for cycle in range(horizon):
        targets = {fc_id: plan.segment_at(f, cycle - plan_origin) for f, fc_id in enumerate(fc_ids)}
        vehicles = step_mobility(vehicles, network, dt, streams["mobility"], spots, targets)
        reports.extend(emit_reports(vehicles, cycle))

        positions = np.array([v.position for v in vehicles])
        cx, cy = cell_indices(positions, config)
        counts = np.zeros(grid_shape(config))
        np.add.at(counts, (cx, cy), 1)
        density = np.divide(counts, street_lengths, out=np.zeros_like(counts), where=street_lengths > 0)

        for vehicle_id, session in list(active.items()):
            if session.n_cycles >= _cycles_needed(session, dt):
                del active[vehicle_id]
                if vehicle_id in engines:
                    engines[vehicle_id].end_session()

        u = sessions_rng.random(len(vehicles))
        spawning = [i for i in range(len(vehicles)) if u[i] < spawn_p and vehicles[i].vehicle_id not in active]
        voice = sessions_rng.random(len(spawning)) < config.service_mix
        for k, i in enumerate(spawning):
            service = Service.Voice if voice[k] else Service.Video
            session = SessionState(
                session_id=len(sessions),
                vehicle_id=vehicles[i].vehicle_id,
                service=service,
                demand_rate=service.demand_mbps,
                duration_s=float(sessions_rng.exponential(service.mean_duration_s)),
                start_cycle=cycle,
                spawn_density=float(density[cx[i], cy[i]]),
            )
            sessions.append(session)
            active[session.vehicle_id] = session

        attachments = []
        session_positions = {}
        used: Dict[int, NetworkOption] = {}
        recommended: Dict[int, NetworkOption] = {}
        cycle_handovers = {service: 0 for service in SERVICES}
        for vehicle_id in sorted(active):
            session = active[vehicle_id]
            vehicle = vehicles[vehicle_id]
            if mode is Mode.Baseline:
                requested = NetworkOption.Cellular
            else:
                rec = rec_map.recommend(vehicle.position, session.service)
                recommended[session.session_id] = rec
                if vehicle_id not in engines:
                    engines[vehicle_id] = AccessEngine(rulebase, config.access)
                engine = engines[vehicle_id]
                if session.n_cycles == 0:
                    requested = engine.select(vehicle.speed_kmh, session.service, rec)
                else:
                    requested = engine.decide(
                        vehicle.speed_kmh, session.service, session.attached_network, rec, level_c=session.last_qos
                    )
            attachment, network_used = attach(
                session.session_id, session.demand_rate, vehicle.position, requested, deployment
            )
            if session.n_cycles > 0 and network_used is not session.attached_network:
                session.handovers += 1
                cycle_handovers[session.service] += 1
            session.attached_network = network_used
            used[session.session_id] = network_used
            attachments.append(attachment)
            session_positions[session.session_id] = vehicle.position

        grants = allocate_capacity(attachments, params, session_positions, deployment)

        served = {service: 0 for service in SERVICES}
        n_active = {service: 0 for service in SERVICES}
        megabits = {service: 0.0 for service in SERVICES}
        vanet_megabits = {service: 0.0 for service in SERVICES}
        cycle_cost = {service: 0.0 for service in SERVICES}
        for vehicle_id in sorted(active):
            session = active[vehicle_id]
            grant = grants[session.session_id]
            network_used = used[session.session_id]
            qos = achieved_qos(grant.rate, session.demand_rate, grant.delay_ms, session.service.delay_bound_ms)
            sent = grant.rate * dt
            account = accounts.setdefault(vehicle_id, BillingAccount())
            cost = accrue_cost(session, sent, params, account, network_used)

            session.achieved_rate_history.append(grant.rate)
            session.delay_history.append(grant.delay_ms)
            session.total_megabits += sent
            if network_used is NetworkOption.VANET:
                session.vanet_megabits += sent
                vanet_megabits[session.service] += sent
            session.last_qos = qos

            service = session.service
            n_active[service] += 1
            megabits[service] += sent
            cycle_cost[service] += cost
            if grant.rate >= session.demand_rate * (1 - 1e-9) and grant.delay_ms <= service.delay_bound_ms:
                served[service] += 1

            if mode is Mode.TrasoNET:
                vehicle = vehicles[vehicle_id]
                engines[vehicle_id].observe(
                    vehicle.speed_kmh, service, network_used, recommended[session.session_id], qos, cycle
                )

        for service in SERVICES:
            time_series.append(
                CycleRecord(
                    cycle=cycle,
                    service=service,
                    mode=mode,
                    success=served[service] / n_active[service] if n_active[service] else 1.0,
                    offload=vanet_megabits[service] / megabits[service] if megabits[service] > 0 else 0.0,
                    cost=cycle_cost[service],
                    handover_count=cycle_handovers[service],
                )
            )

        vehicles = [
            v.model_copy(
                update={
                    "current_network": active[v.vehicle_id].attached_network if v.vehicle_id in active else None,
                    "active_session": active.get(v.vehicle_id),
                }
            )
            for v in vehicles
        ]
        logger.debug(
            f"Cycle {cycle}: {len(active)} active sessions, "
            f"{sum(1 for n in used.values() if n is NetworkOption.VANET)} on VANET"
        )

        if (cycle + 1) % refresh == 0 and cycle + 1 < horizon:
            matrix = build_traffic_matrix(reports, network, cycle + 1)
            plan = plan_fc_routes(len(fc_ids), matrix, network, refresh + 1, _fc_segments(vehicles, fc_ids, network))
            plan_origin = cycle
            if mode is Mode.TrasoNET:
                rank = min(config.completion.target_rank, cycle + 1, network.n_segments)
                estimate = complete_matrix(matrix, config.completion.model_copy(update={"target_rank": rank}))
                rec_map = recommendation_map(estimate, config, vehicles, network, deployment)
                logger.debug(f"Cycle {cycle}: refreshed recommendations, completion converged={estimate.converged}")

    metrics = SimMetrics(
        mode=mode,
        seed=config.rng_seed,
        services={service: _service_metrics([s for s in sessions if s.service is service]) for service in SERVICES},
        time_series=time_series,
    )
    logger.info(
        f"Finished {mode.value} seed {config.rng_seed}: "
        + ", ".join(
            f"{service.value} success {m.success_probability:.3f} offload {m.offload_fraction:.3f}"
            for service, m in metrics.services.items()
        )
    )
    return metrics
