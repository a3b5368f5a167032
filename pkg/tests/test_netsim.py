import json
import os

import numpy as np
import pytest

from trasonet.config import NetworkParams
from trasonet.exception import InvariantViolationException
from trasonet.models import Mode, NetworkOption, Service, SessionState
from trasonet.netsim import (
    Attachment,
    BillingAccount,
    NodeKind,
    accrue_cost,
    achieved_qos,
    allocate_capacity,
    attach,
    max_min_fair_allocation,
    run_simulation,
    write_metrics,
)
from trasonet.scenario import Deployment
from .utils import desk_config, small_config

DESK_SEEDS = int(os.getenv("TRASONET_DESK_SEEDS", "20"))


@pytest.fixture
def deployment():
    return Deployment(enb_positions=[(0.0, 0.0)], rsu_positions=[(100.0, 0.0), (1000.0, 0.0)], rsu_radius_m=200.0)


def _session(service=Service.Video, network=NetworkOption.Cellular) -> SessionState:
    return SessionState(
        session_id=0,
        vehicle_id=0,
        service=service,
        demand_rate=service.demand_mbps,
        duration_s=60.0,
        start_cycle=0,
        attached_network=network,
    )


def test_max_min_fair_allocation():
    assert max_min_fair_allocation({}, 10.0) == {}
    assert max_min_fair_allocation({1: 5.0}, 10.0) == {1: 5.0}
    assert max_min_fair_allocation({1: 5.0, 2: 5.0, 3: 5.0}, 10.0) == pytest.approx({1: 10 / 3, 2: 10 / 3, 3: 10 / 3})
    assert max_min_fair_allocation({1: 1.0, 2: 4.0, 3: 8.0}, 9.0) == pytest.approx({1: 1.0, 2: 4.0, 3: 4.0})


def test_a_lone_video_session_gets_its_rate_from_an_rsu(deployment):
    attachment = Attachment(session_id=0, node_kind=NodeKind.RSU, node_index=0, demand=5.0)

    grant = allocate_capacity([attachment], NetworkParams())[0]

    assert grant.rate == 5.0
    assert grant.delay_ms == 10.0


def test_three_video_sessions_share_an_rsu():
    attachments = [Attachment(session_id=i, node_kind=NodeKind.RSU, node_index=0, demand=5.0) for i in range(3)]

    grants = allocate_capacity(attachments, NetworkParams())

    assert [grants[i].rate for i in range(3)] == pytest.approx([10 / 3] * 3)
    assert grants[0].delay_ms == 30.0


def test_voice_sessions_fit_into_one_enb():
    attachments = [
        Attachment(session_id=i, node_kind=NodeKind.ENB, node_index=0, demand=Service.Voice.demand_mbps)
        for i in range(1000)
    ]

    grants = allocate_capacity(attachments, NetworkParams())

    assert all(g.rate == Service.Voice.demand_mbps for g in grants.values())
    assert all(g.delay_ms == 50.0 for g in grants.values())


def test_overloaded_enb_delay_grows_with_the_load():
    attachments = [Attachment(session_id=i, node_kind=NodeKind.ENB, node_index=0, demand=5.0) for i in range(40)]

    grants = allocate_capacity(attachments, NetworkParams())

    assert sum(g.rate for g in grants.values()) == pytest.approx(100.0)
    assert grants[0].delay_ms == pytest.approx(50.0 * 200 / 100)


def test_nodes_are_shared_separately():
    attachments = [
        Attachment(session_id=0, node_kind=NodeKind.RSU, node_index=0, demand=5.0),
        Attachment(session_id=1, node_kind=NodeKind.RSU, node_index=1, demand=5.0),
        Attachment(session_id=2, node_kind=NodeKind.ENB, node_index=0, demand=5.0),
    ]

    grants = allocate_capacity(attachments, NetworkParams())

    assert {i: g.rate for i, g in grants.items()} == {0: 5.0, 1: 5.0, 2: 5.0}


def test_double_attachment_is_an_invariant_violation():
    attachment = Attachment(session_id=0, node_kind=NodeKind.ENB, node_index=0, demand=1.0)

    with pytest.raises(InvariantViolationException):
        allocate_capacity([attachment, attachment], NetworkParams())


def test_out_of_range_rsu_is_an_invariant_violation(deployment):
    attachment = Attachment(session_id=0, node_kind=NodeKind.RSU, node_index=0, demand=5.0)

    with pytest.raises(InvariantViolationException):
        allocate_capacity([attachment], NetworkParams(), {0: (500.0, 0.0)}, deployment)
    assert allocate_capacity([attachment], NetworkParams(), {0: (250.0, 0.0)}, deployment)[0].rate == 5.0


def test_attach(deployment):
    on_rsu, used = attach(0, 5.0, (900.0, 50.0), NetworkOption.VANET, deployment)
    assert (on_rsu.node_kind, on_rsu.node_index, used) == (NodeKind.RSU, 1, NetworkOption.VANET)

    # no RSU within 200 m
    fallback, used = attach(1, 5.0, (500.0, 0.0), NetworkOption.VANET, deployment)
    assert (fallback.node_kind, used) == (NodeKind.ENB, NetworkOption.Cellular)

    cellular, used = attach(2, 5.0, (100.0, 0.0), NetworkOption.Cellular, deployment)
    assert (cellular.node_kind, used) == (NodeKind.ENB, NetworkOption.Cellular)
    assert NodeKind.RSU.network is NetworkOption.VANET


def test_achieved_qos():
    assert achieved_qos(5.0, 5.0, 50.0, 150.0) == 1.0
    assert achieved_qos(2.5, 5.0, 50.0, 150.0) == 0.5
    assert achieved_qos(5.0, 5.0, 300.0, 150.0) == 0.5
    assert achieved_qos(0.0, 5.0, 10.0, 150.0) == 0.0


def test_cellular_cost():
    session = _session()

    assert accrue_cost(session, 10.0, NetworkParams()) == 10.0
    assert session.cost_accrued == 10.0


def test_vanet_cost():
    params = NetworkParams()
    session = _session(network=NetworkOption.VANET)
    account = BillingAccount()

    # flat fee on first use, then free under the cap
    assert accrue_cost(session, 100.0, params, account) == 10.0
    assert accrue_cost(session, 100.0, params, account) == 0.0
    assert accrue_cost(_session(network=NetworkOption.VANET), 100.0, params) == 10.0

    capped = BillingAccount(vanet_megabits=2000.0, flat_charged=True)
    assert accrue_cost(session, 1.0, params, capped) == pytest.approx(1.0)
    straddling = BillingAccount(vanet_megabits=1999.5, flat_charged=True)
    assert accrue_cost(session, 1.0, params, straddling) == pytest.approx(0.5)
    assert session.cost_accrued == pytest.approx(11.5)


def test_network_argument_overrides_the_session_network():
    session = _session(network=NetworkOption.VANET)

    assert accrue_cost(session, 3.0, NetworkParams(), network=NetworkOption.Cellular) == 3.0


def test_negative_volume_is_rejected():
    with pytest.raises(ValueError):
        accrue_cost(_session(), -1.0, NetworkParams())


def test_simulation_is_deterministic():
    config = small_config()

    first = run_simulation(config, Mode.TrasoNET)
    second = run_simulation(config, Mode.TrasoNET)

    assert first == second


def test_simulation_metrics():
    config = small_config()

    metrics = run_simulation(config, Mode.TrasoNET)

    assert metrics.mode is Mode.TrasoNET
    assert metrics.seed == config.rng_seed
    assert len(metrics.time_series) == 2 * config.horizon_cycles
    for service, m in metrics.services.items():
        assert 0.0 <= m.success_probability <= 1.0
        assert 0.0 <= m.offload_fraction <= 1.0
        assert m.mean_cost >= 0.0
        assert sum(b.n_sessions for b in m.density_bins) == m.n_sessions
        assert m.handover_count == sum(r.handover_count for r in metrics.time_series if r.service is service)
    for record in metrics.time_series:
        assert 0.0 <= record.success <= 1.0
        assert 0.0 <= record.offload <= 1.0


def test_both_modes_see_the_same_sessions():
    config = small_config()

    baseline = run_simulation(config, Mode.Baseline)
    trasonet = run_simulation(config, Mode.TrasoNET)

    for service in (Service.Voice, Service.Video):
        assert baseline.services[service].n_sessions == trasonet.services[service].n_sessions
        assert baseline.services[service].offload_fraction == 0.0
        assert baseline.services[service].handover_count == 0


def test_without_rsus_nothing_is_offloaded():
    config = small_config(network=NetworkParams(rsu_positions=[]))

    metrics = run_simulation(config, Mode.TrasoNET)

    assert all(m.offload_fraction == 0.0 for m in metrics.services.values())


def test_no_sessions():
    metrics = run_simulation(small_config(session_rate_per_s=0.0), Mode.TrasoNET)

    for m in metrics.services.values():
        assert m.no_sessions
        assert m.n_sessions == 0
        assert m.success_probability == 1.0
        assert all(b.success_probability is None for b in m.density_bins)


def test_write_metrics(tmp_path):
    metrics = run_simulation(small_config(horizon_cycles=3), Mode.Baseline)

    paths = write_metrics(tmp_path, metrics, prefix="seed7_")

    assert [p.name for p in paths] == ["seed7_metrics.json", "seed7_timeseries.csv", "seed7_density.csv"]
    series = paths[1].read_text(encoding="utf-8").splitlines()
    assert series[0] == "cycle,service,mode,success,offload,cost,handover_count"
    assert series[1].startswith("0,Voice,Baseline,")
    assert len(series) == 1 + 2 * 3
    assert paths[2].read_text(encoding="utf-8").startswith("service,mode,bin_lower,bin_upper,n_sessions,success\n")

    dumped = json.loads(metrics.to_json())
    assert (dumped["mode"], dumped["seed"]) == ("Baseline", 7)
    assert set(dumped["services"]) == {"Voice", "Video"}


@pytest.fixture(scope="module")
def desk_runs():
    return {
        mode: [run_simulation(desk_config(seed), mode) for seed in range(DESK_SEEDS)]
        for mode in (Mode.Baseline, Mode.TrasoNET)
    }


def test_recommendations_beat_cellular_only(desk_runs):
    for service in (Service.Voice, Service.Video):
        baseline = np.mean([m.services[service].success_probability for m in desk_runs[Mode.Baseline]])
        trasonet = np.mean([m.services[service].success_probability for m in desk_runs[Mode.TrasoNET]])
        assert trasonet > baseline

    assert np.mean([m.services[Service.Video].offload_fraction for m in desk_runs[Mode.TrasoNET]]) > 0.0


def test_cellular_only_fails_voice_in_dense_cells(desk_runs):
    sessions = 0
    successes = 0.0
    for metrics in desk_runs[Mode.Baseline]:
        for b in metrics.services[Service.Voice].density_bins:
            if b.lower >= 0.04 and b.n_sessions:
                sessions += b.n_sessions
                successes += b.success_probability * b.n_sessions

    assert sessions > 0
    assert successes / sessions < 0.05


def _saturated_bins(runs, service):
    pooled = {}
    for metrics in runs:
        for b in metrics.services[service].density_bins:
            if b.lower >= 0.04 and b.n_sessions:
                sessions, successes = pooled.get(b.lower, (0, 0.0))
                pooled[b.lower] = (sessions + b.n_sessions, successes + b.success_probability * b.n_sessions)
    return pooled


def test_recommendations_never_lose_a_saturated_bin(desk_runs):
    for service in (Service.Voice, Service.Video):
        baseline = _saturated_bins(desk_runs[Mode.Baseline], service)
        trasonet = _saturated_bins(desk_runs[Mode.TrasoNET], service)

        for lower in baseline.keys() & trasonet.keys():
            assert trasonet[lower][1] / trasonet[lower][0] >= baseline[lower][1] / baseline[lower][0]

    def pooled_success(runs):
        bins = _saturated_bins(runs, Service.Voice).values()
        return sum(s for _, s in bins) / sum(n for n, _ in bins)

    assert pooled_success(desk_runs[Mode.TrasoNET]) > pooled_success(desk_runs[Mode.Baseline])
