import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from trasonet.completion.als import complete_matrix
from trasonet.completion.metrics import estimation_error, relative_frobenius_error
from trasonet.completion.models import PolicyComparison, SweepPoint
from trasonet.config import CompletionParams, ScenarioConfig
from trasonet.scenario.road_network import build_road_network
from trasonet.sensing.entropy import mask_entropy
from trasonet.sensing.fc_planner import apply_routes, plan_fc_routes, random_fc_routes
from trasonet.sensing.models import TrafficMatrix
from trasonet.utils.rng import spawn_generators

logger = logging.getLogger(__name__)


def synthetic_low_rank(
    n_rows: int, n_cols: int, rank: int, speed_limit: float, rng: np.random.Generator
) -> np.ndarray:
    """
    Ground truth speeds X = A @ B.T with nonnegative factors, scaled so the fastest cell
    runs at 90% of the speed limit.
    """
    a = rng.uniform(0.2, 1.0, size=(n_rows, rank))
    b = rng.uniform(0.2, 1.0, size=(n_cols, rank))
    x = a @ b.T
    return x * (0.9 * speed_limit / x.max())


def uniform_mask(shape: Tuple[int, int], rate: float, rng: np.random.Generator) -> np.ndarray:
    return rng.random(shape) < rate


def social_mask(
    n_rows: int,
    n_cols: int,
    rng: np.random.Generator,
    unsampled_share: float = 0.3,
    mean_rate: float = 0.2,
) -> np.ndarray:
    """
    Probe sampling that follows where probe vehicles like to drive: a share of roads is never
    sampled and the others get heavily skewed per-road rates.
    """
    concentration = 0.5
    rates = rng.beta(concentration, concentration * (1 - mean_rate) / mean_rate, size=n_rows)
    mask = rng.random((n_rows, n_cols)) < rates[:, None]
    mask[rng.random(n_rows) < unsampled_share] = False
    return mask


def _masked(truth: np.ndarray, mask: np.ndarray) -> TrafficMatrix:
    return TrafficMatrix.from_dense(truth, mask)


def compare_fc_policies(
    seed: int,
    n_vertical_streets: int = 10,
    n_horizontal_streets: int = 11,
    horizon: int = 96,
    n_fc: int = 10,
    rank: int = 4,
    speed_limit: float = 80.0,
    params: Optional[CompletionParams] = None,
) -> PolicyComparison:
    """
    Top up one probe-vehicle sampling with the same number of floating car visits, once planned
    by count balancing and once by random walks, then complete both matrices.

    :param seed: Seed of the truth, the probe sampling and the random walks
    :return: Entropy and estimation error of both policies
    """
    config = ScenarioConfig(
        n_vertical_streets=n_vertical_streets,
        n_horizontal_streets=n_horizontal_streets,
        horizon_cycles=horizon,
        speed_limit_kmh=speed_limit,
        rng_seed=seed,
    )
    network = build_road_network(config)
    params = params or CompletionParams(target_rank=rank, speed_bounds=(0.0, speed_limit))
    streams = spawn_generators(seed)

    truth = synthetic_low_rank(network.n_segments, horizon, rank, speed_limit, streams["synthetic"])
    pv_mask = social_mask(network.n_segments, horizon, streams["sensing"])

    planned = plan_fc_routes(n_fc, _masked(truth, pv_mask), network, horizon)
    walked = random_fc_routes(n_fc, network, horizon, streams["fleet"])
    planned_mask = apply_routes(pv_mask, planned)
    walked_mask = apply_routes(pv_mask, walked)

    planned_result = complete_matrix(_masked(truth, planned_mask), params)
    walked_result = complete_matrix(_masked(truth, walked_mask), params)
    comparison = PolicyComparison(
        seed=seed,
        entropy_planned=mask_entropy(planned_mask),
        entropy_random=mask_entropy(walked_mask),
        error_planned=estimation_error(planned_result.estimate, truth, planned_mask),
        error_random=estimation_error(walked_result.estimate, truth, walked_mask),
    )
    logger.debug(f"FC policies for seed {seed}: {comparison}")
    return comparison


def sample_rate_sweep(
    rates: Sequence[float],
    seeds: Sequence[int],
    n_rows: int = 100,
    n_cols: int = 96,
    rank: int = 4,
    speed_limit: float = 80.0,
    noise_kmh: float = 1.0,
    params: Optional[CompletionParams] = None,
) -> List[SweepPoint]:
    """
    Estimation error and sampling entropy of synthetic low-rank traffic under uniform sampling
    at each rate. Observations carry Gaussian noise of `noise_kmh`; errors are measured against
    the noiseless truth.
    """
    params = params or CompletionParams(target_rank=rank, speed_bounds=(0.0, speed_limit))
    points = []
    for seed in seeds:
        streams = spawn_generators(seed)
        truth = synthetic_low_rank(n_rows, n_cols, rank, speed_limit, streams["synthetic"])
        noisy = np.clip(truth + streams["sensing"].normal(0.0, noise_kmh, truth.shape), 0.0, speed_limit)
        for rate in rates:
            mask = uniform_mask(truth.shape, rate, np.random.default_rng([seed, int(round(rate * 1000))]))
            result = complete_matrix(_masked(noisy, mask), params)
            points.append(
                SweepPoint(
                    rate=rate,
                    seed=seed,
                    entropy=mask_entropy(mask),
                    error=estimation_error(result.estimate, truth, mask),
                    relative_frobenius=relative_frobenius_error(result.estimate, truth, mask),
                )
            )
    logger.info(f"Swept {len(rates)} sample rates over {len(seeds)} seeds")
    return points
