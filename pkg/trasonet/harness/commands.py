import asyncio
import csv
import functools
import json
import logging
import time
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np

from trasonet.ahp.models import ComparisonMatrix
from trasonet.ahp.priority import consistency, priority_vector
from trasonet.ahp.recommend import recommendation_map, write_recommendation_csv
from trasonet.completion.als import complete_matrix
from trasonet.completion.experiment import sample_rate_sweep, synthetic_low_rank, uniform_mask
from trasonet.completion.io import write_completion_csv, write_sweep_csv
from trasonet.completion.metrics import estimation_error, relative_frobenius_error
from trasonet.completion.models import CompletionParams, CompletionResult
from trasonet.config import ScenarioConfig, load_config, revalidate
from trasonet.exception import (
    ConfigurationException,
    EstimateUnavailableException,
    IncompleteRulebaseException,
    InvalidComparisonMatrixException,
    InvariantViolationException,
    MultipleExceptions,
    UnsupportedDimensionException,
)
from trasonet.harness.manifest import RunManifest, start_manifest
from trasonet.harness.replicas import run_replicas, summarize, write_summary_csv
from trasonet.models import Mode
from trasonet.netsim.main import run_simulation
from trasonet.netsim.models import write_metrics
from trasonet.scenario.infrastructure import build_deployment
from trasonet.scenario.mobility import step_mobility
from trasonet.scenario.placement import place_vehicles
from trasonet.scenario.road_network import build_road_network, build_social_spots
from trasonet.sensing.entropy import average_entropy
from trasonet.sensing.io import read_reports_csv, write_traffic_matrix_csv
from trasonet.sensing.models import TrafficMatrix
from trasonet.sensing.reports import emit_reports
from trasonet.sensing.traffic_matrix import build_traffic_matrix
from trasonet.utils.filesystem import resolve_output_dir
from trasonet.utils.rng import spawn_generators
from trasonet.utils.table import read_matrix_csv, write_csv

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_INVARIANT_VIOLATION = 3

ERROR_HEADER = ("estimation_error", "relative_frobenius", "average_entropy", "observed_share", "fit_residual")

_INPUT_ERRORS = (
    ConfigurationException,
    InvalidComparisonMatrixException,
    UnsupportedDimensionException,
    IncompleteRulebaseException,
    EstimateUnavailableException,
    json.JSONDecodeError,
    csv.Error,
    OSError,
)


def exit_codes(command):
    """
    Turn the exceptions of a command into its exit code: 2 for unusable input, 3 for a broken
    runtime invariant.
    """

    @functools.wraps(command)
    def wrapper(*args, **kwargs) -> int:
        try:
            return command(*args, **kwargs)
        except InvariantViolationException as e:
            logger.error(f"Invariant violated: {e}")
            return EXIT_INVARIANT_VIOLATION
        except MultipleExceptions as e:
            logger.error(str(e))
            if any(isinstance(inner, InvariantViolationException) for inner in e.exceptions):
                return EXIT_INVARIANT_VIOLATION
            if all(isinstance(inner, _INPUT_ERRORS) for inner in e.exceptions):
                return EXIT_INPUT_ERROR
            raise
        except _INPUT_ERRORS as e:
            logger.error(f"{type(e).__name__}: {e}")
            return EXIT_INPUT_ERROR

    return wrapper


def _finish(manifest: RunManifest, started: float):
    manifest.duration_s = time.monotonic() - started
    manifest.write()


def _with_seed(config: ScenarioConfig, seed: Optional[int]) -> ScenarioConfig:
    if seed is None:
        return config
    return revalidate(config.model_copy(update={"rng_seed": seed}))


@exit_codes
def cmd_simulate(
    config_path: Union[str, Path],
    mode: Mode = Mode.TrasoNET,
    seed: Optional[int] = None,
    out: Optional[Union[str, Path]] = None,
    replicas: int = 1,
) -> int:
    """
    Simulate one config and write `metrics.json`, `timeseries.csv` and `density.csv`. With several
    replicas every seed gets `seed<N>_`-prefixed files and `summary.json`/`summary.csv` hold the
    mean and standard deviation over the seeds.
    """
    started = time.monotonic()
    mode = Mode(mode)
    if replicas < 1:
        raise ConfigurationException("replicas must be >= 1")
    config = _with_seed(load_config(config_path), seed)
    out_dir = resolve_output_dir(out)
    manifest = start_manifest("simulate", out_dir, config_path, config.rng_seed, mode.value)

    if replicas == 1:
        metrics = run_simulation(config, mode)
        write_metrics(out_dir, metrics)
    else:
        seeds = [config.rng_seed + i for i in range(replicas)]
        results = asyncio.run(run_replicas(config, mode, seeds))
        for metrics in results:
            write_metrics(out_dir, metrics, prefix=f"seed{metrics.seed}_")
        summary = summarize(results)
        (out_dir / "summary.json").write_text(summary.model_dump_json(indent=2) + "\n", encoding="utf-8")
        write_summary_csv(out_dir / "summary.csv", summary)

    _finish(manifest, started)
    logger.info(f"Simulation results written to {out_dir}")
    return EXIT_OK


def parse_sweep(sweep: str) -> List[float]:
    """
    Parse `sample_rate=0.1,0.2,0.3` into the list of rates.
    """
    name, _, values = sweep.partition("=")
    if name.strip() != "sample_rate" or not values:
        raise ConfigurationException(f"unsupported sweep {sweep!r}, expected sample_rate=<r1>,<r2>,...")
    try:
        rates = [float(v) for v in values.split(",") if v.strip()]
    except ValueError as e:
        raise ConfigurationException(f"invalid sweep rates in {sweep!r}: {e}") from e
    if not rates or any(not 0.0 < r <= 1.0 for r in rates):
        raise ConfigurationException(f"sweep rates must be in (0, 1], got {rates}")
    return rates


def _completion_params(
    base: CompletionParams, rank: Optional[int], max_iterations: Optional[int], tol: Optional[float]
) -> CompletionParams:
    update = {}
    if rank is not None:
        update["target_rank"] = rank
    if max_iterations is not None:
        update["max_iterations"] = max_iterations
    if tol is not None:
        update["convergence_tol"] = tol
    try:
        return CompletionParams.model_validate({**base.model_dump(), **update})
    except ValueError as e:
        raise ConfigurationException(f"invalid completion parameters: {e}") from e


def _write_estimate(
    out_dir: Path,
    matrix: TrafficMatrix,
    result: CompletionResult,
    truth: Optional[np.ndarray],
):
    write_traffic_matrix_csv(out_dir, matrix)
    write_completion_csv(out_dir, result)
    if truth is None:
        # no ground truth for sensed traffic
        error = relative = float("nan")
    else:
        error = estimation_error(result.estimate, truth, matrix.mask)
        relative = relative_frobenius_error(result.estimate, truth, matrix.mask)
    observed = float(matrix.mask.mean()) if matrix.mask.size else 0.0
    write_csv(
        out_dir / "error.csv",
        ERROR_HEADER,
        [(error, relative, average_entropy(matrix), observed, float(result.fit_residual))],
    )
    logger.info(f"Estimate written to {out_dir}: error {error:.4f}, entropy {average_entropy(matrix):.4f}")


@exit_codes
def cmd_estimate(
    out: Optional[Union[str, Path]] = None,
    reports_path: Optional[Union[str, Path]] = None,
    config_path: Optional[Union[str, Path]] = None,
    synthetic: bool = False,
    n_rows: int = 100,
    n_cols: int = 96,
    rank: int = 4,
    sample_rate: float = 0.3,
    noise_kmh: float = 0.0,
    seed: int = 2013,
    n_seeds: int = 1,
    sweep: Optional[str] = None,
    max_iterations: Optional[int] = None,
    tol: Optional[float] = None,
) -> int:
    """
    Complete a traffic matrix sensed from a reports CSV (map-matched on the config's road network) or a
    synthetic low-rank one, or sweep the sampling rate over synthetic matrices.
    """
    started = time.monotonic()
    out_dir = resolve_output_dir(out)

    if sweep is not None:
        rates = parse_sweep(sweep)
        manifest = start_manifest("estimate", out_dir, seed=seed, mode="sweep")
        params = _completion_params(CompletionParams(target_rank=rank), None, max_iterations, tol)
        points = sample_rate_sweep(
            rates, [seed + i for i in range(n_seeds)], n_rows, n_cols, rank, noise_kmh=noise_kmh, params=params
        )
        write_sweep_csv(out_dir / "sweep.csv", points)
        _finish(manifest, started)
        return EXIT_OK

    if synthetic:
        if not 0.0 < sample_rate <= 1.0:
            raise ConfigurationException(f"sample rate must be in (0, 1], got {sample_rate}")
        manifest = start_manifest("estimate", out_dir, seed=seed, mode="synthetic")
        params = _completion_params(CompletionParams(), rank, max_iterations, tol)
        speed_limit = params.speed_bounds[1]
        streams = spawn_generators(seed)
        truth = synthetic_low_rank(n_rows, n_cols, rank, speed_limit, streams["synthetic"])
        mask = uniform_mask(truth.shape, sample_rate, streams["sensing"])
        observed = truth
        if noise_kmh > 0:
            observed = np.clip(truth + streams["sensing"].normal(0.0, noise_kmh, truth.shape), 0.0, speed_limit)
        matrix = TrafficMatrix.from_dense(observed, mask)
        _write_estimate(out_dir, matrix, complete_matrix(matrix, params), truth)
        _finish(manifest, started)
        return EXIT_OK

    if reports_path is None or config_path is None:
        raise ConfigurationException("estimate needs --reports with --config, --synthetic or --sweep")
    config = load_config(config_path)
    manifest = start_manifest("estimate", out_dir, config_path, config.rng_seed, "reports")
    network = build_road_network(config)
    reports = read_reports_csv(reports_path)
    matrix = build_traffic_matrix(reports, network, config.horizon_cycles)
    params = _completion_params(config.completion, rank, max_iterations, tol)
    params = params.model_copy(update={"target_rank": min(params.target_rank, *matrix.shape)})
    _write_estimate(out_dir, matrix, complete_matrix(matrix, params), None)
    _finish(manifest, started)
    return EXIT_OK


def sense_and_complete(config: ScenarioConfig) -> CompletionResult:
    """
    Drive the fleet over the whole horizon, sense the traffic from the probe reports and complete it.
    """
    streams = spawn_generators(config.rng_seed)
    network = build_road_network(config)
    spots = build_social_spots(config)
    vehicles = place_vehicles(config, network, streams["placement"])
    reports = []
    for cycle in range(config.horizon_cycles):
        vehicles = step_mobility(vehicles, network, config.duty_cycle_s, streams["mobility"], spots)
        reports.extend(emit_reports(vehicles, cycle))
    matrix = build_traffic_matrix(reports, network, config.horizon_cycles)
    rank = min(config.completion.target_rank, *matrix.shape)
    return complete_matrix(matrix, config.completion.model_copy(update={"target_rank": rank}))


def read_estimate(path: Union[str, Path], n_segments: int) -> CompletionResult:
    """
    Read an `estimate.csv` written by `estimate`.

    :raises EstimateUnavailableException: When the file does not exist
    :raises ConfigurationException: When it cannot be parsed or does not fit the road network
    """
    path = Path(path)
    if not path.is_file():
        raise EstimateUnavailableException(f"no estimate at {path}, run `estimate` first or pass --fresh")
    try:
        estimate = read_matrix_csv(path)
    except ValueError as e:
        raise ConfigurationException(f"cannot parse estimate {path}: {e}") from e
    if estimate.shape[0] != n_segments:
        raise ConfigurationException(f"estimate has {estimate.shape[0]} rows, the road network has {n_segments} segments")
    return CompletionResult(estimate=estimate, iterations_used=0, converged=True, fit_residual=0.0)


@exit_codes
def cmd_recommend(
    config_path: Union[str, Path],
    estimate_path: Optional[Union[str, Path]] = None,
    fresh: bool = False,
    out: Optional[Union[str, Path]] = None,
) -> int:
    """
    Write `recommendation.csv`: the network indices of every cell for both services, computed from
    the initial vehicle placement and a traffic estimate (read, or sensed and completed with --fresh).
    """
    started = time.monotonic()
    config = load_config(config_path)
    network = build_road_network(config)
    if fresh:
        estimate = sense_and_complete(config)
    elif estimate_path is not None:
        estimate = read_estimate(estimate_path, network.n_segments)
    else:
        raise EstimateUnavailableException("recommend needs --estimate or --fresh")

    out_dir = resolve_output_dir(out)
    manifest = start_manifest("recommend", out_dir, config_path, config.rng_seed)
    deployment = build_deployment(config, network)
    vehicles = place_vehicles(config, network, spawn_generators(config.rng_seed)["placement"])
    rec_map = recommendation_map(estimate, config, vehicles, network, deployment)
    path = write_recommendation_csv(out_dir / "recommendation.csv", rec_map)
    _finish(manifest, started)
    logger.info(f"Recommendation map written to {path}")
    return EXIT_OK


def _is_number(cell: str) -> bool:
    try:
        Fraction(cell.strip())
    except (ValueError, ZeroDivisionError):
        return False
    return True


def read_comparison_csv(path: Union[str, Path]) -> ComparisonMatrix:
    """
    Read a comparison matrix; a header row and a label column are skipped when present.
    """
    with Path(path).open("r", encoding="utf-8", newline="") as f:
        rows = [row for row in csv.reader(f) if any(cell.strip() for cell in row)]
    if rows and not all(_is_number(cell) for cell in rows[0] if cell.strip()):
        rows = rows[1:]
    if rows and all(row and not _is_number(row[0]) for row in rows):
        rows = [row[1:] for row in rows]
    return ComparisonMatrix.from_csv_rows(rows)


def format_ahp_report(matrix: ComparisonMatrix, labels: Optional[Sequence[str]] = None) -> str:
    weights = priority_vector(matrix).weights
    report = consistency(matrix)
    labels = labels or [f"c{i}" for i in range(matrix.n)]
    lines = [f"{label}\t{w:.4f}" for label, w in zip(labels, weights)]
    lines += [
        f"lambda_max\t{report.lambda_max:.4f}",
        f"CI\t{report.ci:.4f}",
        f"CR\t{report.cr:.4f}",
        f"acceptable\t{'yes' if report.acceptable else 'no'}",
    ]
    return "\n".join(lines)


@exit_codes
def cmd_ahp(matrix_path: Union[str, Path]) -> int:
    """
    Print the priority vector, lambda_max, CI, CR and acceptability of a comparison matrix CSV.
    """
    matrix = read_comparison_csv(matrix_path)
    matrix.check()
    print(format_ahp_report(matrix))
    return EXIT_OK
