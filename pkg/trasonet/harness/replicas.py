import asyncio
import logging
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel

from trasonet.config import ScenarioConfig
from trasonet.constants import MAX_WORKERS
from trasonet.exception import MultipleExceptions
from trasonet.models import Mode, Service
from trasonet.netsim.main import run_simulation
from trasonet.netsim.models import SimMetrics
from trasonet.utils.table import write_csv
from trasonet.utils.threads import shutdown_executor

logger = logging.getLogger(__name__)

SUMMARY_HEADER = ("service", "metric", "mean", "std", "n_replicas")
_SUMMARY_METRICS = ("success_probability", "offload_fraction", "mean_cost", "handover_count")


class ReplicaSummary(BaseModel):
    mode: Mode
    seeds: List[int]
    mean: Dict[Service, Dict[str, float]]
    std: Dict[Service, Dict[str, float]]


def summarize(metrics: Sequence[SimMetrics]) -> ReplicaSummary:
    """
    Mean and population standard deviation of every service metric over the replicas.
    """
    if not metrics:
        raise ValueError("no replica to summarize")
    mean: Dict[Service, Dict[str, float]] = {}
    std: Dict[Service, Dict[str, float]] = {}
    for service in metrics[0].services:
        mean[service] = {}
        std[service] = {}
        for name in _SUMMARY_METRICS:
            values = np.array([float(getattr(m.services[service], name)) for m in metrics])
            mean[service][name] = float(values.mean())
            std[service][name] = float(values.std())
    return ReplicaSummary(mode=metrics[0].mode, seeds=[m.seed for m in metrics], mean=mean, std=std)


def write_summary_csv(path: Union[str, Path], summary: ReplicaSummary) -> Path:
    return write_csv(
        path,
        SUMMARY_HEADER,
        (
            (service, name, summary.mean[service][name], summary.std[service][name], len(summary.seeds))
            for service in summary.mean
            for name in _SUMMARY_METRICS
        ),
    )


def _raise_failures(failures: List[BaseException]):
    if len(failures) == 1:
        raise failures[0]

    error_message = "\n"
    for i, e in enumerate(failures):
        stack_trace = "\n".join(traceback.extract_tb(e.__traceback__).format())
        error_message += f'\n[{i}]: {type(e).__name__}("{e}"):\n{stack_trace}\n'
    raise MultipleExceptions(message=error_message, exceptions=failures)


async def run_replicas(
    config: ScenarioConfig,
    mode: Mode,
    seeds: Sequence[int],
    max_workers: Optional[int] = None,
) -> List[SimMetrics]:
    """
    Run one simulation per seed concurrently. Replicas share nothing, the results keep the order of `seeds`.

    :raises MultipleExceptions: When more than one replica failed; a single failure is re-raised as is
    """
    executor = ThreadPoolExecutor(max_workers=max_workers or MAX_WORKERS)
    loop = asyncio.get_running_loop()
    try:
        tasks = [
            loop.run_in_executor(
                executor, run_simulation, config.model_copy(update={"rng_seed": seed}), mode
            )
            for seed in seeds
        ]
        logger.info(f"Running {len(tasks)} {Mode(mode).value} replicas")
        results = await asyncio.gather(*tasks, return_exceptions=True)
    finally:
        shutdown_executor(executor)

    failures = [r for r in results if isinstance(r, BaseException)]
    if failures:
        logger.error(f"{len(failures)} of {len(results)} replicas failed")
        _raise_failures(failures)
    return list(results)
