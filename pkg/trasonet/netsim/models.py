from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Union

from pydantic import BaseModel

from trasonet.models import Mode, NetworkOption, Service
from trasonet.utils.table import write_csv


class NodeKind(str, Enum):
    ENB = "ENB"
    RSU = "RSU"

    @property
    def network(self) -> NetworkOption:
        return NetworkOption.Cellular if self is NodeKind.ENB else NetworkOption.VANET


class Attachment(BaseModel):
    session_id: int
    node_kind: NodeKind
    node_index: int
    demand: float
    "Mbps."


class Grant(BaseModel):
    rate: float
    "Mbps."
    delay_ms: float


class BillingAccount(BaseModel):
    """
    VANET usage of one vehicle over the simulated billing period.
    """

    vanet_megabits: float = 0.0
    flat_charged: bool = False


class DensityBin(BaseModel):
    lower: float
    upper: float
    n_sessions: int
    success_probability: Optional[float]
    "None when no session started in the bin."


class ServiceMetrics(BaseModel):
    n_sessions: int
    no_sessions: bool
    success_probability: float
    offload_fraction: float
    mean_cost: float
    "RMB per session."
    handover_count: int
    density_bins: List[DensityBin]


class CycleRecord(BaseModel):
    cycle: int
    service: Service
    mode: Mode
    success: float
    "Share of the sessions active in this cycle that got their rate within the delay bound."
    offload: float
    cost: float
    handover_count: int


class SimMetrics(BaseModel):
    mode: Mode
    seed: int
    services: Dict[Service, ServiceMetrics]
    time_series: List[CycleRecord]

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)


TIME_SERIES_HEADER = ("cycle", "service", "mode", "success", "offload", "cost", "handover_count")
DENSITY_HEADER = ("service", "mode", "bin_lower", "bin_upper", "n_sessions", "success")


def write_metrics(directory: Union[str, Path], metrics: SimMetrics, prefix: str = "") -> List[Path]:
    """
    Write `metrics.json`, the per-cycle `timeseries.csv` and the per-density-bin `density.csv`.
    """
    directory = Path(directory)
    json_path = directory / f"{prefix}metrics.json"
    json_path.write_text(metrics.to_json() + "\n", encoding="utf-8")
    series = write_csv(
        directory / f"{prefix}timeseries.csv",
        TIME_SERIES_HEADER,
        (
            (r.cycle, r.service, r.mode, float(r.success), float(r.offload), float(r.cost), r.handover_count)
            for r in metrics.time_series
        ),
    )
    density = write_csv(
        directory / f"{prefix}density.csv",
        DENSITY_HEADER,
        (
            (
                service,
                metrics.mode,
                float(b.lower),
                float(b.upper),
                b.n_sessions,
                float("nan") if b.success_probability is None else float(b.success_probability),
            )
            for service, m in metrics.services.items()
            for b in m.density_bins
        ),
    )
    return [json_path, series, density]
