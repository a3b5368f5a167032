from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field

from trasonet.constants import (
    VIDEO_DELAY_BOUND_MS,
    VIDEO_MEAN_DURATION_S,
    VIDEO_RATE_MBPS,
    VOICE_DELAY_BOUND_MS,
    VOICE_MEAN_DURATION_S,
    VOICE_RATE_MBPS,
)


class Axis(str, Enum):
    Vertical = "Vertical"
    Horizontal = "Horizontal"


class Role(str, Enum):
    Regular = "Regular"
    ProbeVehicle = "ProbeVehicle"
    FloatingCar = "FloatingCar"


class NetworkOption(str, Enum):
    Cellular = "Cellular"
    VANET = "VANET"

    @property
    def other(self) -> "NetworkOption":
        if self is NetworkOption.Cellular:
            return NetworkOption.VANET
        return NetworkOption.Cellular


class Service(str, Enum):
    Voice = "Voice"
    Video = "Video"

    @property
    def demand_mbps(self) -> float:
        return VOICE_RATE_MBPS if self is Service.Voice else VIDEO_RATE_MBPS

    @property
    def mean_duration_s(self) -> float:
        return VOICE_MEAN_DURATION_S if self is Service.Voice else VIDEO_MEAN_DURATION_S

    @property
    def delay_bound_ms(self) -> float:
        return VOICE_DELAY_BOUND_MS if self is Service.Voice else VIDEO_DELAY_BOUND_MS


class Mode(str, Enum):
    Baseline = "Baseline"
    TrasoNET = "TrasoNET"


NETWORKS = (NetworkOption.Cellular, NetworkOption.VANET)
SERVICES = (Service.Voice, Service.Video)


class SessionState(BaseModel):
    """
    A voice or video session carried by one vehicle.
    """

    session_id: int
    vehicle_id: int
    service: Service
    demand_rate: float
    "Demanded rate in Mbps."
    duration_s: float
    start_cycle: int
    attached_network: NetworkOption = NetworkOption.Cellular
    spawn_density: float = 0.0
    "Local vehicle density (vehicles per street metre) when the session started."
    achieved_rate_history: List[float] = Field(default_factory=list)
    delay_history: List[float] = Field(default_factory=list)
    cost_accrued: float = 0.0
    "RMB."
    vanet_megabits: float = 0.0
    total_megabits: float = 0.0
    last_qos: Optional[float] = None
    handovers: int = 0

    @property
    def n_cycles(self) -> int:
        return len(self.achieved_rate_history)

    def satisfied_share(self) -> float:
        """
        Share of observed cycles where both the demanded rate and the delay bound were met.
        """
        if not self.achieved_rate_history:
            return 0.0
        bound = self.service.delay_bound_ms
        # 1e-9 absorbs the float error of the fair-share split
        ok = sum(
            1
            for rate, delay in zip(self.achieved_rate_history, self.delay_history)
            if rate >= self.demand_rate * (1 - 1e-9) and delay <= bound
        )
        return ok / len(self.achieved_rate_history)
