import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from typing_extensions import Self

from trasonet.constants import RIDGE
from trasonet.exception import ConfigurationException

logger = logging.getLogger(__name__)

Position = Tuple[float, float]


def _street(k: int, n_streets: int = 20, extent_m: float = 10_000.0) -> float:
    return extent_m * k / (n_streets - 1)


# spots sit on intersections of the default grid
DEFAULT_SOCIAL_SPOTS: List[Position] = [
    (_street(9), _street(9)),
    (_street(4), _street(4)),
    (_street(14), _street(4)),
    (_street(4), _street(14)),
    (_street(14), _street(14)),
]


class NetworkParams(BaseModel):
    """
    Capacity, delay and pricing of the cellular network (eNBs) and the VANET (RSUs).
    """

    model_config = ConfigDict(extra="forbid")

    enb_grid_spacing_m: float = 2500.0
    enb_capacity_mbps: float = 100.0
    "Shared by all sessions attached to one eNB."
    rsu_positions: Optional[List[Position]] = None
    "Explicit RSU positions; when unset RSUs are laid along streets near the social spots."
    rsu_spacing_m: float = 500.0
    rsu_zone_radius_m: float = 1500.0
    rsu_radius_m: float = 200.0
    rsu_capacity_mbps: float = 10.0
    "Shared by all sessions attached to one RSU."
    cellular_base_delay_ms: float = 50.0
    vanet_delay_per_user_ms: float = 10.0
    cellular_price_per_mb: float = 1.0
    "RMB per megabit."
    vanet_flat_price: float = 10.0
    "RMB per vehicle per billing period."
    vanet_data_cap_mb: float = 2000.0
    "Megabits covered by the flat price; cellular pricing applies beyond it."

    @model_validator(mode="after")
    def _check_positive(self) -> Self:
        for name in (
            "enb_grid_spacing_m",
            "enb_capacity_mbps",
            "rsu_spacing_m",
            "rsu_zone_radius_m",
            "rsu_radius_m",
            "rsu_capacity_mbps",
            "cellular_base_delay_ms",
            "vanet_delay_per_user_ms",
            "vanet_data_cap_mb",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.cellular_price_per_mb < 0 or self.vanet_flat_price < 0:
            raise ValueError("prices must be >= 0")
        return self


class CompletionParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    target_rank: int = 4
    max_iterations: int = 500
    convergence_tol: float = 1e-6
    "Relative Frobenius change between iterations."
    speed_bounds: Tuple[float, float] = (0.0, 80.0)
    ridge: float = RIDGE

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.target_rank < 1:
            raise ValueError("target_rank must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.convergence_tol <= 0:
            raise ValueError("convergence_tol must be > 0")
        lo, hi = self.speed_bounds
        if lo < 0 or hi <= lo:
            raise ValueError(f"invalid speed_bounds {self.speed_bounds}")
        if self.ridge < 0:
            raise ValueError("ridge must be >= 0")
        return self


class HandoverPolicy(BaseModel):
    model_config = ConfigDict(extra="forbid")

    qos_improvement_threshold: float = 0.15
    dwell_threshold_cycles: int = 3
    trust: float = 0.8
    "Initial trust on the access recommender."
    trust_smoothing: float = 0.2

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.qos_improvement_threshold <= 0 or self.dwell_threshold_cycles <= 0:
            raise ValueError("handover thresholds must be > 0")
        if not 0.0 <= self.trust <= 1.0:
            raise ValueError("trust must be in [0, 1]")
        if not 0.0 < self.trust_smoothing < 1.0:
            raise ValueError("trust_smoothing must be in (0, 1)")
        return self


class ScenarioConfig(BaseModel):
    """
    Definition of one simulated city and run.

    Defaults mirror the case study: 5 social spots, 20,000 vehicles on a 10 km x 10 km grid
    of 20 vertical and 20 horizontal streets, power-law exponent 2 and 260 floating cars.
    """

    model_config = ConfigDict(extra="forbid")

    map_width_m: float = 10_000.0
    map_height_m: float = 10_000.0
    n_vertical_streets: int = 20
    n_horizontal_streets: int = 20
    social_spots: List[Position] = Field(default_factory=lambda: list(DEFAULT_SOCIAL_SPOTS))
    n_vehicles: int = 20_000
    gamma: float = 2.0
    n_probe_vehicles: int = 2_000
    n_floating_cars: int = 260
    duty_cycle_s: float = 30.0
    horizon_cycles: int = 96
    speed_limit_kmh: float = 80.0
    rng_seed: int = 2013
    service_mix: float = 0.5
    "Fraction of sessions that are voice."
    network: NetworkParams = Field(default_factory=NetworkParams)

    mobility_radius_m: float = 2500.0
    n_tiers: int = 10
    session_rate_per_s: float = 1.0 / 600.0
    "Poisson session arrival rate of an idle vehicle."
    refresh_cycles: int = 10
    "Cycles between traffic-matrix rebuilds and recommendation refreshes."
    cell_size_m: float = 500.0
    rulebase_path: Optional[str] = None
    completion: CompletionParams = Field(default_factory=CompletionParams)
    access: HandoverPolicy = Field(default_factory=HandoverPolicy)

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.map_width_m <= 0 or self.map_height_m <= 0:
            raise ValueError("map dimensions must be > 0")
        if self.n_vertical_streets < 2 or self.n_horizontal_streets < 2:
            raise ValueError("street counts must be >= 2")
        n_reporting = self.n_probe_vehicles + self.n_floating_cars
        if self.n_probe_vehicles < 0 or self.n_floating_cars < 0:
            raise ValueError("probe and floating car counts must be >= 0")
        if not 0 < n_reporting <= self.n_vehicles:
            raise ValueError(
                f"need 0 < n_probe_vehicles + n_floating_cars <= n_vehicles, got {n_reporting} of {self.n_vehicles}"
            )
        if self.gamma <= 0:
            raise ValueError("gamma must be > 0")
        if not self.social_spots:
            raise ValueError("at least one social spot is required")
        for x, y in self.social_spots:
            if not (0 <= x <= self.map_width_m and 0 <= y <= self.map_height_m):
                raise ValueError(f"social spot ({x}, {y}) is outside the map")
        if not 0.0 <= self.service_mix <= 1.0:
            raise ValueError("service_mix must be in [0, 1]")
        if self.duty_cycle_s <= 0 or self.horizon_cycles < 1:
            raise ValueError("duty_cycle_s must be > 0 and horizon_cycles >= 1")
        if self.speed_limit_kmh <= 0:
            raise ValueError("speed_limit_kmh must be > 0")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must be a 64-bit unsigned integer")
        if self.mobility_radius_m <= 0 or self.n_tiers < 1:
            raise ValueError("mobility_radius_m must be > 0 and n_tiers >= 1")
        if self.session_rate_per_s < 0:
            raise ValueError("session_rate_per_s must be >= 0")
        if self.refresh_cycles < 1 or self.cell_size_m <= 0:
            raise ValueError("refresh_cycles must be >= 1 and cell_size_m > 0")
        if "speed_bounds" not in self.completion.model_fields_set:
            self.completion = self.completion.model_copy(
                update={"speed_bounds": (0.0, self.speed_limit_kmh)}
            )
        return self

    @property
    def n_reporting(self) -> int:
        return self.n_probe_vehicles + self.n_floating_cars

    @classmethod
    def from_json(cls, text: Union[str, bytes]) -> "ScenarioConfig":
        try:
            return cls.model_validate_json(text)
        except ValidationError as e:
            raise ConfigurationException(f"invalid scenario config: {e}") from e


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    """
    Read a scenario config from a JSON file.

    :param path: Path to the JSON document
    :return: Validated config
    """
    try:
        text = Path(path).read_bytes()
    except OSError as e:
        raise ConfigurationException(f"cannot read config {path}: {e}") from e
    config = ScenarioConfig.from_json(text)
    logger.debug(f"Loaded scenario config from {path}")
    return config


def revalidate(config: ScenarioConfig) -> ScenarioConfig:
    """
    Re-run validation on a config that may have been built with `model_construct` or `model_copy`.
    """
    try:
        return ScenarioConfig.model_validate(config.model_dump())
    except ValidationError as e:
        raise ConfigurationException(f"invalid scenario config: {e}") from e
