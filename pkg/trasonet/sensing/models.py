import math
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from typing_extensions import Self

from trasonet.config import Position


class GpsReport(BaseModel):
    """
    A GPS reading sent by a probe vehicle or floating car once per duty cycle.
    """

    vehicle_id: int
    cycle_index: int
    position: Position
    speed_kmh: float
    heading: Tuple[float, float]
    "Unit direction of travel."

    @property
    def heading_deg(self) -> float:
        """
        Heading in degrees, 0 = east, counter-clockwise.
        """
        return math.degrees(math.atan2(self.heading[1], self.heading[0])) % 360.0


class TrafficMatrix(BaseModel):
    """
    Road segments x duty cycles grid of average speeds.

    Unobserved cells hold NaN in `values` and must only be read through `mask`.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    values: np.ndarray
    mask: np.ndarray

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.values.shape != self.mask.shape or self.values.ndim != 2:
            raise ValueError(f"values {self.values.shape} and mask {self.mask.shape} must be equal 2-d shapes")
        return self

    @classmethod
    def empty(cls, n_segments: int, n_cycles: int) -> "TrafficMatrix":
        return cls(values=np.full((n_segments, n_cycles), np.nan), mask=np.zeros((n_segments, n_cycles), dtype=bool))

    @classmethod
    def from_dense(cls, values: np.ndarray, mask: np.ndarray) -> "TrafficMatrix":
        """
        Keep `values` where `mask` is set and put the sentinel everywhere else.
        """
        mask = np.asarray(mask, dtype=bool)
        return cls(values=np.where(mask, np.asarray(values, dtype=float), np.nan), mask=mask)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    @property
    def n_segments(self) -> int:
        return self.values.shape[0]

    @property
    def n_cycles(self) -> int:
        return self.values.shape[1]

    def row_counts(self) -> np.ndarray:
        return self.mask.sum(axis=1)


class FcRoutePlan(BaseModel):
    """
    Planned segments of every floating car, one per duty cycle of the planning window.
    """

    routes: List[List[int]]
    positions: List[List[Position]]
    "Midpoint of the planned segment per cycle."

    @property
    def n_fc(self) -> int:
        return len(self.routes)

    @property
    def horizon(self) -> int:
        return len(self.routes[0]) if self.routes else 0

    def segment_at(self, fc_index: int, cycle: int) -> int:
        return self.routes[fc_index][cycle]
