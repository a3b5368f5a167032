from enum import Enum
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from typing_extensions import Self

from trasonet.constants import RECIPROCITY_TOL
from trasonet.exception import InvalidComparisonMatrixException
from trasonet.models import NETWORKS, NetworkOption, Service


class Criterion(str, Enum):
    TrafficDensity = "TrafficDensity"
    Bandwidth = "Bandwidth"
    Delay = "Delay"
    Cost = "Cost"


CRITERIA = (Criterion.TrafficDensity, Criterion.Bandwidth, Criterion.Delay, Criterion.Cost)


class ComparisonMatrix(BaseModel):
    """
    Pairwise judgments a_ij: how much more element i matters than element j.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    entries: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def check(self):
        """
        :raises InvalidComparisonMatrixException: When the matrix is not square, positive and
            reciprocal with a unit diagonal
        """
        a = self.entries
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise InvalidComparisonMatrixException(f"comparison matrix must be square and non-empty, got {a.shape}")
        if not np.all(np.isfinite(a)) or np.any(a <= 0):
            raise InvalidComparisonMatrixException("comparison matrix entries must be finite and > 0")
        if not np.allclose(np.diag(a), 1.0, rtol=0, atol=RECIPROCITY_TOL):
            raise InvalidComparisonMatrixException("comparison matrix diagonal must be 1")
        if not np.allclose(a * a.T, 1.0, rtol=0, atol=RECIPROCITY_TOL):
            raise InvalidComparisonMatrixException("comparison matrix must be reciprocal (a_ij = 1/a_ji)")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "ComparisonMatrix":
        return cls(entries=np.array(rows, dtype=float))

    @classmethod
    def from_weights(cls, weights: Sequence[float]) -> "ComparisonMatrix":
        """
        The perfectly consistent matrix a_ij = w_i / w_j.
        """
        w = np.asarray(weights, dtype=float)
        return cls(entries=w[:, None] / w[None, :])

    @classmethod
    def from_csv_rows(cls, rows: Sequence[Sequence[str]]) -> "ComparisonMatrix":
        """
        Parse cells such as `3`, `0.2` or `1/5`.
        """
        try:
            parsed = [[float(Fraction(cell.strip())) for cell in row if cell.strip()] for row in rows if row]
        except (ValueError, ZeroDivisionError) as e:
            raise InvalidComparisonMatrixException(f"cannot parse comparison matrix: {e}") from e
        if not parsed or any(len(row) != len(parsed) for row in parsed):
            raise InvalidComparisonMatrixException("comparison matrix must be square and non-empty")
        return cls.from_rows(parsed)


class PriorityVector(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    weights: np.ndarray

    @model_validator(mode="after")
    def _check(self) -> Self:
        if np.any(self.weights < 0) or abs(float(self.weights.sum()) - 1.0) > 1e-9:
            raise ValueError(f"priority weights must be nonnegative and sum to 1, got {self.weights}")
        return self

    def __len__(self) -> int:
        return len(self.weights)


class ConsistencyReport(BaseModel):
    lambda_max: float
    ci: float
    ri: float
    cr: float
    acceptable: bool


class CellState(BaseModel):
    vehicle_density: float
    "Vehicles per street metre, scaled by the congestion factor of the cell."
    rsu_coverage: bool
    cell_load: float = 0.0
    "Expected demand at the serving eNB over its capacity; above 1 when overloaded."
    rsu_load: float = 0.0
    "Expected demand at the RSUs reached from the cell over their capacity, averaged over its vehicles."

    def served_share_ratio(self) -> float:
        """
        Share of its demand a session can expect on VANET over the share it can expect on cellular.
        """
        return max(1.0, self.cell_load) / max(1.0, self.rsu_load)


class RecommendationMap(BaseModel):
    """
    Per-cell network indices for every service. `index[service]` has shape
    (n_cells_x, n_cells_y, 2) with networks ordered Cellular, VANET.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    cell_size_m: float
    n_cells_x: int
    n_cells_y: int
    vehicle_density: np.ndarray
    mean_speed_kmh: np.ndarray
    cell_load: np.ndarray
    rsu_load: np.ndarray
    rsu_coverage: np.ndarray
    index: Dict[Service, np.ndarray]

    def cell_of(self, position: Tuple[float, float]) -> Tuple[int, int]:
        cx = min(max(int(position[0] // self.cell_size_m), 0), self.n_cells_x - 1)
        cy = min(max(int(position[1] // self.cell_size_m), 0), self.n_cells_y - 1)
        return cx, cy

    def argmax(self, service: Service) -> np.ndarray:
        """
        Index into NETWORKS of the recommended network per cell; ties go to Cellular.
        """
        return np.argmax(self.index[service], axis=2)

    def recommend(self, position: Tuple[float, float], service: Service) -> NetworkOption:
        cx, cy = self.cell_of(position)
        return NETWORKS[int(self.argmax(service)[cx, cy])]

    def rows(self) -> List[tuple]:
        """
        One row per cell, service and network:
        cell_x, cell_y, service, network, index, argmax, vehicle_density, mean_speed_kmh, cell_load, rsu_load.
        """
        result = []
        for service, index in self.index.items():
            best = self.argmax(service)
            for cx in range(self.n_cells_x):
                for cy in range(self.n_cells_y):
                    for k, network in enumerate(NETWORKS):
                        result.append(
                            (
                                cx,
                                cy,
                                service,
                                network,
                                float(index[cx, cy, k]),
                                NETWORKS[int(best[cx, cy])],
                                float(self.vehicle_density[cx, cy]),
                                float(self.mean_speed_kmh[cx, cy]),
                                float(self.cell_load[cx, cy]),
                                float(self.rsu_load[cx, cy]),
                            )
                        )
        return result
