import math
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np

from trasonet.exception import ConfigurationException
from trasonet.sensing.models import GpsReport, TrafficMatrix
from trasonet.utils.table import read_csv, read_matrix_csv, write_csv, write_matrix_csv

REPORT_HEADER = ("vehicle_id", "cycle", "x", "y", "speed", "heading")


def write_reports_csv(path: Union[str, Path], reports: Sequence[GpsReport]) -> Path:
    return write_csv(
        path,
        REPORT_HEADER,
        (
            (r.vehicle_id, r.cycle_index, float(r.position[0]), float(r.position[1]), float(r.speed_kmh), r.heading_deg)
            for r in reports
        ),
    )


def read_reports_csv(path: Union[str, Path]) -> List[GpsReport]:
    """
    Read reports written by `write_reports_csv`. An empty file (or a bare header) yields no reports.

    :raises ConfigurationException: When a row cannot be parsed
    """
    try:
        rows = read_csv(path)
    except OSError as e:
        raise ConfigurationException(f"cannot read reports {path}: {e}") from e

    reports = []
    for line, row in enumerate(rows, start=2):
        try:
            angle = math.radians(float(row["heading"]))
            reports.append(
                GpsReport(
                    vehicle_id=int(row["vehicle_id"]),
                    cycle_index=int(row["cycle"]),
                    position=(float(row["x"]), float(row["y"])),
                    speed_kmh=float(row["speed"]),
                    heading=(round(math.cos(angle), 12), round(math.sin(angle), 12)),
                )
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigurationException(f"{path}:{line}: invalid report row {row}: {e}") from e
    return reports


def write_traffic_matrix_csv(directory: Union[str, Path], matrix: TrafficMatrix, name: str = "traffic") -> Tuple[Path, Path]:
    """
    Write `<name>_values.csv` (unobserved cells as nan) and `<name>_mask.csv` (1 = observed).
    """
    directory = Path(directory)
    values = write_matrix_csv(directory / f"{name}_values.csv", matrix.values)
    mask = write_matrix_csv(directory / f"{name}_mask.csv", matrix.mask)
    return values, mask


def read_traffic_matrix_csv(values_path: Union[str, Path], mask_path: Union[str, Path]) -> TrafficMatrix:
    try:
        values = read_matrix_csv(values_path)
        mask = read_matrix_csv(mask_path).astype(bool)
    except (OSError, ValueError) as e:
        raise ConfigurationException(f"cannot read traffic matrix: {e}") from e
    if values.shape != mask.shape:
        raise ConfigurationException(f"values {values.shape} and mask {mask.shape} differ in shape")
    return TrafficMatrix.from_dense(np.nan_to_num(values), mask)
