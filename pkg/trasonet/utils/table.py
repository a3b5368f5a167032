import csv

from pathlib import Path
from typing import Any, Iterable, List, Sequence, Union

import numpy as np

from trasonet.constants import CSV_FLOAT_FORMAT


def format_cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return CSV_FLOAT_FORMAT % value
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def write_csv(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """
    Write a UTF-8, LF-terminated CSV with a header row; floats are written as `%.6f`
    so reruns diff byte for byte.
    """
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])
    return path


def write_matrix_csv(path: Union[str, Path], matrix: np.ndarray, prefix: str = "c") -> Path:
    header = [f"{prefix}{j}" for j in range(matrix.shape[1])]
    return write_csv(path, header, matrix.tolist())


def read_csv(path: Union[str, Path]) -> List[dict]:
    with Path(path).open("r", encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def read_matrix_csv(path: Union[str, Path]) -> np.ndarray:
    with Path(path).open("r", encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    if len(rows) < 2:
        return np.zeros((0, len(rows[0]) if rows else 0))
    return np.array([[float(v) for v in row] for row in rows[1:]], dtype=float)
