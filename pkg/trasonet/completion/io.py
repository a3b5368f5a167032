from pathlib import Path
from typing import Sequence, Union

from trasonet.completion.models import CompletionResult, SweepPoint
from trasonet.utils.table import write_csv, write_matrix_csv


def write_completion_csv(directory: Union[str, Path], result: CompletionResult, name: str = "estimate") -> Path:
    """
    Write the estimate as `<name>.csv` and its run summary as `<name>_summary.csv`.
    """
    directory = Path(directory)
    write_csv(
        directory / f"{name}_summary.csv",
        ("iterations_used", "converged", "fit_residual"),
        [(result.iterations_used, result.converged, float(result.fit_residual))],
    )
    return write_matrix_csv(directory / f"{name}.csv", result.estimate)


def write_sweep_csv(path: Union[str, Path], points: Sequence[SweepPoint]) -> Path:
    return write_csv(
        path,
        ("rate", "seed", "entropy", "error", "relative_frobenius"),
        ((float(p.rate), p.seed, p.entropy, p.error, p.relative_frobenius) for p in points),
    )
