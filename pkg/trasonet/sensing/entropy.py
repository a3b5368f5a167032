import numpy as np

from trasonet.sensing.models import TrafficMatrix


def count_entropy(counts: np.ndarray) -> float:
    """
    Shannon entropy in nats of the distribution of per-road sample counts.
    """
    counts = np.asarray(counts).ravel()
    if counts.size == 0:
        return 0.0
    _, freq = np.unique(counts, return_counts=True)
    p = freq / freq.sum()
    return float(-(p * np.log(p)).sum())


def average_entropy(matrix: TrafficMatrix) -> float:
    """
    Disorder of the sampling: 0 when every road was observed equally often, larger as the
    per-road observation counts spread out.
    """
    return count_entropy(matrix.row_counts())


def mask_entropy(mask: np.ndarray) -> float:
    return count_entropy(np.asarray(mask, dtype=bool).sum(axis=1))
