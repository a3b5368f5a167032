import numpy as np

from trasonet.constants import RELATIVE_ERROR_GUARD_KMH
from trasonet.sensing.models import TrafficMatrix


def estimation_error(estimate: np.ndarray, ground_truth: np.ndarray, mask: np.ndarray) -> float:
    """
    Mean absolute relative error over the unobserved cells, with speeds below 1 km/h
    treated as 1 km/h in the denominator.

    :return: 0 when every cell was observed
    """
    if estimate.shape != ground_truth.shape or estimate.shape != mask.shape:
        raise ValueError(f"shape mismatch: {estimate.shape}, {ground_truth.shape}, {mask.shape}")
    hidden = ~np.asarray(mask, dtype=bool)
    if not hidden.any():
        return 0.0
    truth = ground_truth[hidden]
    return float(np.mean(np.abs(estimate[hidden] - truth) / np.maximum(truth, RELATIVE_ERROR_GUARD_KMH)))


def relative_frobenius_error(estimate: np.ndarray, ground_truth: np.ndarray, mask: np.ndarray) -> float:
    """
    ||estimate - truth|| / ||truth|| restricted to the unobserved cells.
    """
    hidden = ~np.asarray(mask, dtype=bool)
    if not hidden.any():
        return 0.0
    norm = np.linalg.norm(ground_truth[hidden])
    if norm == 0:
        return float(np.linalg.norm(estimate[hidden]))
    return float(np.linalg.norm(estimate[hidden] - ground_truth[hidden]) / norm)


def observed_residual(estimate: np.ndarray, matrix: TrafficMatrix) -> float:
    mask = matrix.mask
    if not mask.any():
        return 0.0
    observed = matrix.values[mask]
    norm = np.linalg.norm(observed)
    diff = np.linalg.norm(estimate[mask] - observed)
    return float(diff / norm) if norm > 0 else float(diff)
