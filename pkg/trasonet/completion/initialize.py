import logging
import warnings

import numpy as np

from trasonet.exception import EmptyTrafficMatrixWarning
from trasonet.sensing.models import TrafficMatrix

logger = logging.getLogger(__name__)


def initialize_missing(matrix: TrafficMatrix, speed_limit: float) -> np.ndarray:
    """
    Fill the unobserved cells from temporal continuity.

    Each road is interpolated linearly in time between its observations, with its first and last
    observations carried to the edges. Roads never observed take the mean of the observed values
    in the same cycle, or the overall mean when that cycle has no observation. Filled values are
    clamped to [0, speed_limit]; observed values are kept as they are.

    :param matrix: Observed traffic matrix
    :param speed_limit: Upper speed bound in km/h
    :return: Full matrix
    """
    n_rows, n_cols = matrix.shape
    mask = matrix.mask
    if n_rows == 0 or n_cols == 0:
        return np.zeros((n_rows, n_cols))
    if not mask.any():
        warnings.warn(
            f"traffic matrix {n_rows}x{n_cols} has no observation, using {speed_limit / 2} km/h everywhere",
            EmptyTrafficMatrixWarning,
        )
        return np.full((n_rows, n_cols), speed_limit / 2.0)

    observed = np.where(mask, matrix.values, 0.0)
    result = observed.copy()
    col_counts = mask.sum(axis=0)
    global_mean = observed.sum() / mask.sum()
    col_mean = np.where(col_counts > 0, observed.sum(axis=0) / np.maximum(col_counts, 1), global_mean)

    time = np.arange(n_cols)
    for i in range(n_rows):
        row_mask = mask[i]
        missing = ~row_mask
        if not missing.any():
            continue
        if row_mask.any():
            idx = np.flatnonzero(row_mask)
            filled = np.interp(time, idx, matrix.values[i, idx])
        else:
            filled = col_mean
        result[i, missing] = np.clip(filled[missing], 0.0, speed_limit)

    logger.debug(f"Initialized {int((~mask).sum())} missing cells of a {n_rows}x{n_cols} traffic matrix")
    return result
