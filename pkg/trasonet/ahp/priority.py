import logging
from typing import Optional, Tuple

import numpy as np

from trasonet.ahp.models import ComparisonMatrix, ConsistencyReport, PriorityVector
from trasonet.constants import CONSISTENCY_THRESHOLD, POWER_ITERATION_MAX, POWER_ITERATION_TOL, RANDOM_INDEX
from trasonet.exception import UnsupportedDimensionException

logger = logging.getLogger(__name__)


def principal_eigen(m: ComparisonMatrix, start: Optional[np.ndarray] = None) -> Tuple[np.ndarray, float]:
    """
    Power iteration for the principal right eigenvector (normalized to sum 1) and eigenvalue.

    :param m: Valid comparison matrix
    :param start: Positive start vector, uniform by default
    """
    m.check()
    a = m.entries
    n = m.n
    w = np.full(n, 1.0 / n) if start is None else np.asarray(start, dtype=float) / np.sum(start)
    for _ in range(POWER_ITERATION_MAX):
        nxt = a @ w
        nxt /= nxt.sum()
        change = np.max(np.abs(nxt - w)) / np.max(np.abs(nxt))
        w = nxt
        if change < POWER_ITERATION_TOL:
            break
    else:
        logger.warning(f"Power iteration did not reach {POWER_ITERATION_TOL} within {POWER_ITERATION_MAX} steps")
    # a @ w = lambda * w and w sums to 1
    return w, float((a @ w).sum())


def priority_vector(m: ComparisonMatrix, start: Optional[np.ndarray] = None) -> PriorityVector:
    w, _ = principal_eigen(m, start)
    return PriorityVector(weights=w / w.sum())


def consistency(m: ComparisonMatrix) -> ConsistencyReport:
    """
    Consistency ratio of a comparison matrix against Saaty's random index.

    :raises UnsupportedDimensionException: For matrices larger than 9 x 9
    """
    if m.n > max(RANDOM_INDEX):
        raise UnsupportedDimensionException(f"no random index for n={m.n}, at most {max(RANDOM_INDEX)} elements")
    _, lambda_max = principal_eigen(m)
    n = m.n
    ci = (lambda_max - n) / (n - 1) if n >= 2 else 0.0
    ri = RANDOM_INDEX[n]
    if n <= 2:
        return ConsistencyReport(lambda_max=lambda_max, ci=ci, ri=ri, cr=0.0, acceptable=True)
    cr = ci / ri
    return ConsistencyReport(lambda_max=lambda_max, ci=ci, ri=ri, cr=cr, acceptable=cr < CONSISTENCY_THRESHOLD)
