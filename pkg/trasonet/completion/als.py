import logging
from typing import Tuple

import numpy as np

from trasonet.completion.initialize import initialize_missing
from trasonet.completion.metrics import observed_residual
from trasonet.completion.models import CompletionResult
from trasonet.config import CompletionParams
from trasonet.constants import SPARSE_FILL_WEIGHT, SPARSE_OBSERVATIONS_PER_RANK
from trasonet.exception import ConfigurationException
from trasonet.sensing.models import TrafficMatrix

logger = logging.getLogger(__name__)


def truncated_svd_factors(x: np.ndarray, rank: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Split the best rank-`rank` approximation of `x` into U (rows x rank) and V (cols x rank)
    with the singular values shared evenly.
    """
    u, s, vt = np.linalg.svd(x, full_matrices=False)
    root = np.sqrt(s[:rank])
    return u[:, :rank] * root, vt[:rank].T * root


def _solve_side(
    observed: np.ndarray, weights: np.ndarray, other: np.ndarray, current: np.ndarray, ridge: float
) -> np.ndarray:
    """
    Ridge least squares for every row of `current` against the observed entries of its row.
    Rows without observations keep their current factors.
    """
    rank = other.shape[1]
    gram = np.einsum("ij,jk,jl->ikl", weights, other, other) + ridge * np.eye(rank)
    rhs = observed @ other
    has_data = weights.sum(axis=1) > 0
    result = current.copy()
    if has_data.any():
        result[has_data] = np.linalg.solve(gram[has_data], rhs[has_data][..., None])[..., 0]
    return result


def _anchor_sparse_lines(
    observed: np.ndarray, weights: np.ndarray, mask: np.ndarray, init: np.ndarray, rank: int
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Rows and columns with fewer than SPARSE_OBSERVATIONS_PER_RANK * `rank` observations are also fit
    to the initialization fill of their unobserved cells at weight SPARSE_FILL_WEIGHT. Empty rows and
    columns stay out of the fit.
    """
    enough = SPARSE_OBSERVATIONS_PER_RANK * rank
    row_counts = mask.sum(axis=1)
    col_counts = mask.sum(axis=0)
    sparse_rows = (row_counts > 0) & (row_counts < enough)
    sparse_cols = (col_counts > 0) & (col_counts < enough)
    live = (row_counts > 0)[:, None] & (col_counts > 0)[None, :]
    anchored = (sparse_rows[:, None] | sparse_cols[None, :]) & live & ~mask
    if not anchored.any():
        return observed, weights
    logger.debug(
        f"Anchoring {int(sparse_rows.sum())} sparse rows and {int(sparse_cols.sum())} sparse columns "
        f"to the initialization"
    )
    # observed holds weight * value, as the normal equations use it
    return np.where(anchored, SPARSE_FILL_WEIGHT * init, observed), np.where(anchored, SPARSE_FILL_WEIGHT, weights)


def complete_matrix(matrix: TrafficMatrix, params: CompletionParams) -> CompletionResult:
    """
    Estimate every cell of the traffic matrix with a low-rank model.

    The missing cells are first filled by `initialize_missing`; the truncated SVD of that fill seeds
    an alternating least squares fit of U @ V.T to the observed cells. Rows and columns observed
    less than twice the rank are also held to their initialization fill at a low weight. Iteration
    stops when the relative Frobenius change of U @ V.T drops below `convergence_tol` or after `max_iterations`.
    The estimate is clamped to `speed_bounds` only at the end.

    :param matrix: Observed traffic matrix
    :param params: Rank, stopping rule, bounds and ridge
    :return: The completion, `converged=False` when `max_iterations` ran out
    """
    n_rows, n_cols = matrix.shape
    rank = params.target_rank
    if rank > min(n_rows, n_cols):
        raise ConfigurationException(f"target_rank {rank} exceeds min({n_rows}, {n_cols})")
    lo, hi = params.speed_bounds

    init = initialize_missing(matrix, hi)
    u, v = truncated_svd_factors(init, rank)
    if not matrix.mask.any():
        return CompletionResult(
            estimate=np.clip(init, lo, hi),
            iterations_used=0,
            converged=True,
            fit_residual=0.0,
            row_factors=u,
            col_factors=v,
        )

    weights = matrix.mask.astype(float)
    observed = np.where(matrix.mask, matrix.values, 0.0)
    observed, weights = _anchor_sparse_lines(observed, weights, matrix.mask, init, rank)

    previous = u @ v.T
    converged = False
    iterations = 0
    for iterations in range(1, params.max_iterations + 1):
        u = _solve_side(observed, weights, v, u, params.ridge)
        v = _solve_side(observed.T, weights.T, u, v, params.ridge)
        current = u @ v.T
        change = np.linalg.norm(current - previous) / max(np.linalg.norm(previous), 1e-12)
        previous = current
        if change < params.convergence_tol:
            converged = True
            break

    if not converged:
        logger.warning(
            f"Matrix completion did not converge within {params.max_iterations} iterations, "
            f"last relative change {change:.2e}"
        )

    estimate = np.clip(previous, lo, hi)
    residual = observed_residual(estimate, matrix)
    logger.debug(f"Completed {n_rows}x{n_cols} matrix at rank {rank} in {iterations} iterations, residual {residual:.2e}")
    return CompletionResult(
        estimate=estimate,
        iterations_used=iterations,
        converged=converged,
        fit_residual=residual,
        row_factors=u,
        col_factors=v,
    )
