from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from trasonet.config import CompletionParams


class CompletionResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    estimate: np.ndarray
    "Full segments x cycles speeds, clamped to the speed bounds."
    iterations_used: int
    converged: bool
    fit_residual: float
    "Relative Frobenius error on the observed entries."
    row_factors: Optional[np.ndarray] = None
    col_factors: Optional[np.ndarray] = None

    def unclamped(self) -> Optional[np.ndarray]:
        if self.row_factors is None or self.col_factors is None:
            return None
        return self.row_factors @ self.col_factors.T


class SweepPoint(BaseModel):
    rate: float
    seed: int
    entropy: float
    error: float
    relative_frobenius: float


class PolicyComparison(BaseModel):
    """
    Same probe-vehicle sampling topped up by planned or by randomly walking floating cars.
    """

    seed: int
    entropy_planned: float
    entropy_random: float
    error_planned: float
    error_random: float


__all__ = ["CompletionParams", "CompletionResult", "PolicyComparison", "SweepPoint"]
