from .als import complete_matrix, truncated_svd_factors
from .experiment import compare_fc_policies, sample_rate_sweep, social_mask, synthetic_low_rank, uniform_mask
from .initialize import initialize_missing
from .io import write_completion_csv, write_sweep_csv
from .metrics import estimation_error, observed_residual, relative_frobenius_error
from .models import CompletionParams, CompletionResult, PolicyComparison, SweepPoint
