import numpy as np
import pytest
from scipy.stats import spearmanr

from trasonet.completion import (
    CompletionParams,
    compare_fc_policies,
    complete_matrix,
    estimation_error,
    initialize_missing,
    observed_residual,
    relative_frobenius_error,
    sample_rate_sweep,
    social_mask,
    synthetic_low_rank,
    truncated_svd_factors,
    uniform_mask,
    write_completion_csv,
    write_sweep_csv,
)
from trasonet.completion.als import _anchor_sparse_lines
from trasonet.exception import ConfigurationException, EmptyTrafficMatrixWarning
from trasonet.sensing import TrafficMatrix
from trasonet.utils.rng import spawn_generators

RATES = (0.1, 0.2, 0.3, 0.4, 0.5)


def _observed(truth: np.ndarray, rate: float, seed: int) -> TrafficMatrix:
    mask = uniform_mask(truth.shape, rate, np.random.default_rng(seed + 1000))
    return TrafficMatrix.from_dense(truth, mask)


def test_synthetic_truth_is_low_rank_and_bounded():
    truth = synthetic_low_rank(100, 96, 4, 80.0, np.random.default_rng(0))

    assert truth.shape == (100, 96)
    assert truth.min() > 0.0
    assert truth.max() == pytest.approx(72.0)
    assert np.linalg.matrix_rank(truth) == 4


def test_initialize_interpolates_in_time():
    values = np.array([[10.0, 0.0, 30.0, 0.0], [0.0, 0.0, 0.0, 0.0], [0.0, 40.0, 0.0, 0.0]])
    mask = np.array([[True, False, True, False], [False, False, False, False], [False, True, False, False]])

    filled = initialize_missing(TrafficMatrix.from_dense(values, mask), 80.0)

    assert filled[0].tolist() == [10.0, 20.0, 30.0, 30.0]
    assert filled[2].tolist() == [40.0, 40.0, 40.0, 40.0]
    # unobserved road: column means, overall mean where the column is empty
    assert filled[1].tolist() == [10.0, 40.0, 30.0, pytest.approx(80.0 / 3)]


def test_initialize_warns_on_an_empty_matrix():
    matrix = TrafficMatrix.empty(3, 4)

    with pytest.warns(EmptyTrafficMatrixWarning):
        filled = initialize_missing(matrix, 80.0)

    assert (filled == 40.0).all()


def test_truncated_svd_factors_rebuild_a_low_rank_matrix():
    truth = synthetic_low_rank(30, 20, 3, 80.0, np.random.default_rng(1))
    u, v = truncated_svd_factors(truth, 3)

    assert u.shape == (30, 3) and v.shape == (20, 3)
    assert np.allclose(u @ v.T, truth)


def test_full_observation_is_reproduced():
    truth = synthetic_low_rank(40, 30, 2, 80.0, np.random.default_rng(2))
    matrix = TrafficMatrix.from_dense(truth, np.ones(truth.shape, dtype=bool))

    result = complete_matrix(matrix, CompletionParams(target_rank=2))

    assert result.converged
    assert result.fit_residual < 1e-6
    assert np.allclose(result.estimate, truth, atol=1e-4)


@pytest.mark.parametrize("rank, bound", [(2, 0.05), (4, 0.10)])
def test_completion_recovers_hidden_cells(rank, bound):
    errors = []
    for seed in range(10):
        truth = synthetic_low_rank(100, 96, rank, 80.0, spawn_generators(seed)["synthetic"])
        matrix = _observed(truth, 0.3, seed)
        result = complete_matrix(matrix, CompletionParams(target_rank=rank))
        errors.append(relative_frobenius_error(result.estimate, truth, matrix.mask))

    assert np.mean(errors) < bound


def test_estimate_stays_within_speed_bounds():
    truth = synthetic_low_rank(50, 40, 4, 80.0, np.random.default_rng(3))
    noisy = truth + np.random.default_rng(4).normal(0.0, 15.0, truth.shape)
    matrix = _observed(np.clip(noisy, 0.0, 80.0), 0.15, 3)

    result = complete_matrix(matrix, CompletionParams(target_rank=4, max_iterations=50))

    assert result.estimate.min() >= 0.0
    assert result.estimate.max() <= 80.0
    assert result.iterations_used <= 50
    assert result.unclamped().shape == truth.shape


def test_empty_matrix_completes_to_the_initialization():
    with pytest.warns(EmptyTrafficMatrixWarning):
        result = complete_matrix(TrafficMatrix.empty(10, 6), CompletionParams(target_rank=2))

    assert result.converged
    assert result.iterations_used == 0
    assert (result.estimate == 40.0).all()


def test_rank_above_the_matrix_size_is_rejected():
    with pytest.raises(ConfigurationException):
        complete_matrix(TrafficMatrix.empty(3, 2), CompletionParams(target_rank=3))


def test_non_convergence_is_reported():
    truth = synthetic_low_rank(60, 50, 4, 80.0, np.random.default_rng(5))
    matrix = _observed(truth, 0.2, 5)

    result = complete_matrix(matrix, CompletionParams(target_rank=4, max_iterations=1, convergence_tol=1e-12))

    assert not result.converged
    assert result.iterations_used == 1


def test_estimation_error():
    truth = np.array([[10.0, 20.0], [0.5, 40.0]])
    estimate = np.array([[10.0, 25.0], [1.5, 40.0]])
    mask = np.array([[True, False], [False, True]])

    # |25 - 20| / 20 and |1.5 - 0.5| / max(0.5, 1)
    assert estimation_error(estimate, truth, mask) == pytest.approx((0.25 + 1.0) / 2)
    assert estimation_error(estimate, truth, np.ones((2, 2), dtype=bool)) == 0.0
    with pytest.raises(ValueError):
        estimation_error(estimate, truth, np.ones((3, 2), dtype=bool))


def test_relative_frobenius_error_and_residual():
    truth = np.array([[3.0, 4.0], [1.0, 1.0]])
    estimate = np.array([[3.0, 0.0], [1.0, 1.0]])
    mask = np.array([[True, False], [True, True]])

    assert relative_frobenius_error(estimate, truth, mask) == pytest.approx(1.0)
    assert observed_residual(estimate, TrafficMatrix.from_dense(truth, mask)) == 0.0


def test_social_mask_leaves_roads_unsampled():
    mask = social_mask(200, 96, np.random.default_rng(6))

    assert mask.shape == (200, 96)
    assert (mask.sum(axis=1) == 0).mean() > 0.2
    assert 0.05 < mask.mean() < 0.3


def test_estimate_has_the_target_rank_before_clamping():
    truth = synthetic_low_rank(100, 96, 4, 80.0, np.random.default_rng(8))
    noisy = truth + np.random.default_rng(9).normal(0.0, 5.0, truth.shape)

    result = complete_matrix(_observed(noisy, 0.3, 8), CompletionParams(target_rank=4))

    singular = np.linalg.svd(result.unclamped(), compute_uv=False)
    assert singular[4:].max() < 1e-8 * singular[0]


def test_observed_cells_fit_at_least_as_well_as_the_truncated_svd():
    for seed in range(5):
        truth = synthetic_low_rank(100, 96, 4, 80.0, np.random.default_rng(seed))
        noisy = np.clip(truth + np.random.default_rng(seed + 50).normal(0.0, 3.0, truth.shape), 0.0, 80.0)
        matrix = _observed(noisy, 0.3, seed)
        u, v = truncated_svd_factors(noisy, 4)

        result = complete_matrix(matrix, CompletionParams(target_rank=4))

        assert observed_residual(result.unclamped(), matrix) <= observed_residual(u @ v.T, matrix) + 1e-3


def test_sparse_lines_are_held_to_the_initialization():
    mask = np.array([[True, False, False, False], [True, True, True, True], [False, False, False, False]])
    init = np.full(mask.shape, 50.0)
    weights = mask.astype(float)
    observed = np.where(mask, 40.0, 0.0)

    observed, weights = _anchor_sparse_lines(observed, weights, mask, init, rank=1)

    # the first row and the three last columns are observed once, below twice the rank
    assert weights.tolist() == [[1.0, 0.1, 0.1, 0.1], [1.0, 1.0, 1.0, 1.0], [0.0, 0.0, 0.0, 0.0]]
    assert observed[0].tolist() == [40.0, 5.0, 5.0, 5.0]
    assert not observed[2].any()


def test_sparsely_sampled_roads_stay_bounded():
    rng = np.random.default_rng(6)
    truth = synthetic_low_rank(200, 96, 4, 80.0, rng)
    matrix = TrafficMatrix.from_dense(truth, social_mask(200, 96, rng))

    result = complete_matrix(matrix, CompletionParams(target_rank=4))

    unclamped = result.unclamped()
    assert -80.0 <= unclamped.min() and unclamped.max() <= 160.0
    assert result.fit_residual < 0.1


def test_error_falls_with_the_sample_rate():
    points = sample_rate_sweep(RATES, seeds=range(10))

    assert len(points) == len(RATES) * 10
    mean_error = [np.mean([p.error for p in points if p.rate == rate]) for rate in RATES]
    rho, _ = spearmanr(RATES, mean_error)
    assert rho < -0.8
    assert mean_error[2] < 0.15


def test_planned_floating_cars_beat_random_walks():
    comparisons = [compare_fc_policies(seed) for seed in range(20)]

    entropy_gap = np.mean([c.entropy_planned - c.entropy_random for c in comparisons])
    error_gap = np.mean([c.error_planned - c.error_random for c in comparisons])
    assert entropy_gap <= 0.0
    assert error_gap <= 0.0


def test_fc_comparison_is_deterministic():
    assert compare_fc_policies(3, horizon=24) == compare_fc_policies(3, horizon=24)


def test_completion_csv(tmp_path):
    truth = synthetic_low_rank(5, 4, 1, 80.0, np.random.default_rng(7))
    result = complete_matrix(TrafficMatrix.from_dense(truth, np.ones(truth.shape, dtype=bool)), CompletionParams(target_rank=1))

    path = write_completion_csv(tmp_path, result)

    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "c0,c1,c2,c3"
    assert len(lines) == 6
    summary = (tmp_path / "estimate_summary.csv").read_text(encoding="utf-8").splitlines()
    assert summary[0] == "iterations_used,converged,fit_residual"


def test_sweep_csv(tmp_path):
    points = sample_rate_sweep((0.3, 0.5), seeds=[1], n_rows=30, n_cols=20, rank=2)

    path = write_sweep_csv(tmp_path / "sweep.csv", points)

    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "rate,seed,entropy,error,relative_frobenius"
    assert len(lines) == 3
