import re
import pytest
import numpy as np

from src.speakerly.dsp_frontend import frame_lpcc, stack_raw_samples
from src.speakerly.linear_codebook import LinearCodebook, train_codebook
from src.speakerly.mlp_predictor import MlpPredictor, TrainConfig, frame_residuals
from src.speakerly.nonlinear_codebook import NonlinearCodebook, residual_matrix, cluster_by_linear, \
                                             assign_by_residual, cluster_training_samples, train_nonlinear_codebook
from src.speakerly.exceptions.custom_exceptions import PredictorTrainingException, ValidationException
from tests.testing_utils import random_frames, stable_lpc


FAST_CONFIG = TrainConfig(epochs_per_start=2, num_random_starts=1)


def _two_source_frames(seed, n_per_source=15):
    rng = np.random.default_rng(seed)
    frames = random_frames(rng, n_per_source, stable_lpc(rng)) + random_frames(rng, n_per_source, stable_lpc(rng))
    lpcc = np.array([frame_lpcc(frame).coeffs for frame in frames])
    return frames, lpcc


#################
# residual_matrix
#################

def test_residual_matrix_columns_are_predictors():
    rng = np.random.default_rng(0)
    frames = random_frames(rng, 5)
    ncb = NonlinearCodebook(predictors=[MlpPredictor.random(rng) for _ in range(4)], size_bits=2)

    residuals = residual_matrix(frames, ncb)
    assert residuals.shape == (5, 4)
    assert np.allclose(residuals[:, 2], frame_residuals(ncb.predictors[2], stack_raw_samples(frames)))


def test_assign_by_residual_takes_lowest_residual():
    rng = np.random.default_rng(1)
    frames = random_frames(rng, 6)
    ncb = NonlinearCodebook(predictors=[MlpPredictor.zeros(), MlpPredictor.random(rng)], size_bits=1)

    clusters = assign_by_residual(frames, ncb)
    best = np.argmin(residual_matrix(frames, ncb), axis=1)
    assert clusters == [np.flatnonzero(best == j).tolist() for j in range(2)]


###################
# cluster_by_linear
###################

def test_cluster_by_linear_partitions_frames():
    frames, lpcc = _two_source_frames(2)
    cb = train_codebook(lpcc, 2)
    clusters = cluster_by_linear(frames, lpcc, cb)

    assert len(clusters) == 4
    assert sorted(index for cluster in clusters for index in cluster) == list(range(len(frames)))


def test_cluster_by_linear_count_mismatch():
    frames, lpcc = _two_source_frames(3, 2)
    cb = LinearCodebook(centroids=np.zeros((2, 12)), size_bits=1)
    expected_error_msg = re.escape("('frames and lpcc must have equal length but found 4 and 3', 4004)")

    with pytest.raises(ValidationException, match=expected_error_msg):
        cluster_by_linear(frames, lpcc[:3], cb)


def test_cluster_training_samples_cap():
    frames = random_frames(np.random.default_rng(4), 3)
    raw_matrix = stack_raw_samples(frames)

    full = cluster_training_samples(raw_matrix, [0, 2], np.random.default_rng(0))
    capped = cluster_training_samples(raw_matrix, [0, 2], np.random.default_rng(0), max_samples=100)

    assert len(full.targets) == 460
    assert len(capped.targets) == 100
    assert set(capped.targets.tolist()) <= set(full.targets.tolist())


##########################
# train_nonlinear_codebook
##########################

def test_train_nonlinear_codebook_shape():
    frames, lpcc = _two_source_frames(5)
    cb = train_codebook(lpcc, 1)
    ncb = train_nonlinear_codebook(frames, lpcc, cb, 1, 0, FAST_CONFIG)

    assert ncb.size == 2
    assert ncb.size_bits == 1
    assert ncb.lloyd_iterations_done == 0
    assert len(ncb.distortion_history) == 1


def test_generalized_lloyd_distortion_is_non_increasing():
    for seed in range(20):
        frames, lpcc = _two_source_frames(100 + seed, 8)
        cb = train_codebook(lpcc, 1)
        ncb = train_nonlinear_codebook(frames, lpcc, cb, 1, 3, FAST_CONFIG)

        history = ncb.distortion_history
        assert len(history) == 4
        assert all(later <= earlier + 1e-12 for earlier, later in zip(history, history[1:]))


def test_train_nonlinear_codebook_is_deterministic():
    frames, lpcc = _two_source_frames(6, 8)
    cb = train_codebook(lpcc, 1)

    first = train_nonlinear_codebook(frames, lpcc, cb, 1, 1, FAST_CONFIG)
    second = train_nonlinear_codebook(frames, lpcc, cb, 1, 1, FAST_CONFIG)
    for a, b in zip(first.predictors, second.predictors):
        assert np.array_equal(a.parameters, b.parameters)


def test_empty_initial_cluster_gets_untrained_predictor():
    frames, lpcc = _two_source_frames(7, 5)
    cb = LinearCodebook(centroids=np.vstack([lpcc.mean(axis=0), np.full(12, 1e3)]), size_bits=1)

    ncb = train_nonlinear_codebook(frames, lpcc, cb, 1, 0, FAST_CONFIG)
    assert ncb.size == 2
    assert np.all(np.abs(ncb.predictors[1].parameters) <= 0.5)


def test_train_nonlinear_codebook_without_frames():
    cb = LinearCodebook(centroids=np.zeros((2, 12)), size_bits=1)
    expected_error_msg = re.escape("('A nonlinear codebook requires at least one training frame', 7002)")

    with pytest.raises(PredictorTrainingException, match=expected_error_msg):
        train_nonlinear_codebook([], np.zeros((0, 12)), cb, 1)


def test_train_nonlinear_codebook_size_mismatch():
    frames, lpcc = _two_source_frames(8, 3)
    cb = train_codebook(lpcc, 2)
    expected_error_msg = re.escape("('Linear codebook has 4 centroids but the nonlinear codebook needs 2', 7003)")

    with pytest.raises(PredictorTrainingException, match=expected_error_msg):
        train_nonlinear_codebook(frames, lpcc, cb, 1)
