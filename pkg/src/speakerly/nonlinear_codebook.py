import logging
from dataclasses import dataclass, field, replace

import numpy as np

from . import constants
from .dsp_frontend import ResidualMeasure, stack_raw_samples
from .linear_codebook import LinearCodebook, nearest_centroids
from .mlp_predictor import MlpPredictor, TrainConfig, TrainingSamples, \
                           frame_histories, frame_residuals, train_multistart
from .exceptions.custom_exceptions import PredictorTrainingException, ValidationException
from .exceptions.error_messages import TrainingErrorMessage, TrainingErrorCode, ValidationErrorCode

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class NonlinearCodebook:
    predictors: list
    size_bits: int
    lloyd_iterations_done: int = 0
    distortion_history: list = field(default_factory=list)

    @property
    def size(self):
        return len(self.predictors)


def _raw_matrix(frames):
    if isinstance(frames, np.ndarray):
        return np.atleast_2d(frames)
    return stack_raw_samples(frames)


def residual_matrix(frames, ncb: NonlinearCodebook, measure=ResidualMeasure.MAE) -> np.ndarray:
    """(n_frames, n_predictors) residual magnitudes of every predictor on every frame."""

    raw_matrix = _raw_matrix(frames)
    if len(raw_matrix) == 0:
        return np.zeros((0, ncb.size))
    return np.column_stack([frame_residuals(predictor, raw_matrix, measure) for predictor in ncb.predictors])


def _partition(indices, size):
    return [np.flatnonzero(indices == j).tolist() for j in range(size)]


def cluster_by_linear(frames, lpcc, cb: LinearCodebook) -> list:
    """
    Cluster frames by the nearest centroid of their LPCC vector in `cb`.

    Returns:
        list: One list of frame indices per centroid; together they partition range(len(frames)).
    """

    lpcc = np.atleast_2d(np.asarray(lpcc, dtype=np.float64))
    if len(frames) != len(lpcc):
        raise ValidationException(TrainingErrorMessage.FRAME_COUNT_MISMATCH.format(len(frames), len(lpcc)),
                                  ValidationErrorCode.SHAPE_EXCEPTION_CODE)
    if len(frames) == 0:
        return [[] for _ in range(cb.size)]

    indices, _ = nearest_centroids(lpcc, cb.centroids, cb.distance)
    return _partition(indices, cb.size)


def assign_by_residual(frames, ncb: NonlinearCodebook, measure=ResidualMeasure.MAE) -> list:
    """Cluster frames by the predictor with the lowest residual; ties go to the lowest index."""

    residuals = residual_matrix(frames, ncb, measure)
    if len(residuals) == 0:
        return [[] for _ in range(ncb.size)]
    return _partition(np.argmin(residuals, axis=1), ncb.size)


def _cluster_seed(seed, iteration, cluster):
    return int(np.random.SeedSequence([seed, iteration, cluster]).generate_state(1)[0])


def cluster_training_samples(raw_matrix, members, rng: np.random.Generator,
                             max_samples=constants.MAX_SAMPLES_PER_CLUSTER) -> TrainingSamples:
    """(history, target) pairs of the member frames, uniformly subsampled down to `max_samples`."""

    samples = frame_histories(raw_matrix[members])
    if len(samples.targets) <= max_samples:
        return samples

    keep = np.sort(rng.choice(len(samples.targets), size=max_samples, replace=False))
    return TrainingSamples(samples.histories[keep], samples.targets[keep])


def _train_cluster(raw_matrix, members, iteration, cluster, config, warm_start):
    cluster_config = replace(config, seed=_cluster_seed(config.seed, iteration, cluster))
    rng = np.random.default_rng([config.seed, iteration, cluster, 1])
    samples = cluster_training_samples(raw_matrix, members, rng)
    return train_multistart(samples, cluster_config, warm_start)


def _summed_residual(predictor, raw_matrix, members):
    return float(np.sum(frame_residuals(predictor, raw_matrix[members], ResidualMeasure.MAE)))


def _clustered_distortion(predictors, raw_matrix, clusters):
    total = sum(_summed_residual(predictors[j], raw_matrix, members)
                for j, members in enumerate(clusters) if members)
    return total / len(raw_matrix)


def train_nonlinear_codebook(frames, lpcc, linear_cb: LinearCodebook, size_bits: int,
                             lloyd_iters: int = constants.DEFAULT_LLOYD_ITERS,
                             config: TrainConfig = TrainConfig()) -> NonlinearCodebook:
    """
    Train a codebook of 2^size_bits MLP predictors.

    Iteration 0 clusters the frames with `linear_cb` and trains one multi-start predictor per
    cluster. Each of the `lloyd_iters` further iterations reassigns frames to their lowest-residual
    predictor and retrains every non-empty cluster warm-started from its previous predictor.
    A retrained predictor replaces the previous one only if its summed MAE over the new cluster is
    not larger, so `distortion_history` (mean frame MAE under the training clusters) never increases.

    Args:
        frames (list): Training frames (their raw samples are used).
        lpcc (numpy.ndarray): (len(frames), 12) LPCC rows matching `frames`.
        linear_cb (LinearCodebook): Codebook of 2^size_bits centroids used for the initial clustering.
        size_bits (int): Nonlinear codebook size exponent.
        lloyd_iters (int): Number of generalized Lloyd iterations after iteration 0.
        config (TrainConfig): MLP training setup; its seed drives every per-cluster seed.

    Raises:
        PredictorTrainingException (NO_FRAMES_CODE: 7002): If `frames` is empty.
        PredictorTrainingException (CODEBOOK_SIZE_MISMATCH_CODE: 7003): If `linear_cb` does not have 2^size_bits centroids.
    """

    if len(frames) == 0:
        raise PredictorTrainingException(TrainingErrorMessage.NO_FRAMES,
                                         TrainingErrorCode.NO_FRAMES_CODE)

    if linear_cb.size != 2 ** size_bits:
        raise PredictorTrainingException(TrainingErrorMessage.CODEBOOK_SIZE_MISMATCH.format(linear_cb.size, 2 ** size_bits),
                                         TrainingErrorCode.CODEBOOK_SIZE_MISMATCH_CODE)

    raw_matrix = _raw_matrix(frames)
    clusters = cluster_by_linear(frames, lpcc, linear_cb)

    predictors = []
    for j, members in enumerate(clusters):
        if members:
            predictors.append(_train_cluster(raw_matrix, members, 0, j, config, None))
        else:
            logger.warning("Cluster %d is empty at iteration 0; using an untrained predictor", j)
            predictors.append(MlpPredictor.random(np.random.default_rng(_cluster_seed(config.seed, 0, j))))

    distortion_history = [_clustered_distortion(predictors, raw_matrix, clusters)]
    logger.info("Nonlinear codebook iteration 0: distortion %.6f", distortion_history[-1])

    for iteration in range(1, lloyd_iters + 1):
        codebook = NonlinearCodebook(predictors, size_bits)
        clusters = assign_by_residual(raw_matrix, codebook)

        updated = list(predictors)
        for j, members in enumerate(clusters):
            if not members:
                continue
            candidate = _train_cluster(raw_matrix, members, iteration, j, config, predictors[j])
            if _summed_residual(candidate, raw_matrix, members) <= _summed_residual(predictors[j], raw_matrix, members):
                updated[j] = candidate

        predictors = updated
        distortion_history.append(_clustered_distortion(predictors, raw_matrix, clusters))
        logger.info("Nonlinear codebook iteration %d: distortion %.6f", iteration, distortion_history[-1])

    return NonlinearCodebook(predictors=predictors,
                             size_bits=size_bits,
                             lloyd_iterations_done=lloyd_iters,
                             distortion_history=distortion_history)
