import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from . import constants
from .dsp_frontend import Frame, ResidualMeasure, residual_magnitude, stack_raw_samples
from .exceptions.custom_exceptions import PredictorTrainingException
from .exceptions.error_messages import TrainingErrorMessage, TrainingErrorCode
from .utils.data_validation_utils import DataValidationUtils

logger = logging.getLogger(__name__)

N_I = constants.MLP_INPUT_SIZE
N_H1 = constants.MLP_HIDDEN_1_SIZE
N_H2 = constants.MLP_HIDDEN_2_SIZE

# offsets of W1, b1, W2, b2, W3, b3 in the flat parameter vector
_W1 = slice(0, N_H1 * N_I)
_B1 = slice(_W1.stop, _W1.stop + N_H1)
_W2 = slice(_B1.stop, _B1.stop + N_H2 * N_H1)
_B2 = slice(_W2.stop, _W2.stop + N_H2)
_W3 = slice(_B2.stop, _B2.stop + N_H2)
_B3 = slice(_W3.stop, _W3.stop + 1)


@dataclass(frozen=True, eq=False)
class MlpPredictor:
    """
    10-4-2-1 sample predictor: two tanh hidden layers and a linear output.

    Parameters are one flat vector laid out as W1 (4x10, row-major), b1 (4),
    W2 (2x4), b2 (2), W3 (1x2), b3 (1).
    """
    parameters: np.ndarray

    def __post_init__(self):
        parameters = DataValidationUtils.check_array(self.parameters, (constants.MLP_PARAMETER_COUNT,), "MLP parameters")
        parameters = parameters.copy()
        parameters.setflags(write=False)
        object.__setattr__(self, "parameters", parameters)

    @classmethod
    def zeros(cls):
        return cls(np.zeros(constants.MLP_PARAMETER_COUNT))

    @classmethod
    def random(cls, rng: np.random.Generator):
        return cls(rng.uniform(-constants.MLP_INIT_RANGE, constants.MLP_INIT_RANGE, constants.MLP_PARAMETER_COUNT))

    def layers(self):
        return unpack_parameters(self.parameters)

    def __call__(self, histories):
        return forward(self.parameters, histories)


@dataclass(frozen=True)
class TrainConfig:
    epochs_per_start: int = constants.DEFAULT_EPOCHS_PER_START
    num_random_starts: int = constants.DEFAULT_NUM_RANDOM_STARTS
    lm_lambda_init: float = constants.DEFAULT_LM_LAMBDA_INIT
    lm_lambda_factor: float = constants.DEFAULT_LM_LAMBDA_FACTOR
    seed: int = constants.DEFAULT_SEED

    def __post_init__(self):
        DataValidationUtils.validate_train_config(self.epochs_per_start,
                                                  self.num_random_starts,
                                                  self.lm_lambda_init,
                                                  self.lm_lambda_factor,
                                                  self.seed)


class TrainingSamples(NamedTuple):
    histories: np.ndarray
    targets: np.ndarray


class LmTrainResult(NamedTuple):
    predictor: MlpPredictor
    final_mse: float
    mse_history: list
    converged: bool


def unpack_parameters(parameters):
    parameters = np.asarray(parameters, dtype=np.float64)
    return (parameters[_W1].reshape(N_H1, N_I),
            parameters[_B1],
            parameters[_W2].reshape(N_H2, N_H1),
            parameters[_B2],
            parameters[_W3].reshape(1, N_H2),
            parameters[_B3])


def _forward_pass(parameters, histories):
    w1, b1, w2, b2, w3, b3 = unpack_parameters(parameters)
    h1 = np.tanh(histories @ w1.T + b1)
    h2 = np.tanh(h1 @ w2.T + b2)
    output = (h2 @ w3.T + b3)[:, 0]
    return h1, h2, output


def forward(parameters, histories) -> np.ndarray:
    histories = np.atleast_2d(np.asarray(histories, dtype=np.float64))
    return _forward_pass(parameters, histories)[2]


def predict(mlp: MlpPredictor, history) -> float:
    history = DataValidationUtils.check_array(history, (N_I,), "history")
    return float(forward(mlp.parameters, history[np.newaxis, :])[0])


def jacobian(mlp, inputs) -> np.ndarray:
    """
    Derivatives of the network output with respect to every parameter.

    Args:
        mlp (MlpPredictor, numpy.ndarray): Predictor or flat parameter vector.
        inputs (numpy.ndarray): (n, 10) histories, n > 0.

    Returns:
        numpy.ndarray: (n, 57) matrix whose columns follow the parameter layout.
    """

    parameters = mlp.parameters if isinstance(mlp, MlpPredictor) else np.asarray(mlp, dtype=np.float64)
    inputs = DataValidationUtils.check_array(np.atleast_2d(inputs), (None, N_I), "inputs")
    if len(inputs) == 0:
        raise PredictorTrainingException(TrainingErrorMessage.NO_TRAINING_SAMPLES,
                                         TrainingErrorCode.NO_TRAINING_SAMPLES_CODE)

    _, _, w2, _, w3, _ = unpack_parameters(parameters)
    h1, h2, _ = _forward_pass(parameters, inputs)
    n = len(inputs)

    d_z2 = w3[0] * (1.0 - h2 ** 2)
    d_z1 = (d_z2 @ w2) * (1.0 - h1 ** 2)

    return np.hstack([
        (d_z1[:, :, np.newaxis] * inputs[:, np.newaxis, :]).reshape(n, N_H1 * N_I),
        d_z1,
        (d_z2[:, :, np.newaxis] * h1[:, np.newaxis, :]).reshape(n, N_H2 * N_H1),
        d_z2,
        h2,
        np.ones((n, 1))
    ])


def frame_histories(raw_matrix: np.ndarray) -> TrainingSamples:
    """
    Histories and targets within frames: x[n-10..n-1] predicts x[n] for n = 10..239.
    Histories never cross frame boundaries, giving l_t - n_i = 230 pairs per frame.
    """

    raw_matrix = np.atleast_2d(raw_matrix)
    windows = sliding_window_view(raw_matrix, N_I, axis=1)[:, :raw_matrix.shape[1] - N_I, :]
    return TrainingSamples(histories=windows.reshape(-1, N_I),
                           targets=raw_matrix[:, N_I:].reshape(-1))


def training_samples(frames) -> TrainingSamples:
    return frame_histories(stack_raw_samples(frames))


def frame_residuals(mlp: MlpPredictor, raw_matrix: np.ndarray, measure=ResidualMeasure.MAE) -> np.ndarray:
    """Residual magnitude of `mlp` on every row of a (n_frames, 240) raw sample matrix."""

    raw_matrix = np.atleast_2d(raw_matrix)
    samples = frame_histories(raw_matrix)
    residuals = samples.targets - forward(mlp.parameters, samples.histories)
    return residual_magnitude(residuals.reshape(raw_matrix.shape[0], -1), measure)


def frame_residual(mlp: MlpPredictor, frame: Frame, measure=ResidualMeasure.MAE) -> float:
    """Mean absolute (or squared) prediction error over samples 10..239 of the raw frame."""

    return float(frame_residuals(mlp, frame.raw_samples[np.newaxis, :], measure)[0])


def as_training_samples(samples) -> TrainingSamples:
    if isinstance(samples, TrainingSamples):
        histories, targets = samples
    else:
        pairs = list(samples)
        histories = [history for history, _ in pairs]
        targets = [target for _, target in pairs]

    histories = np.asarray(histories, dtype=np.float64).reshape(-1, N_I)
    targets = np.asarray(targets, dtype=np.float64).reshape(-1)
    if len(targets) == 0:
        raise PredictorTrainingException(TrainingErrorMessage.NO_TRAINING_SAMPLES,
                                         TrainingErrorCode.NO_TRAINING_SAMPLES_CODE)
    return TrainingSamples(histories, targets)


def _mse(parameters, samples):
    errors = samples.targets - forward(parameters, samples.histories)
    return errors, float(np.mean(errors ** 2))


def lm_train(mlp: MlpPredictor, samples, config: TrainConfig = TrainConfig()) -> LmTrainResult:
    """
    Levenberg-Marquardt training for `config.epochs_per_start` epochs.

    Each epoch solves (J^T J + lambda I) delta = J^T e by Cholesky factorization. A step is
    accepted only if the MSE strictly decreases, after which lambda is divided by the factor;
    otherwise lambda is multiplied by it, up to 10 times per epoch.

    Args:
        mlp (MlpPredictor): Starting point.
        samples (TrainingSamples, list): Histories and targets, or (history, target) pairs.
        config (TrainConfig): Epochs and damping schedule.

    Returns:
        LmTrainResult: `converged` is False when the normal equations stayed singular up to the largest damping.

    Raises:
        PredictorTrainingException (NO_TRAINING_SAMPLES_CODE: 7001): If `samples` is empty.
    """

    samples = as_training_samples(samples)
    parameters = np.array(mlp.parameters)
    identity = np.eye(len(parameters))
    damping = config.lm_lambda_init
    errors, mse = _mse(parameters, samples)
    mse_history = [mse]
    converged = True

    for epoch in range(config.epochs_per_start):
        if mse == 0:
            break

        jac = jacobian(parameters, samples.histories)
        normal_matrix = jac.T @ jac
        gradient = jac.T @ errors
        accepted = False
        singular = False

        for _ in range(constants.LM_MAX_ESCALATIONS_PER_EPOCH):
            try:
                step = cho_solve(cho_factor(normal_matrix + damping * identity), gradient)
                singular = False
            except (LinAlgError, ValueError):
                step = None
                singular = True

            if step is not None:
                candidate = parameters + step
                candidate_errors, candidate_mse = _mse(candidate, samples)
                if np.isfinite(candidate_mse) and (candidate_mse < mse):
                    parameters, errors, mse = candidate, candidate_errors, candidate_mse
                    mse_history.append(mse)
                    damping /= config.lm_lambda_factor
                    accepted = True
                    break

            damping *= config.lm_lambda_factor
            if damping > constants.LM_MAX_LAMBDA:
                break

        if accepted:
            continue

        if damping > constants.LM_MAX_LAMBDA:
            if singular:
                converged = False
                logger.warning("Normal equations singular at damping %.3g; keeping parameters after %d epochs", damping, epoch)
            else:
                logger.debug("No descent step below damping %.3g; stopping after %d epochs", constants.LM_MAX_LAMBDA, epoch)
            break

    return LmTrainResult(predictor=MlpPredictor(parameters),
                         final_mse=mse,
                         mse_history=mse_history,
                         converged=converged)


def run_multistart(samples, config: TrainConfig = TrainConfig(), warm_start: MlpPredictor = None) -> list:
    """
    Train every multi-start candidate: the warm start (when given) followed by
    `num_random_starts` uniform random initializations in [-0.5, 0.5]. Without a warm start
    one extra random initialization keeps the candidate count the same.
    """

    samples = as_training_samples(samples)
    rng = np.random.default_rng(config.seed)

    starts = [] if warm_start is None else [warm_start]
    random_count = config.num_random_starts + (1 if warm_start is None else 0)
    starts.extend(MlpPredictor.random(rng) for _ in range(random_count))

    return [lm_train(start, samples, config) for start in starts]


def train_multistart(samples, config: TrainConfig = TrainConfig(), warm_start: MlpPredictor = None) -> MlpPredictor:
    """Predictor with the lowest final MSE among the multi-start candidates; the first one wins ties."""

    results = run_multistart(samples, config, warm_start)
    best = min(range(len(results)), key=lambda i: results[i].final_mse)
    return results[best].predictor
