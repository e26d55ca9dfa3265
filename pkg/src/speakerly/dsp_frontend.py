import enum
import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import signal as sps

from . import constants
from .exceptions.custom_exceptions import SignalProcessingException
from .exceptions.error_messages import SignalErrorMessage, SignalErrorCode
from .utils.data_validation_utils import DataValidationUtils

logger = logging.getLogger(__name__)


class ResidualMeasure(str, enum.Enum):
    MAE = "mae"
    MSE = "mse"


@dataclass(frozen=True, eq=False)
class AudioSignal:
    """
    Mono audio with amplitudes in [-1, 1].

    `prepared` is set by `prepare` only. Framing refuses unprepared signals and
    preparation refuses prepared ones, so the pre-emphasis is applied exactly once.
    """
    samples: np.ndarray
    sample_rate_hz: int
    prepared: bool = False

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float64))

    @property
    def duration_seconds(self):
        return len(self.samples) / self.sample_rate_hz


@dataclass(frozen=True, eq=False)
class Frame:
    samples: np.ndarray
    raw_samples: np.ndarray
    start_index: int


@dataclass(frozen=True, eq=False)
class LpccVector:
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = DataValidationUtils.check_array(self.coeffs, (constants.CEPSTRAL_ORDER,), "LPCC vector")
        object.__setattr__(self, "coeffs", coeffs)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.coeffs
        return self.coeffs.astype(dtype)

    def __len__(self):
        return len(self.coeffs)


@dataclass(frozen=True, eq=False)
class FeatureSet:
    """Frames of one signal and their LPCC rows, degenerate frames removed."""
    frames: list = field(default_factory=list)
    lpcc: np.ndarray = field(default_factory=lambda: np.zeros((0, constants.CEPSTRAL_ORDER)))
    degenerate_frames: int = 0

    def __len__(self):
        return len(self.frames)


_HAMMING_WINDOW = np.hamming(constants.FRAME_LENGTH)
_HAMMING_WINDOW.setflags(write=False)

_DECIMATION_TAPS = sps.firwin(constants.DECIMATION_FILTER_TAPS,
                              constants.DECIMATION_CUTOFF_HZ,
                              fs=2 * constants.TARGET_SAMPLE_RATE)


def hamming_window():
    return _HAMMING_WINDOW


def _steady_state_peak(samples, edge):
    # decimation filter start-up and tail transients must not set the scale
    peak = np.max(np.abs(samples[edge:len(samples) - edge])) if len(samples) > 2 * edge else 0.0
    return peak if peak > 0 else np.max(np.abs(samples))


def prepare(signal: AudioSignal) -> AudioSignal:
    """
    Bring a raw signal to the analysis format: 8 kHz, pre-emphasized with
    y[n] = x[n] - 0.95 x[n-1] (y[0] = x[0]) and peak-normalized to [-1, 1].
    16 kHz input is low-pass filtered at 3.4 kHz (63-tap windowed sinc) and decimated by 2; its peak
    is measured outside the filter edge transients and edge samples above that peak are clipped.

    Raises:
        SignalProcessingException (ALREADY_PREPARED_CODE: 5002): If `signal` was already prepared.
        SignalProcessingException (UNSUPPORTED_SAMPLE_RATE_CODE: 5001): If the sample rate is neither 8000 nor 16000 Hz.
    """

    if signal.prepared:
        raise SignalProcessingException(SignalErrorMessage.ALREADY_PREPARED,
                                        SignalErrorCode.ALREADY_PREPARED_CODE)

    if signal.sample_rate_hz not in constants.SUPPORTED_INPUT_SAMPLE_RATES:
        raise SignalProcessingException(SignalErrorMessage.UNSUPPORTED_SAMPLE_RATE.format(list(constants.SUPPORTED_INPUT_SAMPLE_RATES),
                                                                                          signal.sample_rate_hz),
                                        SignalErrorCode.UNSUPPORTED_SAMPLE_RATE_CODE)

    samples = signal.samples
    edge = 0
    if (signal.sample_rate_hz != constants.TARGET_SAMPLE_RATE) and (len(samples) > 0):
        factor = signal.sample_rate_hz // constants.TARGET_SAMPLE_RATE
        samples = sps.resample_poly(samples, 1, factor, window=_DECIMATION_TAPS)
        edge = constants.DECIMATION_FILTER_TAPS // (2 * factor) + 1

    if len(samples) > 0:
        samples = sps.lfilter([1.0, -constants.PRE_EMPHASIS_COEFFICIENT], [1.0], samples)
        peak = _steady_state_peak(samples, edge)
        if peak > 0:
            samples = np.clip(samples / peak, -1.0, 1.0)

    return AudioSignal(samples=samples, sample_rate_hz=constants.TARGET_SAMPLE_RATE, prepared=True)


def frames(signal: AudioSignal) -> list:
    """
    Cut a prepared signal into 240-sample Hamming-windowed frames with a hop of 80 samples.
    The trailing partial frame is dropped; a signal shorter than one frame yields no frames.
    """

    if (not signal.prepared) or (signal.sample_rate_hz != constants.TARGET_SAMPLE_RATE):
        raise SignalProcessingException(SignalErrorMessage.NOT_PREPARED,
                                        SignalErrorCode.NOT_PREPARED_CODE)

    if len(signal.samples) < constants.FRAME_LENGTH:
        return []

    windows = sliding_window_view(signal.samples, constants.FRAME_LENGTH)[::constants.FRAME_HOP]
    return [Frame(samples=raw * _HAMMING_WINDOW,
                  raw_samples=np.array(raw),
                  start_index=index * constants.FRAME_HOP)
            for index, raw in enumerate(windows)]


def stack_raw_samples(frame_list) -> np.ndarray:
    if len(frame_list) == 0:
        return np.zeros((0, constants.FRAME_LENGTH))
    return np.stack([frame.raw_samples for frame in frame_list])


def autocorrelate(frame, max_lag: int) -> np.ndarray:
    """
    Autocorrelation r[0..max_lag] of the windowed frame samples.

    Args:
        frame (Frame, numpy.ndarray): A frame, or its windowed samples.
        max_lag (int): Largest lag, smaller than the frame length.
    """

    samples = frame.samples if isinstance(frame, Frame) else np.asarray(frame, dtype=np.float64)
    DataValidationUtils.validate_autocorrelate_parameters(max_lag, len(samples))

    n = len(samples)
    full = np.correlate(samples, samples, mode="full")
    return full[n - 1:n + max_lag]


def levinson_durbin(r, order: int):
    """
    Solve the normal equations of order `order` for autocorrelation `r`.

    The predictor convention is x_hat[n] = sum_k a_k x[n-k], so A(z) = 1 - sum_k a_k z^-k.

    Returns:
        tuple: (lpc, reflection, pred_error) where lpc and reflection are arrays of length `order`.

    Raises:
        SignalProcessingException (DEGENERATE_FRAME_CODE: 5004): If r[0] <= 0.
        SignalProcessingException (SINGULAR_AUTOCORRELATION_CODE: 5005): If `r` is not positive definite.
    """

    r = np.asarray(r, dtype=np.float64)
    DataValidationUtils.validate_levinson_durbin_parameters(r, order)

    if not r[0] > 0:
        raise SignalProcessingException(SignalErrorMessage.DEGENERATE_FRAME.format(r[0]),
                                        SignalErrorCode.DEGENERATE_FRAME_CODE)

    lpc = np.zeros(order)
    reflection = np.zeros(order)
    pred_error = r[0]

    for i in range(order):
        acc = r[i + 1] - np.dot(lpc[:i], r[i:0:-1])
        k = acc / pred_error
        previous = lpc[:i].copy()
        lpc[i] = k
        lpc[:i] = previous - k * previous[::-1]
        reflection[i] = k
        pred_error = pred_error * (1.0 - k * k)

        if (abs(k) >= 1.0) or (not pred_error > 0):
            raise SignalProcessingException(SignalErrorMessage.SINGULAR_AUTOCORRELATION.format(pred_error, i + 1),
                                            SignalErrorCode.SINGULAR_AUTOCORRELATION_CODE)

    return lpc, reflection, float(pred_error)


def lpc_to_reflection(lpc) -> np.ndarray:
    """Step-down recursion; raises if any reflection coefficient is outside (-1, 1)."""

    a = np.asarray(lpc, dtype=np.float64).copy()
    reflection = np.zeros(len(a))

    for m in range(len(a), 0, -1):
        k = a[m - 1]
        reflection[m - 1] = k
        if abs(k) >= 1.0:
            raise SignalProcessingException(SignalErrorMessage.UNSTABLE_MODEL.format(k, m),
                                            SignalErrorCode.UNSTABLE_MODEL_CODE)
        head = a[:m - 1]
        a = (head + k * head[::-1]) / (1.0 - k * k)

    return reflection


def lpc_to_cepstrum(lpc, cep_order: int = constants.CEPSTRAL_ORDER) -> LpccVector:
    """
    Cepstrum of 1/A(z) by the recursion c_n = a_n + sum_{k=1}^{n-1} (k/n) c_k a_{n-k},
    with a_n = 0 beyond the LPC order.

    Raises:
        SignalProcessingException (UNSTABLE_MODEL_CODE: 5006): If the LPC model is unstable.
    """

    a = np.asarray(lpc, dtype=np.float64)
    lpc_to_reflection(a)
    return LpccVector(_cepstrum_recursion(a, cep_order))


def _cepstrum_recursion(a, cep_order):
    p = len(a)
    c = np.zeros(cep_order + 1)
    for n in range(1, cep_order + 1):
        acc = a[n - 1] if n <= p else 0.0
        for k in range(max(1, n - p), n):
            acc += (k / n) * c[k] * a[n - k - 1]
        c[n] = acc
    return c[1:]


def cepstrum_to_lpc(cepstrum, lpc_order: int = constants.LPC_ORDER) -> np.ndarray:
    """
    Inverse recursion a_n = c_n - sum_{k=1}^{n-1} (k/n) c_k a_{n-k}, for n = 1..lpc_order.

    Exact for cepstra produced by `lpc_to_cepstrum`. Averaged cepstra (codebook centroids)
    map to a predictor that need not be stable, which is harmless for FIR residual filtering.
    """

    c = np.asarray(cepstrum, dtype=np.float64)
    a = np.zeros(lpc_order)
    for n in range(1, lpc_order + 1):
        acc = c[n - 1]
        for k in range(1, n):
            acc -= (k / n) * c[k - 1] * a[n - k - 1]
        a[n - 1] = acc
    return a


def residual_magnitude(residuals: np.ndarray, measure: ResidualMeasure) -> np.ndarray:
    """Mean absolute or mean squared value along the last axis."""

    if ResidualMeasure(measure) is ResidualMeasure.MSE:
        return np.mean(residuals ** 2, axis=-1)
    return np.mean(np.abs(residuals), axis=-1)


def lpc_residuals(lpc_rows: np.ndarray, raw_matrix: np.ndarray, measure: ResidualMeasure) -> np.ndarray:
    """
    Per-frame residual magnitude of linear predictors, one predictor per frame.

    Residuals cover n = n_i..l_t-1 of the raw samples, the same span as the MLP predictors use.

    Args:
        lpc_rows (numpy.ndarray): (n_frames, order) predictor coefficients.
        raw_matrix (numpy.ndarray): (n_frames, 240) raw frame samples.
    """

    start = constants.MLP_INPUT_SIZE
    length = raw_matrix.shape[1]
    prediction = np.zeros((raw_matrix.shape[0], length - start))
    for k in range(1, lpc_rows.shape[1] + 1):
        prediction += lpc_rows[:, k - 1:k] * raw_matrix[:, start - k:length - k]
    return residual_magnitude(raw_matrix[:, start:] - prediction, measure)


def lpc_residual(lpc, frame: Frame, measure: ResidualMeasure = ResidualMeasure.MAE) -> float:
    a = np.asarray(lpc, dtype=np.float64)[np.newaxis, :]
    return float(lpc_residuals(a, frame.raw_samples[np.newaxis, :], measure)[0])


def frame_lpcc(frame: Frame) -> LpccVector:
    r = autocorrelate(frame, constants.LPC_ORDER)
    lpc, _, _ = levinson_durbin(r, constants.LPC_ORDER)
    return lpc_to_cepstrum(lpc, constants.CEPSTRAL_ORDER)


def extract_features(signal: AudioSignal) -> FeatureSet:
    """
    Frames and LPCC vectors of a prepared signal.

    Frames whose analysis fails (silent, singular or unstable) are left out and counted,
    so they contribute nothing to training or to sentence scores.
    """

    kept_frames, rows = [], []
    degenerate = 0

    for frame in frames(signal):
        try:
            rows.append(frame_lpcc(frame).coeffs)
        except SignalProcessingException as e:
            degenerate += 1
            logger.debug("Skipping frame at sample %d: %s", frame.start_index, e.to_dict()["error_message"])
            continue
        kept_frames.append(frame)

    if degenerate:
        logger.info("Skipped %d degenerate frames out of %d", degenerate, degenerate + len(kept_frames))

    lpcc = np.array(rows) if rows else np.zeros((0, constants.CEPSTRAL_ORDER))
    return FeatureSet(frames=kept_frames, lpcc=lpcc, degenerate_frames=degenerate)


def merge_feature_sets(feature_sets) -> FeatureSet:
    """Concatenate per-utterance feature sets, keeping frame order."""

    feature_sets = list(feature_sets)
    merged_frames = [frame for feature_set in feature_sets for frame in feature_set.frames]
    lpcc = [feature_set.lpcc for feature_set in feature_sets if len(feature_set.lpcc)]
    return FeatureSet(frames=merged_frames,
                      lpcc=np.vstack(lpcc) if lpcc else np.zeros((0, constants.CEPSTRAL_ORDER)),
                      degenerate_frames=sum(feature_set.degenerate_frames for feature_set in feature_sets))
