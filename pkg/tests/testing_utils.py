import numpy as np
from scipy import signal as sps

from src.speakerly import constants
from src.speakerly.corpus import SyntheticSpec, synth_corpus
from src.speakerly.dsp_frontend import AudioSignal, Frame
from src.speakerly.experiment import TrainingConfig


def stable_lpc(rng, order=constants.LPC_ORDER, radius_range=(0.3, 0.9)):
    """
    Random stable predictor coefficients (x_hat[n] = sum a_k x[n-k]) built from conjugate pole pairs.

    Args:
        rng (numpy.random.Generator): Random generator.
        order (int): Even predictor order.
        radius_range (tuple): Range of pole radii, inside the unit circle.
    """

    radii = rng.uniform(*radius_range, size=order // 2)
    angles = rng.uniform(0.05 * np.pi, 0.95 * np.pi, size=order // 2)
    poles = np.concatenate([radii * np.exp(1j * angles), radii * np.exp(-1j * angles)])
    return -np.real(np.poly(poles))[1:]


def ar_samples(lpc, n_samples, rng, amplitude=1.0):
    excitation = rng.standard_normal(n_samples)
    x = sps.lfilter([1.0], np.concatenate([[1.0], -np.asarray(lpc)]), excitation)
    return amplitude * x / np.max(np.abs(x))


def prepared_signal(samples):
    """Wrap samples as an already prepared 8 kHz signal."""
    return AudioSignal(samples=samples, sample_rate_hz=constants.TARGET_SAMPLE_RATE, prepared=True)


def random_frames(rng, n_frames, lpc=None):
    lpc = stable_lpc(rng) if lpc is None else lpc
    raw = ar_samples(lpc, n_frames * constants.FRAME_LENGTH, rng).reshape(n_frames, constants.FRAME_LENGTH)
    return [Frame(samples=row * np.hamming(constants.FRAME_LENGTH), raw_samples=row, start_index=i * constants.FRAME_LENGTH)
            for i, row in enumerate(raw)]


def small_corpus(num_speakers=3, seed=0, nonlinear_fraction=0.0, noise_level=0.0):
    """Short, well separated synthetic corpus for end-to-end tests."""

    spec = SyntheticSpec(num_speakers=num_speakers,
                         nonlinear_fraction=nonlinear_fraction,
                         pole_radius_range=(0.85, 0.95),
                         duration_range=(1.0, 1.2),
                         noise_level=noise_level,
                         train_utterances=2,
                         test_utterances=2,
                         seed=seed)
    return synth_corpus(spec)


def fast_training_config(**overrides):
    values = {"linear_bits": 2,
              "nonlinear_bits": 1,
              "epochs_per_start": 2,
              "num_random_starts": 1,
              "seed": 0}
    values.update(overrides)
    return TrainingConfig(**values)
