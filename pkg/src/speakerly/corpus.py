import os
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import signal as sps

from . import constants
from .dsp_frontend import AudioSignal, prepare
from .exceptions.custom_exceptions import InputOutputException, SignalProcessingException
from .exceptions.error_messages import IOErrorMessage, IOErrorCode, SignalErrorMessage, SignalErrorCode
from .utils.data_validation_utils import DataValidationUtils
from .utils.input_output_utils import read_wav, write_wav

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CorpusSpeaker:
    """
    One enrolled speaker. Utterance names default to "train_000", "test_000", ...
    `generator` holds the synthetic generator parameters when the speaker is synthetic.
    """
    speaker_id: str
    train_utterances: list
    test_utterances: list
    train_names: list = field(default_factory=list)
    test_names: list = field(default_factory=list)
    generator: Optional[dict] = None

    def __post_init__(self):
        DataValidationUtils.check_string(self.speaker_id, "speaker_id")
        for split, utterances in zip(constants.CORPUS_SPLITS, (self.train_utterances, self.test_utterances)):
            if len(utterances) == 0:
                raise InputOutputException(IOErrorMessage.EMPTY_SPLIT_DIRECTORY.format(self.speaker_id, split),
                                           IOErrorCode.CORPUS_LAYOUT_ERROR_CODE)
        if not self.train_names:
            object.__setattr__(self, "train_names", [f"train_{i:03d}" for i in range(len(self.train_utterances))])
        if not self.test_names:
            object.__setattr__(self, "test_names", [f"test_{i:03d}" for i in range(len(self.test_utterances))])


@dataclass(frozen=True, eq=False)
class Corpus:
    speakers: list

    def __post_init__(self):
        seen = set()
        for speaker in self.speakers:
            if speaker.speaker_id in seen:
                raise InputOutputException(IOErrorMessage.DUPLICATE_SPEAKER_ID.format(speaker.speaker_id),
                                           IOErrorCode.CORPUS_LAYOUT_ERROR_CODE)
            seen.add(speaker.speaker_id)

    @property
    def speaker_ids(self):
        return [speaker.speaker_id for speaker in self.speakers]

    def __len__(self):
        return len(self.speakers)

    def with_test_from_train(self):
        """Copy of the corpus whose test utterances are the training utterances."""
        return Corpus([CorpusSpeaker(speaker_id=speaker.speaker_id,
                                     train_utterances=speaker.train_utterances,
                                     test_utterances=speaker.train_utterances,
                                     train_names=speaker.train_names,
                                     test_names=speaker.train_names,
                                     generator=speaker.generator)
                       for speaker in self.speakers])


@dataclass(frozen=True)
class SyntheticSpec:
    num_speakers: int = constants.DEFAULT_SYNTHETIC_SPEAKERS
    nonlinear_fraction: float = constants.DEFAULT_SYNTHETIC_NONLINEAR_FRACTION
    pole_radius_range: tuple = constants.DEFAULT_SYNTHETIC_POLE_RADIUS_RANGE
    gain_range: tuple = constants.DEFAULT_SYNTHETIC_GAIN_RANGE
    duration_range: tuple = constants.DEFAULT_SYNTHETIC_DURATION_RANGE
    noise_level: float = constants.DEFAULT_SYNTHETIC_NOISE_LEVEL
    train_utterances: int = constants.DEFAULT_SYNTHETIC_TRAIN_UTTERANCES
    test_utterances: int = constants.DEFAULT_SYNTHETIC_TEST_UTTERANCES
    seed: int = constants.DEFAULT_SEED

    def __post_init__(self):
        DataValidationUtils.validate_synthetic_spec(self.num_speakers, self.nonlinear_fraction,
                                                    self.pole_radius_range, self.gain_range,
                                                    self.duration_range, self.noise_level,
                                                    self.train_utterances, self.test_utterances,
                                                    self.seed)

    @classmethod
    def from_dict(cls, data: dict):
        """Build a spec from string values as read from a key-value file; ranges are written "low,high"."""

        converters = {
            "num_speakers": int,
            "nonlinear_fraction": float,
            "pole_radius_range": _parse_range,
            "gain_range": _parse_range,
            "duration_range": _parse_range,
            "noise_level": float,
            "train_utterances": int,
            "test_utterances": int,
            "seed": int
        }
        values = {}
        for key, value in data.items():
            if key not in converters:
                continue
            try:
                values[key] = converters[key](value) if isinstance(value, str) else value
            except ValueError:
                raise InputOutputException(IOErrorMessage.MALFORMED_CONFIG_VALUE.format(value, key),
                                           IOErrorCode.CONFIG_FILE_ERROR_CODE)
        return cls(**values)


def _parse_range(text):
    low, high = (float(item) for item in text.split(","))
    return (low, high)


def _speaker_rng(seed, index):
    return np.random.default_rng([seed, index])


def synthetic_generator(spec: SyntheticSpec, index: int) -> dict:
    """
    Generator parameters of synthetic speaker `index`: an order-10 all-pole filter with poles in
    five conjugate pairs (radius in `pole_radius_range`, random angle) and, for the first
    round(nonlinear_fraction * num_speakers) speakers, a tanh(g x) waveshaper with g in `gain_range`.
    """

    rng = _speaker_rng(spec.seed, index)
    pairs = constants.LPC_ORDER // 2
    radii = rng.uniform(*spec.pole_radius_range, size=pairs)
    angles = rng.uniform(0.05 * np.pi, 0.95 * np.pi, size=pairs)
    poles = np.concatenate([radii * np.exp(1j * angles), radii * np.exp(-1j * angles)])
    lpc = -np.real(np.poly(poles))[1:]

    nonlinear = index < int(round(spec.nonlinear_fraction * spec.num_speakers))
    gain = float(rng.uniform(*spec.gain_range)) if nonlinear else None
    return {"lpc": lpc.tolist(), "nonlinear": nonlinear, "gain": gain}


def _synthesize_utterance(generator, spec, rng):
    duration = rng.uniform(*spec.duration_range)
    n_samples = int(round(duration * constants.TARGET_SAMPLE_RATE))

    excitation = rng.standard_normal(n_samples)
    x = sps.lfilter([1.0], np.concatenate([[1.0], -np.asarray(generator["lpc"])]), excitation)
    x = x / np.max(np.abs(x))
    if generator["nonlinear"]:
        x = np.tanh(generator["gain"] * x)
    x = x + spec.noise_level * rng.standard_normal(n_samples)
    return AudioSignal(samples=x / np.max(np.abs(x)), sample_rate_hz=constants.TARGET_SAMPLE_RATE)


def synth_corpus(spec: SyntheticSpec = SyntheticSpec(), prepare_signals: bool = True) -> Corpus:
    """
    Deterministic synthetic corpus: speaker i is "spk{i:02d}" and its utterances (1 to 3 s at 8 kHz)
    are white noise through the speaker's all-pole filter, optionally waveshaped, plus noise.

    Args:
        spec (SyntheticSpec): Generator settings and seed.
        prepare_signals (bool): Apply `prepare` to every utterance (set False before writing WAV files).

    Raises:
        SignalProcessingException (UNSTABLE_MODEL_CODE: 5006): If the pole radius range reaches the unit circle.
    """

    if spec.pole_radius_range[1] >= 1.0:
        raise SignalProcessingException(SignalErrorMessage.UNSTABLE_GENERATOR.format(list(spec.pole_radius_range)),
                                        SignalErrorCode.UNSTABLE_MODEL_CODE)

    speakers = []
    for index in range(spec.num_speakers):
        generator = synthetic_generator(spec, index)
        rng = np.random.default_rng([spec.seed, index, 1])
        train = [_synthesize_utterance(generator, spec, rng) for _ in range(spec.train_utterances)]
        test = [_synthesize_utterance(generator, spec, rng) for _ in range(spec.test_utterances)]
        if prepare_signals:
            train = [prepare(utterance) for utterance in train]
            test = [prepare(utterance) for utterance in test]
        speakers.append(CorpusSpeaker(speaker_id=f"spk{index:02d}",
                                      train_utterances=train,
                                      test_utterances=test,
                                      generator=generator))

    logger.info("Synthesized %d speakers (%d nonlinear)", spec.num_speakers,
                sum(speaker.generator["nonlinear"] for speaker in speakers))
    return Corpus(speakers)


def _list_wavs(directory):
    return sorted(name for name in os.listdir(directory)
                  if name.lower().endswith(constants.WAV_EXTENSION) and os.path.isfile(os.path.join(directory, name)))


def load_corpus(root_path: str) -> Corpus:
    """
    Load a corpus laid out as root/speaker_id/{train,test}/*.wav. Speakers and utterances are
    taken in sorted order and every utterance is prepared.

    Raises:
        InputOutputException (CORPUS_LAYOUT_ERROR_CODE: 1003): If the root is missing or empty, or a speaker lacks a split or WAV files.
        All exceptions raised by "read_wav" present in input_output_utils.py.
    """

    if not os.path.isdir(root_path):
        raise InputOutputException(IOErrorMessage.CORPUS_ROOT_MISSING.format(root_path),
                                   IOErrorCode.CORPUS_LAYOUT_ERROR_CODE)

    speaker_ids = sorted(name for name in os.listdir(root_path) if os.path.isdir(os.path.join(root_path, name)))
    if len(speaker_ids) == 0:
        raise InputOutputException(IOErrorMessage.EMPTY_CORPUS_ROOT.format(root_path),
                                   IOErrorCode.CORPUS_LAYOUT_ERROR_CODE)

    speakers = []
    for speaker_id in speaker_ids:
        splits = {}
        for split in constants.CORPUS_SPLITS:
            directory = os.path.join(root_path, speaker_id, split)
            if not os.path.isdir(directory):
                raise InputOutputException(IOErrorMessage.MISSING_SPLIT_DIRECTORY.format(speaker_id, split),
                                           IOErrorCode.CORPUS_LAYOUT_ERROR_CODE)
            names = _list_wavs(directory)
            if len(names) == 0:
                raise InputOutputException(IOErrorMessage.EMPTY_SPLIT_DIRECTORY.format(speaker_id, split),
                                           IOErrorCode.CORPUS_LAYOUT_ERROR_CODE)
            splits[split] = (names, [prepare(read_wav(os.path.join(directory, name))) for name in names])

        train_names, train = splits["train"]
        test_names, test = splits["test"]
        speakers.append(CorpusSpeaker(speaker_id=speaker_id,
                                      train_utterances=train,
                                      test_utterances=test,
                                      train_names=[os.path.splitext(name)[0] for name in train_names],
                                      test_names=[os.path.splitext(name)[0] for name in test_names]))

    logger.info("Loaded %d speakers from %s", len(speakers), root_path)
    return Corpus(speakers)


def write_corpus(corpus: Corpus, root_path: str):
    """Write every utterance as root/speaker_id/{train,test}/<name>.wav (16-bit mono PCM)."""

    for speaker in corpus.speakers:
        for split, names, utterances in ((constants.CORPUS_SPLITS[0], speaker.train_names, speaker.train_utterances),
                                         (constants.CORPUS_SPLITS[1], speaker.test_names, speaker.test_utterances)):
            for name, utterance in zip(names, utterances):
                write_wav(os.path.join(root_path, speaker.speaker_id, split, name + constants.WAV_EXTENSION), utterance)
