import configparser
import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd
from scipy.io import wavfile

from .. import constants
from ..dsp_frontend import AudioSignal
from ..linear_codebook import LinearCodebook
from ..mlp_predictor import MlpPredictor
from ..nonlinear_codebook import NonlinearCodebook
from ..recognizer import SpeakerModel
from ..exceptions.custom_exceptions import InputOutputException
from ..exceptions.error_messages import IOErrorMessage, IOErrorCode
from .utils import create_path


@dataclass
class ModelFile:
    """Contents of a model file: the speaker models plus the setup that produced them."""
    models: list
    training_config: dict = field(default_factory=dict)
    alpha: Optional[float] = None


def read_wav(file_path: str) -> AudioSignal:
    """
    Read a mono 16-bit PCM WAV file sampled at 8 or 16 kHz.

    Returns:
        AudioSignal: Unprepared signal with samples scaled to [-1, 1).

    Raises:
        InputOutputException (FILE_READ_ERROR_CODE: 1001): If the file can not be opened.
        InputOutputException (MALFORMED_WAV_ERROR_CODE: 1002): If the file is not valid mono 16-bit PCM at a supported rate.
    """

    try:
        sample_rate, data = wavfile.read(file_path)
    except (FileNotFoundError, IsADirectoryError, PermissionError):
        raise InputOutputException(IOErrorMessage.UNABLE_TO_READ_FILE.format(file_path),
                                   IOErrorCode.FILE_READ_ERROR_CODE)
    except Exception:
        raise InputOutputException(IOErrorMessage.UNABLE_TO_READ_FILE.format(file_path),
                                   IOErrorCode.MALFORMED_WAV_ERROR_CODE)

    if (data.dtype != np.int16) or (data.ndim != 1):
        raise InputOutputException(IOErrorMessage.UNSUPPORTED_WAV_FORMAT.format(file_path, data.dtype, data.shape),
                                   IOErrorCode.MALFORMED_WAV_ERROR_CODE)

    if sample_rate not in constants.SUPPORTED_INPUT_SAMPLE_RATES:
        raise InputOutputException(IOErrorMessage.UNSUPPORTED_WAV_SAMPLE_RATE.format(file_path, sample_rate),
                                   IOErrorCode.MALFORMED_WAV_ERROR_CODE)

    return AudioSignal(samples=data.astype(np.float64) / constants.INT16_FULL_SCALE,
                       sample_rate_hz=int(sample_rate))


def write_wav(file_path: str, signal: AudioSignal):
    """Write `signal` as mono 16-bit PCM; samples are clipped to the int16 range."""

    create_path(file_path)
    scaled = np.round(signal.samples * constants.INT16_FULL_SCALE)
    data = np.clip(scaled, np.iinfo(np.int16).min, np.iinfo(np.int16).max).astype(np.int16)
    wavfile.write(file_path, signal.sample_rate_hz, data)


def _linear_codebook_to_dict(cb: LinearCodebook) -> dict:
    return {
        "centroids": cb.centroids.tolist(),
        "size_bits": int(cb.size_bits),
        "split_method": cb.split_method.value,
        "training_distortion": float(cb.training_distortion),
        "distance": cb.distance.value
    }


def _linear_codebook_from_dict(data: dict) -> LinearCodebook:
    return LinearCodebook(centroids=np.array(data["centroids"], dtype=np.float64),
                          size_bits=data["size_bits"],
                          split_method=data["split_method"],
                          training_distortion=data["training_distortion"],
                          distance=data["distance"])


def _nonlinear_codebook_to_dict(ncb: NonlinearCodebook) -> dict:
    return {
        "predictors": [predictor.parameters.tolist() for predictor in ncb.predictors],
        "size_bits": int(ncb.size_bits),
        "lloyd_iterations_done": int(ncb.lloyd_iterations_done),
        "distortion_history": [float(value) for value in ncb.distortion_history]
    }


def _nonlinear_codebook_from_dict(data: dict) -> NonlinearCodebook:
    return NonlinearCodebook(predictors=[MlpPredictor(np.array(parameters, dtype=np.float64))
                                         for parameters in data["predictors"]],
                             size_bits=data["size_bits"],
                             lloyd_iterations_done=data["lloyd_iterations_done"],
                             distortion_history=list(data["distortion_history"]))


def model_to_dict(model: SpeakerModel) -> dict:
    return {
        "speaker_id": model.speaker_id,
        "linear_cb": _linear_codebook_to_dict(model.linear_cb),
        "nonlinear_cb": None if model.nonlinear_cb is None else _nonlinear_codebook_to_dict(model.nonlinear_cb)
    }


def model_from_dict(data: dict) -> SpeakerModel:
    nonlinear = data["nonlinear_cb"]
    return SpeakerModel(speaker_id=data["speaker_id"],
                        linear_cb=_linear_codebook_from_dict(data["linear_cb"]),
                        nonlinear_cb=None if nonlinear is None else _nonlinear_codebook_from_dict(nonlinear))


def _canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _checksum(payload: dict) -> str:
    return hashlib.sha256(_canonical_json(payload).encode("utf-8")).hexdigest()


def save_models(models, file_path: str, training_config: dict = None, alpha: float = None):
    """
    Save speaker models as a versioned JSON model file.

    The file holds {"format", "version", "checksum", "payload"}; the checksum is the SHA-256 of the
    canonical (sorted, compact) JSON of the payload. Floats are written with repr precision so a
    round trip reproduces every parameter bit for bit.

    Args:
        models (list): SpeakerModel objects.
        file_path (str): Output path; parent directories are created.
        training_config (dict, optional): Hyperparameters and seed used for training.
        alpha (int, float, optional): Residual weight selected by an alpha sweep.
    """

    payload = {
        "models": [model_to_dict(model) for model in models],
        "training_config": dict(training_config or {}),
        "alpha": None if alpha is None else float(alpha)
    }
    document = {
        "format": constants.MODEL_FILE_FORMAT,
        "version": constants.MODEL_FILE_VERSION,
        "checksum": _checksum(payload),
        "payload": payload
    }

    create_path(file_path)
    with open(file_path, "w", encoding="utf-8") as f:
        json.dump(document, f, sort_keys=True, allow_nan=False)


def load_models(file_path: str) -> ModelFile:
    """
    Load a model file written by `save_models`.

    Raises:
        InputOutputException (FILE_READ_ERROR_CODE: 1001): If the file can not be opened.
        InputOutputException (MODEL_FILE_ERROR_CODE: 1004): If the file is truncated, not JSON or not a model file.
        InputOutputException (MODEL_FILE_VERSION_ERROR_CODE: 1005): If the format version is not supported.
        InputOutputException (MODEL_FILE_CHECKSUM_ERROR_CODE: 1006): If the payload does not match its checksum.
    """

    try:
        with open(file_path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError:
        raise InputOutputException(IOErrorMessage.UNABLE_TO_READ_FILE.format(file_path),
                                   IOErrorCode.FILE_READ_ERROR_CODE)

    try:
        document = json.loads(text)
    except ValueError:
        raise InputOutputException(IOErrorMessage.CORRUPTED_MODEL_FILE.format(file_path),
                                   IOErrorCode.MODEL_FILE_ERROR_CODE)

    if (not isinstance(document, dict)) or any(key not in document for key in constants.MODEL_FILE_KEYS) \
            or (document["format"] != constants.MODEL_FILE_FORMAT):
        raise InputOutputException(IOErrorMessage.NOT_A_MODEL_FILE.format(file_path),
                                   IOErrorCode.MODEL_FILE_ERROR_CODE)

    if document["version"] != constants.MODEL_FILE_VERSION:
        raise InputOutputException(IOErrorMessage.UNSUPPORTED_MODEL_FILE_VERSION.format(document["version"],
                                                                                        constants.MODEL_FILE_VERSION),
                                   IOErrorCode.MODEL_FILE_VERSION_ERROR_CODE)

    payload = document["payload"]
    if (not isinstance(payload, dict)) or (_checksum(payload) != document["checksum"]):
        raise InputOutputException(IOErrorMessage.MODEL_FILE_CHECKSUM_MISMATCH.format(file_path),
                                   IOErrorCode.MODEL_FILE_CHECKSUM_ERROR_CODE)

    try:
        models = [model_from_dict(model) for model in payload["models"]]
        return ModelFile(models=models,
                         training_config=payload["training_config"],
                         alpha=payload["alpha"])
    except (KeyError, TypeError, ValueError):
        raise InputOutputException(IOErrorMessage.CORRUPTED_MODEL_FILE.format(file_path),
                                   IOErrorCode.MODEL_FILE_ERROR_CODE)


def read_key_value_file(file_path: str) -> dict:
    """
    Read a `key = value` text file (`#` starts a comment) into a dictionary of strings.
    Keys are lower-cased and dashes become underscores, so flag names can be used verbatim.

    Raises:
        InputOutputException (FILE_READ_ERROR_CODE: 1001): If the file can not be opened.
        InputOutputException (CONFIG_FILE_ERROR_CODE: 1007): If a line is not a key-value pair.
    """

    try:
        with open(file_path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError:
        raise InputOutputException(IOErrorMessage.UNABLE_TO_READ_FILE.format(file_path),
                                   IOErrorCode.FILE_READ_ERROR_CODE)

    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        parser.read_string("[settings]\n" + text)
    except configparser.Error:
        raise InputOutputException(IOErrorMessage.MALFORMED_CONFIG_LINE.format(file_path),
                                   IOErrorCode.CONFIG_FILE_ERROR_CODE)

    return {key.strip().lower().replace("-", "_"): value.strip() for key, value in parser.items("settings")}


def write_data_file(df: pd.DataFrame, file_path: str):
    """Write a plot-ready whitespace separated text table with a header row."""

    create_path(file_path)
    df.to_csv(file_path, sep="\t", index=False, float_format="%.10g")


def read_data_file(file_path: str) -> pd.DataFrame:
    try:
        return pd.read_csv(file_path, sep="\t")
    except Exception:
        raise InputOutputException(IOErrorMessage.UNABLE_TO_READ_FILE.format(file_path),
                                   IOErrorCode.FILE_READ_ERROR_CODE)


def write_json(data: dict, file_path: str):
    create_path(file_path)
    with open(file_path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, sort_keys=True)
