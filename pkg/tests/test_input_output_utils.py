import json
import re
import pytest
import numpy as np
import pandas as pd

from src.speakerly.dsp_frontend import AudioSignal
from src.speakerly.linear_codebook import LinearCodebook, SplitMethod
from src.speakerly.mlp_predictor import MlpPredictor
from src.speakerly.nonlinear_codebook import NonlinearCodebook
from src.speakerly.recognizer import SpeakerModel
from src.speakerly.exceptions.custom_exceptions import InputOutputException
from src.speakerly.utils.input_output_utils import read_wav, write_wav, save_models, load_models, \
                                                   read_key_value_file, write_data_file, read_data_file


def _models():
    rng = np.random.default_rng(0)
    with_nonlinear = SpeakerModel("alice",
                                  LinearCodebook(centroids=rng.standard_normal((4, 12)), size_bits=2,
                                                 split_method=SplitMethod.HYPERPLANE, training_distortion=0.1 / 3),
                                  NonlinearCodebook(predictors=[MlpPredictor.random(rng) for _ in range(2)],
                                                    size_bits=1, lloyd_iterations_done=2,
                                                    distortion_history=[3.0, 2.5, 2.25]))
    linear_only = SpeakerModel("bob", LinearCodebook(centroids=rng.standard_normal((4, 12)), size_bits=2))
    return [with_nonlinear, linear_only]


def _tamper(file_path, edit):
    with open(file_path, "r", encoding="utf-8") as f:
        document = json.load(f)
    edit(document)
    with open(file_path, "w", encoding="utf-8") as f:
        json.dump(document, f)


#############
# model files
#############

def test_model_file_round_trip_is_exact(tmp_path):
    file_path = str(tmp_path / "models" / "speakers.json")
    models = _models()
    save_models(models, file_path, training_config={"seed": 3}, alpha=0.25)

    loaded = load_models(file_path)
    assert loaded.training_config == {"seed": 3}
    assert loaded.alpha == 0.25
    assert [model.speaker_id for model in loaded.models] == ["alice", "bob"]

    alice = loaded.models[0]
    assert np.array_equal(alice.linear_cb.centroids, models[0].linear_cb.centroids)
    assert alice.linear_cb.split_method is SplitMethod.HYPERPLANE
    assert alice.linear_cb.training_distortion == 0.1 / 3
    assert alice.nonlinear_cb.distortion_history == [3.0, 2.5, 2.25]
    for a, b in zip(alice.nonlinear_cb.predictors, models[0].nonlinear_cb.predictors):
        assert np.array_equal(a.parameters, b.parameters)
    assert loaded.models[1].nonlinear_cb is None


def test_model_file_checksum_mismatch(tmp_path):
    file_path = str(tmp_path / "speakers.json")
    save_models(_models(), file_path)
    _tamper(file_path, lambda document: document["payload"]["models"][0]["linear_cb"]["centroids"][0].__setitem__(0, 9.0))
    expected_error_msg = re.escape(f"(\"Checksum mismatch in model file '{file_path}'\", 1006)")

    with pytest.raises(InputOutputException, match=expected_error_msg):
        load_models(file_path)


def test_model_file_unsupported_version(tmp_path):
    file_path = str(tmp_path / "speakers.json")
    save_models(_models(), file_path)
    _tamper(file_path, lambda document: document.__setitem__("version", 2))
    expected_error_msg = re.escape("('Model file version 2 is not supported, expected version 1', 1005)")

    with pytest.raises(InputOutputException, match=expected_error_msg):
        load_models(file_path)


def test_model_file_truncated(tmp_path):
    file_path = str(tmp_path / "speakers.json")
    save_models(_models(), file_path)
    with open(file_path, "r", encoding="utf-8") as f:
        text = f.read()
    with open(file_path, "w", encoding="utf-8") as f:
        f.write(text[:len(text) // 2])
    expected_error_msg = re.escape(f"(\"Model file '{file_path}' is corrupted and can not be parsed\", 1004)")

    with pytest.raises(InputOutputException, match=expected_error_msg):
        load_models(file_path)


def test_not_a_model_file(tmp_path):
    file_path = str(tmp_path / "other.json")
    with open(file_path, "w", encoding="utf-8") as f:
        json.dump({"some": "thing"}, f)
    expected_error_msg = re.escape(f"(\"File '{file_path}' is not a speakerly model file\", 1004)")

    with pytest.raises(InputOutputException, match=expected_error_msg):
        load_models(file_path)


def test_missing_model_file(tmp_path):
    file_path = str(tmp_path / "missing.json")
    expected_error_msg = re.escape(f"(\"Unable to read file: '{file_path}'\", 1001)")

    with pytest.raises(InputOutputException, match=expected_error_msg):
        load_models(file_path)


###########
# wav files
###########

def test_wav_round_trip(tmp_path):
    file_path = str(tmp_path / "utt.wav")
    samples = np.random.default_rng(1).uniform(-0.9, 0.9, 1600)
    write_wav(file_path, AudioSignal(samples=samples, sample_rate_hz=16000))

    signal = read_wav(file_path)
    assert signal.sample_rate_hz == 16000
    assert not signal.prepared
    assert np.allclose(signal.samples, samples, atol=1 / 32768)


def test_read_wav_unsupported_sample_rate(tmp_path):
    file_path = str(tmp_path / "utt.wav")
    write_wav(file_path, AudioSignal(samples=np.zeros(100), sample_rate_hz=44100))
    expected_error_msg = re.escape(f"(\"WAV file '{file_path}' must be sampled at 8000 or 16000 Hz but found 44100 Hz\", 1002)")

    with pytest.raises(InputOutputException, match=expected_error_msg):
        read_wav(file_path)


def test_read_wav_not_a_wav_file(tmp_path):
    file_path = tmp_path / "utt.wav"
    file_path.write_text("not audio")

    with pytest.raises(InputOutputException, match=re.escape("1002)")):
        read_wav(str(file_path))


###################
# key-value files
###################

def test_read_key_value_file(tmp_path):
    file_path = tmp_path / "settings.conf"
    file_path.write_text("# training\nlinear-bits = 6\nSEED = 4  # fixed\nsplit_method = hyperplane\n")

    assert read_key_value_file(str(file_path)) == {"linear_bits": "6", "seed": "4", "split_method": "hyperplane"}


def test_read_key_value_file_malformed_line(tmp_path):
    file_path = tmp_path / "settings.conf"
    file_path.write_text("linear_bits = 6\njust some words\n")
    expected_error_msg = re.escape(f"(\"Unable to parse config file '{file_path}'\", 1007)")

    with pytest.raises(InputOutputException, match=expected_error_msg):
        read_key_value_file(str(file_path))


############
# data files
############

def test_data_file_round_trip(tmp_path):
    file_path = str(tmp_path / "out" / "sweep.tsv")
    df = pd.DataFrame({"alpha": [0.0, 0.5], "error_rate": [0.25, 0.125]})
    write_data_file(df, file_path)

    assert read_data_file(file_path).equals(df)
