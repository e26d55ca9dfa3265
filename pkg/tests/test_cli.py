import os
import json
import pytest

from src.speakerly.cli import main
from src.speakerly.utils.input_output_utils import load_models, read_data_file


SYNTHETIC_SPEC = """
num_speakers = 3
nonlinear_fraction = 0.0
pole_radius_range = 0.85,0.95
duration_range = 0.6,0.6
train_utterances = 2
test_utterances = 1
"""

FAST_TRAINING_FLAGS = ["--linear-bits", "2", "--nonlinear-bits", "1", "--epochs-per-start", "2", "--num-random-starts", "1"]


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    spec_path = root / "spec.conf"
    spec_path.write_text(SYNTHETIC_SPEC)

    corpus_dir = str(root / "corpus")
    model_path = str(root / "models.json")
    assert main(["synth", "--spec", str(spec_path), "--out", corpus_dir]) == 0
    assert main(["--log-level", "WARNING", "train", "--corpus", corpus_dir, "--out", model_path] + FAST_TRAINING_FLAGS) == 0
    return {"root": root, "spec": str(spec_path), "corpus": corpus_dir, "models": model_path}


######
# cost
######

def test_cost_defaults(capsys):
    assert main(["cost"]) == 0
    out = capsys.readouterr().out

    assert "cost_lpcc: 1536\n" in out
    assert "cost_mlp: 1635456\n" in out
    assert "cost_lpc_residue: 6136\n" in out


def test_cost_with_flags(capsys):
    assert main(["cost", "--n", "10", "--k", "0"]) == 0
    out = capsys.readouterr().out

    assert "cost_lpcc: 15360\n" in out
    assert "cost_mlp: 15360\n" in out


###############
# synth / train
###############

def test_synth_writes_corpus_layout(workspace):
    assert sorted(os.listdir(workspace["corpus"])) == ["spk00", "spk01", "spk02"]
    assert sorted(os.listdir(os.path.join(workspace["corpus"], "spk01", "train"))) == ["train_000.wav", "train_001.wav"]


def test_train_writes_model_file(workspace):
    model_file = load_models(workspace["models"])

    assert [model.speaker_id for model in model_file.models] == ["spk00", "spk01", "spk02"]
    assert model_file.models[0].linear_cb.size == 4
    assert model_file.training_config["nonlinear_bits"] == 1
    assert model_file.alpha is None


def test_train_from_config_file(workspace, tmp_path):
    model_path = str(tmp_path / "config_models.json")
    config_path = tmp_path / "train.conf"
    config_path.write_text(f"synthetic = {workspace['spec']}\nout = {model_path}\nlinear-bits = 1\n"
                           "no_nonlinear = true\nepochs_per_start = 1\n")

    assert main(["--config", str(config_path), "train"]) == 0
    model_file = load_models(model_path)
    assert model_file.models[0].linear_cb.size == 2
    assert model_file.models[0].nonlinear_cb is None


def test_flags_override_config_file(workspace, tmp_path):
    model_path = str(tmp_path / "override_models.json")
    config_path = tmp_path / "train.conf"
    config_path.write_text(f"corpus = {workspace['corpus']}\nout = {model_path}\nlinear_bits = 3\nno_nonlinear = yes\n")

    assert main(["--config", str(config_path), "train", "--linear-bits", "1"]) == 0
    assert load_models(model_path).models[0].linear_cb.size == 2


##########
# evaluate
##########

def test_evaluate_writes_report(workspace, capsys):
    report_path = str(workspace["root"] / "report.json")
    decisions_path = str(workspace["root"] / "decisions.tsv")

    assert main(["evaluate", "--models", workspace["models"], "--corpus", workspace["corpus"],
                 "--alpha", "0.5", "--k", "2", "--report", report_path, "--decisions", decisions_path]) == 0
    assert "error rate:" in capsys.readouterr().out

    with open(report_path, "r", encoding="utf-8") as f:
        report = json.load(f)
    assert report["total_decisions"] == 3
    assert report["config"]["alpha"] == 0.5
    assert report["config"]["seed"] == 0
    assert len(read_data_file(decisions_path)) == 3


def test_evaluate_missing_model_file(workspace, capsys):
    missing = str(workspace["root"] / "missing.json")

    assert main(["evaluate", "--models", missing, "--corpus", workspace["corpus"]]) == 1
    assert f"error 1001: Unable to read file: '{missing}'" in capsys.readouterr().err


########
# sweeps
########

def test_sweep_alpha_stores_best_alpha(workspace, tmp_path):
    model_path = str(tmp_path / "models.json")
    with open(workspace["models"], "r", encoding="utf-8") as source, open(model_path, "w", encoding="utf-8") as target:
        target.write(source.read())
    out_path = str(tmp_path / "alpha.tsv")

    assert main(["sweep-alpha", "--models", model_path, "--corpus", workspace["corpus"],
                 "--alphas", "0,1,10", "--out", out_path]) == 0

    table = read_data_file(out_path)
    assert table["alpha"].tolist() == [0.0, 1.0, 10.0]
    assert load_models(model_path).alpha in (0.0, 1.0, 10.0)


def test_sweep_k(workspace, tmp_path):
    out_path = str(tmp_path / "k.tsv")

    assert main(["sweep-k", "--models", workspace["models"], "--corpus", workspace["corpus"],
                 "--alpha", "1", "--out", out_path]) == 0
    assert read_data_file(out_path)["k"].tolist() == [1, 2, 3]


##########
# identify
##########

def test_identify_wav(workspace, capsys):
    wav_path = os.path.join(workspace["corpus"], "spk02", "test", "test_000.wav")

    assert main(["identify", "--models", workspace["models"], "--wav", wav_path, "--k", "3"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("decided speaker: spk0")
    assert "per frame" in out
