import logging
import pytest

from src.speakerly.corpus import SyntheticSpec, synth_corpus
from src.speakerly.dsp_frontend import extract_features
from src.speakerly.experiment import TrainingConfig, SpeakerIdentification, train_models, best_alpha
from src.speakerly.recognizer import identify
from src.speakerly.utils.input_output_utils import save_models, load_models
from src.speakerly.utils.utils import parse_alpha_grid

logger = logging.getLogger(__name__)

# 10 speakers (5 AR, 5 AR + tanh waveshaping), 5 train and 5 test utterances each
END_TO_END_CONFIG = TrainingConfig(linear_bits=5, nonlinear_bits=4, lloyd_iters=1, seed=0)
TIMING_KEYS = ("total_execution_time", "elapsed_time_record")


@pytest.fixture(scope="module")
def corpus():
    return synth_corpus(SyntheticSpec(seed=0))


@pytest.fixture(scope="module")
def models(corpus):
    return train_models(corpus, END_TO_END_CONFIG)


@pytest.fixture(scope="module")
def session(models, corpus):
    return SpeakerIdentification(models, corpus)


@pytest.fixture(scope="module")
def swept_alpha(session):
    alphas = [0.0] + parse_alpha_grid("log:1e-3:10:30")
    return best_alpha(session.sweep_alpha(alphas, k=2))


def _without_timing(report):
    return {key: value for key, value in report.to_dict().items() if key not in TIMING_KEYS}


def _sentences(corpus):
    for speaker in corpus.speakers:
        for signal in speaker.test_utterances:
            yield extract_features(signal)


##########
# accuracy
##########

def test_synthetic_corpus_layout(corpus):
    assert len(corpus) == 10
    assert sum(speaker.generator["nonlinear"] for speaker in corpus.speakers) == 5
    assert all(len(speaker.train_utterances) == 5 and len(speaker.test_utterances) == 5 for speaker in corpus.speakers)


def test_lpcc_only_accuracy(session):
    report = session.evaluate(alpha=0.0, k=1)

    assert report.total_decisions == 50
    assert 1.0 - report.error_rate >= 0.9


def test_fused_accuracy_at_swept_alpha(session, swept_alpha):
    lpcc_error = session.evaluate(alpha=0.0, k=1).error_rate
    fused_error = session.evaluate(alpha=swept_alpha, k=2).error_rate

    assert fused_error <= lpcc_error


def test_k_insensitivity_is_reported(session, swept_alpha):
    """K=2 and K=N agreement is reported, not asserted."""

    k2 = session.decisions(swept_alpha, 2)
    k10 = session.decisions(swept_alpha, 10)
    agreement = sum(a == b for a, b in zip(k2, k10)) / len(k2)
    logger.info("K=2 / K=10 decision agreement at alpha %.6g: %.3f", swept_alpha, agreement)

    assert len(k2) == len(k10) == 50


#############
# determinism
#############

def test_same_seed_gives_identical_report(corpus, session, swept_alpha):
    again = SpeakerIdentification(train_models(corpus, END_TO_END_CONFIG), corpus)
    assert _without_timing(again.evaluate(alpha=swept_alpha, k=2)) == _without_timing(session.evaluate(alpha=swept_alpha, k=2))


#############################
# model file and identify
#############################

def test_identify_decisions_survive_model_file(corpus, models, swept_alpha, tmp_path):
    file_path = str(tmp_path / "models.json")
    save_models(models, file_path, training_config=END_TO_END_CONFIG.to_dict(), alpha=swept_alpha)
    model_file = load_models(file_path)

    assert model_file.alpha == swept_alpha
    for features in _sentences(corpus):
        before = identify(features.frames, features.lpcc, models, alpha=swept_alpha, k=2)
        after = identify(features.frames, features.lpcc, model_file.models, alpha=model_file.alpha, k=2)
        assert after.decided_speaker == before.decided_speaker
        assert after.combined_scores == before.combined_scores
