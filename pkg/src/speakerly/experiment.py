import time
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace, asdict
from typing import Optional

import numpy as np
import pandas as pd

from . import constants
from .corpus import Corpus
from .dsp_frontend import ResidualMeasure, extract_features, merge_feature_sets, stack_raw_samples
from .linear_codebook import SplitMethod, DistanceMeasure, train_codebook
from .mlp_predictor import TrainConfig
from .nonlinear_codebook import train_nonlinear_codebook
from .recognizer import SpeakerModel, ResidueSource, DecisionCriterion, \
                        score_lpcc, score_residual, score_linear_residual, \
                        decide, residue_required, check_residue_available, \
                        cost_model_for, cost_mlp, cost_lpc_residue
from .exceptions.custom_exceptions import SpeakerlyException, RecognitionException, InputOutputException
from .exceptions.error_messages import TrainingErrorMessage, RecognitionErrorMessage, RecognitionErrorCode, \
                                       IOErrorMessage, IOErrorCode
from .utils.data_validation_utils import DataValidationUtils
from .utils.output_validation_utils import validate_eval_report
from .utils.input_output_utils import write_data_file

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainingConfig:
    """Hyperparameters of the training pipeline; `seed` drives every random choice."""
    linear_bits: int = constants.DEFAULT_LINEAR_BITS
    nonlinear_bits: int = constants.DEFAULT_NONLINEAR_BITS
    lloyd_iters: int = constants.DEFAULT_LLOYD_ITERS
    train_nonlinear: bool = True
    split_method: SplitMethod = SplitMethod.STDDEV
    distance: DistanceMeasure = DistanceMeasure.MAE
    epochs_per_start: int = constants.DEFAULT_EPOCHS_PER_START
    num_random_starts: int = constants.DEFAULT_NUM_RANDOM_STARTS
    lm_lambda_init: float = constants.DEFAULT_LM_LAMBDA_INIT
    lm_lambda_factor: float = constants.DEFAULT_LM_LAMBDA_FACTOR
    seed: int = constants.DEFAULT_SEED
    n_jobs: int = 1

    def __post_init__(self):
        DataValidationUtils.validate_train_codebook_parameters(self.linear_bits)
        DataValidationUtils.validate_train_codebook_parameters(self.nonlinear_bits)
        DataValidationUtils.check_non_negative_int(self.lloyd_iters, "lloyd_iters")
        DataValidationUtils.check_bool(self.train_nonlinear, "train_nonlinear")
        DataValidationUtils.check_strictly_positive_int(self.n_jobs, "n_jobs")
        DataValidationUtils.check_choice(self.split_method, [method.value for method in SplitMethod], "split_method")
        DataValidationUtils.check_choice(self.distance, [measure.value for measure in DistanceMeasure], "distance")
        object.__setattr__(self, "split_method", SplitMethod(self.split_method))
        object.__setattr__(self, "distance", DistanceMeasure(self.distance))
        self.mlp_config(self.seed)

    def mlp_config(self, seed: int) -> TrainConfig:
        return TrainConfig(epochs_per_start=self.epochs_per_start,
                           num_random_starts=self.num_random_starts,
                           lm_lambda_init=self.lm_lambda_init,
                           lm_lambda_factor=self.lm_lambda_factor,
                           seed=seed)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["split_method"] = self.split_method.value
        data["distance"] = self.distance.value
        data.pop("n_jobs")
        return data

    @classmethod
    def from_dict(cls, data: dict):
        """Build a config from a dictionary; string values (key-value files) are converted by field type."""

        converters = {
            "linear_bits": int, "nonlinear_bits": int, "lloyd_iters": int, "train_nonlinear": _parse_bool,
            "split_method": str, "distance": str, "epochs_per_start": int, "num_random_starts": int,
            "lm_lambda_init": float, "lm_lambda_factor": float, "seed": int, "n_jobs": int
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


def _parse_bool(text):
    return str(text).strip().lower() in ("1", "true", "yes", "on")


@dataclass(eq=False)
class ScoreTable:
    """Scores of every test utterance against every model, shared by evaluations and sweeps."""
    utterance_ids: list
    true_speakers: list
    speaker_ids: list
    lpcc: np.ndarray
    residual: Optional[np.ndarray]
    frames: np.ndarray
    skipped_utterances: list = field(default_factory=list)

    def lpcc_scores(self, row):
        return dict(zip(self.speaker_ids, self.lpcc[row].tolist()))

    def residual_scores(self, row):
        if self.residual is None:
            return {}
        return dict(zip(self.speaker_ids, self.residual[row].tolist()))


@dataclass
class EvalReport:
    error_rate: float
    total_decisions: int
    wrong_decisions: int
    confusion: dict
    decisions: list
    config: dict
    skipped_utterances: list = field(default_factory=list)
    total_execution_time: float = 0.0
    elapsed_time_record: list = field(default_factory=list)

    def to_dict(self) -> dict:
        report = {key: getattr(self, key) for key in constants.EVAL_REPORT_KEYS}
        report["elapsed_time_record"] = list(self.elapsed_time_record)
        validate_eval_report(report)
        return report

    def decisions_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.decisions, columns=constants.DECISION_LOG_COLUMNS)

    def confusion_frame(self) -> pd.DataFrame:
        df = self.decisions_frame()
        return pd.crosstab(df["true_speaker"], df["decided_speaker"])


def _with_speaker_context(speaker_id, error):
    message = TrainingErrorMessage.SPEAKER_CONTEXT.format(speaker_id, error.to_dict()["error_message"])
    return type(error)(message, error.to_dict()["status_code"])


def _train_speaker(speaker, index, config: TrainingConfig) -> SpeakerModel:
    start_time = time.time()
    logger.info("Training speaker %s", speaker.speaker_id)
    seed = int(np.random.SeedSequence([config.seed, index]).generate_state(1)[0])

    try:
        features = merge_feature_sets(extract_features(utterance) for utterance in speaker.train_utterances)
        linear_cb = train_codebook(features.lpcc, config.linear_bits, config.split_method, config.distance)

        nonlinear_cb = None
        if config.train_nonlinear:
            if config.nonlinear_bits == config.linear_bits:
                init_cb = linear_cb
            else:
                init_cb = train_codebook(features.lpcc, config.nonlinear_bits, config.split_method, config.distance)
            nonlinear_cb = train_nonlinear_codebook(features.frames, features.lpcc, init_cb,
                                                    config.nonlinear_bits, config.lloyd_iters,
                                                    config.mlp_config(seed))
    except SpeakerlyException as e:
        raise _with_speaker_context(speaker.speaker_id, e) from e

    logger.info("Trained speaker %s on %d frames (%.1f s of audio) in %.2f s", speaker.speaker_id, len(features),
                sum(utterance.duration_seconds for utterance in speaker.train_utterances), time.time() - start_time)
    return SpeakerModel(speaker_id=speaker.speaker_id, linear_cb=linear_cb, nonlinear_cb=nonlinear_cb)


def _run(function, argument_lists, n_jobs):
    if n_jobs <= 1:
        return [function(*arguments) for arguments in zip(*argument_lists)]
    with ProcessPoolExecutor(max_workers=n_jobs) as executor:
        return list(executor.map(function, *argument_lists))


def train_models(corpus: Corpus, config: TrainingConfig = TrainingConfig()) -> list:
    """
    Train one SpeakerModel per corpus speaker, in corpus order.

    Each speaker's training frames come from all its training utterances. The linear codebook has
    2^linear_bits centroids; the nonlinear codebook is initialized from a linear codebook of
    2^nonlinear_bits centroids (the same codebook when the sizes match). Per-speaker seeds derive
    from (config.seed, speaker index), so results do not depend on `config.n_jobs`.

    Raises:
        All exceptions raised while training a speaker, with the message prefixed by "speaker '<id>': ".
    """

    speakers = corpus.speakers
    return _run(_train_speaker, [speakers, range(len(speakers)), [config] * len(speakers)], config.n_jobs)


def _score_utterance(utterance_id, signal, models, measure, residue_source):
    features = extract_features(signal)
    if len(features) == 0:
        logger.warning("Skipping test utterance %s: %s", utterance_id, RecognitionErrorMessage.EMPTY_SENTENCE)
        return None

    lpcc_row = [score_lpcc(features.lpcc, model) for model in models]

    residual_row = None
    if residue_source is ResidueSource.LPC:
        raw_matrix = stack_raw_samples(features.frames)
        residual_row = [score_linear_residual(raw_matrix, features.lpcc, model, measure) for model in models]
    elif all(model.nonlinear_cb is not None for model in models):
        raw_matrix = stack_raw_samples(features.frames)
        residual_row = [score_residual(raw_matrix, model.nonlinear_cb, measure) for model in models]

    return len(features), lpcc_row, residual_row


def score_corpus(models, corpus: Corpus, measure=ResidualMeasure.MAE,
                 residue_source=ResidueSource.MLP, n_jobs: int = 1) -> ScoreTable:
    """
    Score every test utterance of `corpus` against every model once.

    Residual scores are filled for the LPC source, or for the MLP source when every model has a
    nonlinear codebook; otherwise `residual` is None. Utterances without a scorable frame are
    left out and listed in `skipped_utterances`.

    Raises:
        RecognitionException (NO_SCORABLE_UTTERANCES_CODE: 8006): If no test utterance can be scored.
    """

    measure = ResidualMeasure(measure)
    residue_source = ResidueSource(residue_source)

    utterance_ids, true_speakers, signals = [], [], []
    for speaker in corpus.speakers:
        for name, signal in zip(speaker.test_names, speaker.test_utterances):
            utterance_ids.append(f"{speaker.speaker_id}/{name}")
            true_speakers.append(speaker.speaker_id)
            signals.append(signal)

    count = len(signals)
    rows = _run(_score_utterance, [utterance_ids, signals, [models] * count, [measure] * count, [residue_source] * count], n_jobs)

    skipped = [utterance_id for utterance_id, row in zip(utterance_ids, rows) if row is None]
    kept = [index for index, row in enumerate(rows) if row is not None]
    if len(kept) == 0:
        raise RecognitionException(RecognitionErrorMessage.NO_SCORABLE_UTTERANCES.format(count),
                                   RecognitionErrorCode.NO_SCORABLE_UTTERANCES_CODE)
    if skipped:
        logger.warning("%d of %d test utterances left out of scoring", len(skipped), count)

    rows = [rows[index] for index in kept]
    residual_rows = [row[2] for row in rows]
    return ScoreTable(utterance_ids=[utterance_ids[index] for index in kept],
                      true_speakers=[true_speakers[index] for index in kept],
                      speaker_ids=[model.speaker_id for model in models],
                      lpcc=np.array([row[1] for row in rows]).reshape(len(rows), len(models)),
                      residual=None if any(row is None for row in residual_rows) else np.array(residual_rows).reshape(len(rows), len(models)),
                      frames=np.array([row[0] for row in rows], dtype=int),
                      skipped_utterances=skipped)


class SpeakerIdentification():
    def __init__(self,
                 models: list,
                 corpus: Corpus,
                 measure=ResidualMeasure.MAE,
                 residue_source=ResidueSource.MLP,
                 n_jobs: int = 1) -> None:
        """
        Scores the test utterances of `corpus` against `models` once, so that evaluations at many
        (alpha, K) settings only re-take decisions.
        Creates the following attributes:
            :models (list): Speaker models.
            :measure (ResidualMeasure): Residual magnitude.
            :residue_source (ResidueSource): Where the residual comes from.
            :scores (ScoreTable): Cached per-utterance scores.
            :elapsed_time_record (list): Record of time spent in each step.

        Raises:
            RecognitionException (NO_MODELS_CODE: 8004): If `models` is empty.
            RecognitionException (UNKNOWN_SPEAKER_CODE: 8005): If a corpus speaker has no model.
        """

        start_time = time.time()
        if len(models) == 0:
            raise RecognitionException(RecognitionErrorMessage.NO_MODELS,
                                       RecognitionErrorCode.NO_MODELS_CODE)

        model_ids = {model.speaker_id for model in models}
        for speaker_id in corpus.speaker_ids:
            if speaker_id not in model_ids:
                raise RecognitionException(RecognitionErrorMessage.UNKNOWN_SPEAKER.format(speaker_id),
                                           RecognitionErrorCode.UNKNOWN_SPEAKER_CODE)

        self.models = list(models)
        self.measure = ResidualMeasure(measure)
        self.residue_source = ResidueSource(residue_source)
        self.elapsed_time_record = []
        self.scores = score_corpus(self.models, corpus, self.measure, self.residue_source, n_jobs)
        self._add_runtime_info(function_name="score_corpus",
                               time_taken=(time.time() - start_time))

    def _add_runtime_info(self,
                          function_name,
                          time_taken) -> None:
        self.elapsed_time_record.append({"function_name": function_name,
                                         "time_taken": time_taken})

    def _check_decision_parameters(self, alpha, k, criterion):
        DataValidationUtils.validate_identify_parameters(alpha, k)
        if not 1 <= k <= len(self.models):
            raise RecognitionException(RecognitionErrorMessage.INVALID_K.format(len(self.models), k),
                                       RecognitionErrorCode.INVALID_K_CODE)
        if residue_required(alpha, criterion):
            check_residue_available(self.models, self.residue_source)

    def decisions(self, alpha, k, criterion=DecisionCriterion.FUSION) -> list:
        """Decided speaker of every test utterance, taken by `decide` on the cached scores."""

        self._check_decision_parameters(alpha, k, criterion)
        return [decide(self.scores.lpcc_scores(row), self.scores.residual_scores(row), alpha, k, criterion)[0]
                for row in range(len(self.scores.utterance_ids))]

    def evaluate(self,
                 alpha=constants.DEFAULT_ALPHA,
                 k=constants.DEFAULT_K,
                 criterion=DecisionCriterion.FUSION,
                 extra_config: dict = None) -> EvalReport:
        """
        Closed-set identification error of the test utterances.

        Returns:
            EvalReport: error rate (wrong / total), confusion counts, per-decision log and config echo.
        """

        start_time = time.time()
        criterion = DecisionCriterion(criterion)
        decided = self.decisions(alpha, k, criterion)

        rows, confusion = [], {}
        for utterance_id, true_speaker, decided_speaker in zip(self.scores.utterance_ids, self.scores.true_speakers, decided):
            rows.append({"utterance_id": utterance_id,
                         "true_speaker": true_speaker,
                         "decided_speaker": decided_speaker,
                         "correct": true_speaker == decided_speaker})
            confusion.setdefault(true_speaker, {})
            confusion[true_speaker][decided_speaker] = confusion[true_speaker].get(decided_speaker, 0) + 1

        wrong = sum(not row["correct"] for row in rows)
        first = self.models[0]
        config = {"alpha": float(alpha),
                  "k": int(k),
                  "measure": self.measure.value,
                  "residue_source": self.residue_source.value,
                  "criterion": criterion.value,
                  "linear_bits": int(first.linear_cb.size_bits),
                  "nonlinear_bits": None if first.nonlinear_cb is None else int(first.nonlinear_cb.size_bits),
                  "lloyd_iters": None if first.nonlinear_cb is None else int(first.nonlinear_cb.lloyd_iterations_done)}
        config.update(extra_config or {})

        self._add_runtime_info(function_name="evaluate", time_taken=(time.time() - start_time))
        return EvalReport(error_rate=wrong / len(rows),
                          total_decisions=len(rows),
                          wrong_decisions=wrong,
                          confusion=confusion,
                          decisions=rows,
                          config=config,
                          skipped_utterances=list(self.scores.skipped_utterances),
                          total_execution_time=sum(record["time_taken"] for record in self.elapsed_time_record),
                          elapsed_time_record=list(self.elapsed_time_record))

    def _error_rate(self, alpha, k, criterion):
        decided = self.decisions(alpha, k, criterion)
        return sum(d != t for d, t in zip(decided, self.scores.true_speakers)) / len(decided)

    def sweep_alpha(self, alphas, k=constants.DEFAULT_K, criterion=DecisionCriterion.FUSION) -> pd.DataFrame:
        """Error rate for every alpha in `alphas`, as a DataFrame with columns alpha and error_rate."""

        start_time = time.time()
        DataValidationUtils.check_empty_list(list(alphas), "alphas")
        table = pd.DataFrame({"alpha": [float(alpha) for alpha in alphas],
                              "error_rate": [self._error_rate(alpha, k, criterion) for alpha in alphas]})
        logger.info("Alpha sweep over %d values: best alpha %.6g with error %.4f",
                    len(table), best_alpha(table), table["error_rate"].min())
        self._add_runtime_info(function_name="sweep_alpha", time_taken=(time.time() - start_time))
        return table

    def sweep_k(self, alpha, ks=None, criterion=DecisionCriterion.FUSION) -> pd.DataFrame:
        """
        Error rate and per-frame instruction count for every K in `ks` (default 1..N).
        The instruction count is the cost model evaluated for the model sizes at that K.
        """

        start_time = time.time()
        ks = list(range(1, len(self.models) + 1)) if ks is None else [int(k) for k in ks]
        DataValidationUtils.check_empty_list(ks, "ks")

        cost = cost_lpc_residue if self.residue_source is ResidueSource.LPC else cost_mlp
        table = pd.DataFrame({"k": ks,
                              "error_rate": [self._error_rate(alpha, k, criterion) for k in ks],
                              "instruction_count": [cost(cost_model_for(self.models, k)) for k in ks]})
        self._add_runtime_info(function_name="sweep_k", time_taken=(time.time() - start_time))
        return table


def best_alpha(table: pd.DataFrame) -> float:
    """Smallest alpha reaching the lowest error rate of an alpha sweep."""

    lowest = table["error_rate"].min()
    return float(table.loc[table["error_rate"] == lowest, "alpha"].min())


def evaluate(models, corpus: Corpus, alpha=constants.DEFAULT_ALPHA, k=constants.DEFAULT_K,
             measure=ResidualMeasure.MAE, residue_source=ResidueSource.MLP,
             criterion=DecisionCriterion.FUSION, n_jobs: int = 1) -> EvalReport:
    return SpeakerIdentification(models, corpus, measure, residue_source, n_jobs).evaluate(alpha, k, criterion)


def sweep_alpha(models, corpus: Corpus, alphas, k=constants.DEFAULT_K, measure=ResidualMeasure.MAE,
                residue_source=ResidueSource.MLP, criterion=DecisionCriterion.FUSION,
                out_path: str = None, n_jobs: int = 1) -> pd.DataFrame:
    """Alpha sweep; writes the (alpha, error_rate) table to `out_path` when given."""

    table = SpeakerIdentification(models, corpus, measure, residue_source, n_jobs).sweep_alpha(alphas, k, criterion)
    if out_path is not None:
        write_data_file(table, out_path)
    return table


def sweep_k(models, corpus: Corpus, alpha, ks=None, measure=ResidualMeasure.MAE,
            residue_source=ResidueSource.MLP, criterion=DecisionCriterion.FUSION,
            out_path: str = None, n_jobs: int = 1) -> pd.DataFrame:
    """K sweep; writes the (k, error_rate, instruction_count) table to `out_path` when given."""

    table = SpeakerIdentification(models, corpus, measure, residue_source, n_jobs).sweep_k(alpha, ks, criterion)
    if out_path is not None:
        write_data_file(table, out_path)
    return table


def evaluate_grid(corpus: Corpus, linear_bits_values, nonlinear_bits_values, lloyd_iters_values,
                  config: TrainingConfig = TrainingConfig(), alpha=None, alphas=None,
                  k=constants.DEFAULT_K, measure=ResidualMeasure.MAE, out_path: str = None) -> pd.DataFrame:
    """
    Train and evaluate every (linear_bits, nonlinear_bits, lloyd_iters) cell.

    Each row holds the LPCC-only error and the fused error of the cell. With `alphas` the fused error
    is taken at the best alpha of a sweep over them; otherwise at `alpha` (default 0).
    """

    rows = []
    for linear_bits in linear_bits_values:
        for nonlinear_bits in nonlinear_bits_values:
            for lloyd_iters in lloyd_iters_values:
                cell_config = replace(config, linear_bits=int(linear_bits), nonlinear_bits=int(nonlinear_bits),
                                      lloyd_iters=int(lloyd_iters), train_nonlinear=True)
                models = train_models(corpus, cell_config)
                session = SpeakerIdentification(models, corpus, measure, ResidueSource.MLP, config.n_jobs)
                k_cell = min(k, len(models))

                chosen = constants.DEFAULT_ALPHA if alpha is None else float(alpha)
                if alphas is not None:
                    chosen = best_alpha(session.sweep_alpha(alphas, k_cell))

                rows.append({"linear_bits": int(linear_bits),
                             "nonlinear_bits": int(nonlinear_bits),
                             "lloyd_iters": int(lloyd_iters),
                             "alpha": chosen,
                             "lpcc_error_rate": session.evaluate(0.0, 1).error_rate,
                             "error_rate": session.evaluate(chosen, k_cell).error_rate})
                logger.info("Grid cell %s", rows[-1])

    table = pd.DataFrame(rows)
    if out_path is not None:
        write_data_file(table, out_path)
    return table
