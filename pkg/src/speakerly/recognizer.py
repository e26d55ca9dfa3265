import enum
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from . import constants
from .dsp_frontend import ResidualMeasure, cepstrum_to_lpc, lpc_residuals, stack_raw_samples
from .linear_codebook import LinearCodebook, nearest_centroids
from .nonlinear_codebook import NonlinearCodebook, residual_matrix
from .exceptions.custom_exceptions import RecognitionException, ValidationException
from .exceptions.error_messages import RecognitionErrorMessage, RecognitionErrorCode, TrainingErrorMessage, ValidationErrorCode
from .utils.data_validation_utils import DataValidationUtils

logger = logging.getLogger(__name__)


class ResidueSource(str, enum.Enum):
    MLP = "mlp"
    LPC = "lpc"


class DecisionCriterion(str, enum.Enum):
    FUSION = "fusion"
    RESIDUAL = "residual"


@dataclass(frozen=True, eq=False)
class SpeakerModel:
    speaker_id: str
    linear_cb: LinearCodebook
    nonlinear_cb: Optional[NonlinearCodebook] = None

    def __post_init__(self):
        DataValidationUtils.check_string(self.speaker_id, "speaker_id")

    @cached_property
    def lpc_predictors(self) -> np.ndarray:
        """Order-10 linear predictors obtained from the LPCC centroids, one row per centroid."""
        return np.array([cepstrum_to_lpc(centroid, constants.LPC_ORDER) for centroid in self.linear_cb.centroids])


@dataclass(frozen=True)
class CostModel:
    t_cl: int = constants.DEFAULT_COST_MODEL["t_cl"]
    t_cnl: int = constants.DEFAULT_COST_MODEL["t_cnl"]
    k: int = constants.DEFAULT_COST_MODEL["k"]
    l_t: int = constants.DEFAULT_COST_MODEL["l_t"]
    n_i: int = constants.DEFAULT_COST_MODEL["n_i"]
    n_h1: int = constants.DEFAULT_COST_MODEL["n_h1"]
    n_h2: int = constants.DEFAULT_COST_MODEL["n_h2"]
    c_tg: int = constants.DEFAULT_COST_MODEL["c_tg"]
    p: int = constants.DEFAULT_COST_MODEL["p"]
    n: int = constants.DEFAULT_COST_MODEL["n"]

    def __post_init__(self):
        for name, value in self.__dict__.items():
            DataValidationUtils.check_non_negative_int(value, name)


@dataclass
class RecognitionResult:
    decided_speaker: str
    lpcc_scores: dict
    residual_scores: dict
    combined_scores: dict
    preselected: list
    alpha: float
    k: int
    instruction_count: int = 0
    frames_scored: int = 0
    residue_source: ResidueSource = ResidueSource.MLP
    criterion: DecisionCriterion = DecisionCriterion.FUSION
    instructions_per_frame: int = field(init=False)

    def __post_init__(self):
        self.instructions_per_frame = self.instruction_count // self.frames_scored if self.frames_scored else 0


def predictor_instruction_count(cm: CostModel) -> int:
    """Accounting units to run one predictor over one frame: (l_t - n_i) evaluations of the network."""
    per_sample = (cm.n_i * cm.n_h1 + cm.n_h1 + cm.n_h1 * cm.n_h2 + 2 * cm.n_h2 + 1
                  + cm.c_tg * (cm.n_h1 + cm.n_h2))
    return (cm.l_t - cm.n_i) * per_sample


def lpc_predictor_instruction_count(cm: CostModel) -> int:
    return (cm.l_t - cm.n_i) * cm.n_i


def cost_lpcc(cm: CostModel) -> int:
    return cm.t_cl * cm.p * cm.n


def cost_mlp(cm: CostModel) -> int:
    return cost_lpcc(cm) + cm.k * cm.t_cnl * predictor_instruction_count(cm)


def cost_lpc_residue(cm: CostModel) -> int:
    """Per-frame cost when the residue comes from one linear predictor per preselected speaker."""
    return cost_lpcc(cm) + cm.k * lpc_predictor_instruction_count(cm)


def cost_model_for(models, k, c_tg=constants.DEFAULT_C_TG) -> CostModel:
    first = models[0]
    return CostModel(t_cl=first.linear_cb.size,
                     t_cnl=first.nonlinear_cb.size if first.nonlinear_cb is not None else 0,
                     k=k,
                     c_tg=c_tg,
                     p=first.linear_cb.centroids.shape[1],
                     n=len(models))


def _check_sentence(sentence_lpcc):
    sentence_lpcc = np.atleast_2d(np.asarray(sentence_lpcc, dtype=np.float64))
    if sentence_lpcc.size == 0:
        raise RecognitionException(RecognitionErrorMessage.EMPTY_SENTENCE,
                                   RecognitionErrorCode.EMPTY_SENTENCE_CODE)
    return sentence_lpcc


def score_lpcc(sentence_lpcc, model: SpeakerModel) -> float:
    """Accumulated (summed) minimal quantization distortion of the sentence in the speaker's linear codebook."""

    sentence_lpcc = _check_sentence(sentence_lpcc)
    _, distortions = nearest_centroids(sentence_lpcc, model.linear_cb.centroids, model.linear_cb.distance)
    return float(np.sum(distortions))


def score_residual(frames, ncb: NonlinearCodebook, measure=ResidualMeasure.MAE) -> float:
    """Sum over frames of the lowest residual among the predictors of `ncb`."""

    residuals = residual_matrix(frames, ncb, measure)
    if len(residuals) == 0:
        return 0.0
    return float(np.sum(np.min(residuals, axis=1)))


def score_linear_residual(frames, sentence_lpcc, model: SpeakerModel, measure=ResidualMeasure.MAE) -> float:
    """
    Sum over frames of the residual of the linear predictor belonging to the speaker centroid
    nearest to each frame's LPCC vector.
    """

    sentence_lpcc = _check_sentence(sentence_lpcc)
    indices, _ = nearest_centroids(sentence_lpcc, model.linear_cb.centroids, model.linear_cb.distance)
    raw_matrix = frames if isinstance(frames, np.ndarray) else stack_raw_samples(frames)
    return float(np.sum(lpc_residuals(model.lpc_predictors[indices], raw_matrix, measure)))


def combine(lpcc_err: float, residue_err: float, alpha: float) -> float:
    DataValidationUtils.check_non_negative_int_or_float(alpha, "alpha")
    return lpcc_err + alpha * residue_err


def residue_required(alpha, criterion) -> bool:
    return (DecisionCriterion(criterion) is DecisionCriterion.RESIDUAL) or (alpha > 0)


def check_residue_available(models, residue_source):
    if ResidueSource(residue_source) is ResidueSource.LPC:
        return
    for model in models:
        if model.nonlinear_cb is None:
            raise RecognitionException(RecognitionErrorMessage.MISSING_NONLINEAR_CODEBOOK.format(model.speaker_id),
                                       RecognitionErrorCode.MISSING_NONLINEAR_CODEBOOK_CODE)


def preselect(lpcc_scores: dict, k: int) -> list:
    """The k speakers with the lowest LPCC scores; ties go to the lexicographically smaller id."""
    return sorted(lpcc_scores, key=lambda speaker: (lpcc_scores[speaker], speaker))[:k]


def decide(lpcc_scores: dict, residual_scores: dict, alpha: float, k: int,
           criterion=DecisionCriterion.FUSION):
    """
    Preselect k speakers by LPCC score and pick the one with the lowest combined score.

    With the residual criterion the residual score alone is used among the preselected speakers.
    Ties are broken by the lower LPCC score, then the lexicographically smaller id. A speaker
    missing from `residual_scores` is scored by its LPCC score alone.

    Returns:
        tuple: (decided speaker, preselected ids, combined scores of the preselected speakers).
    """

    criterion = DecisionCriterion(criterion)
    candidates = preselect(lpcc_scores, k)

    combined = {}
    for speaker in candidates:
        if speaker not in residual_scores:
            combined[speaker] = lpcc_scores[speaker]
        elif criterion is DecisionCriterion.RESIDUAL:
            combined[speaker] = residual_scores[speaker]
        else:
            combined[speaker] = combine(lpcc_scores[speaker], residual_scores[speaker], alpha)

    decided = min(candidates, key=lambda speaker: (combined[speaker], lpcc_scores[speaker], speaker))
    return decided, candidates, combined


def identify(frames, sentence_lpcc, models, alpha: float = constants.DEFAULT_ALPHA,
             k: int = constants.DEFAULT_K, measure=ResidualMeasure.MAE,
             residue_source=ResidueSource.MLP, criterion=DecisionCriterion.FUSION,
             c_tg: int = constants.DEFAULT_C_TG) -> RecognitionResult:
    """
    Identify the speaker of one sentence with K-preselection.

    Every model is scored on the LPCC vectors; the k best are then scored on the residual and the
    decision is taken on `lpcc + alpha * residual` among them. Residuals are computed only when
    needed (alpha > 0 or the residual criterion) or available for all preselected speakers.

    The instruction counter adds T_cl * p per frame and speaker for the LPCC comparison, and the
    per-frame predictor cost for each predictor of a preselected speaker, so for codebooks of
    equal sizes `instructions_per_frame == cost_mlp(cost_model_for(models, k))`.

    Args:
        frames (list): Frames of the sentence (raw samples are used for residuals).
        sentence_lpcc (numpy.ndarray): (len(frames), 12) LPCC rows of the same frames.
        models (list): SpeakerModel objects, N >= 1.
        alpha (int, float): Residual weight, alpha >= 0.
        k (int): Number of preselected speakers, 1 <= k <= N.
        measure (ResidualMeasure, str): "mae" or "mse".
        residue_source (ResidueSource, str): "mlp" or "lpc".
        criterion (DecisionCriterion, str): "fusion" or "residual".

    Raises:
        RecognitionException (NO_MODELS_CODE: 8004): If `models` is empty.
        RecognitionException (INVALID_K_CODE: 8002): If `k` is outside [1, N].
        RecognitionException (EMPTY_SENTENCE_CODE: 8003): If the sentence has no frames.
        ValidationException (SHAPE_EXCEPTION_CODE: 4004): If `frames` and `sentence_lpcc` differ in length.
        RecognitionException (MISSING_NONLINEAR_CODEBOOK_CODE: 8001): If residuals are required but a model has no nonlinear codebook.
    """

    DataValidationUtils.validate_identify_parameters(alpha, k)
    measure = ResidualMeasure(measure)
    residue_source = ResidueSource(residue_source)
    criterion = DecisionCriterion(criterion)

    if len(models) == 0:
        raise RecognitionException(RecognitionErrorMessage.NO_MODELS,
                                   RecognitionErrorCode.NO_MODELS_CODE)
    if not 1 <= k <= len(models):
        raise RecognitionException(RecognitionErrorMessage.INVALID_K.format(len(models), k),
                                   RecognitionErrorCode.INVALID_K_CODE)

    sentence_lpcc = _check_sentence(sentence_lpcc)
    if len(frames) != len(sentence_lpcc):
        raise ValidationException(TrainingErrorMessage.FRAME_COUNT_MISMATCH.format(len(frames), len(sentence_lpcc)),
                                  ValidationErrorCode.SHAPE_EXCEPTION_CODE)
    if residue_required(alpha, criterion):
        check_residue_available(models, residue_source)

    n_frames = len(sentence_lpcc)
    by_id = {model.speaker_id: model for model in models}
    cm = cost_model_for(models, k, c_tg)
    instruction_count = 0

    lpcc_scores = {}
    for model in models:
        lpcc_scores[model.speaker_id] = score_lpcc(sentence_lpcc, model)
        instruction_count += n_frames * model.linear_cb.size * sentence_lpcc.shape[1]

    candidates = preselect(lpcc_scores, k)
    residual_scores = {}
    has_residue = (residue_source is ResidueSource.LPC) or all(by_id[speaker].nonlinear_cb is not None
                                                               for speaker in candidates)
    if has_residue:
        raw_matrix = stack_raw_samples(frames)
        for speaker in candidates:
            model = by_id[speaker]
            if residue_source is ResidueSource.LPC:
                residual_scores[speaker] = score_linear_residual(raw_matrix, sentence_lpcc, model, measure)
                instruction_count += n_frames * lpc_predictor_instruction_count(cm)
            else:
                residual_scores[speaker] = score_residual(raw_matrix, model.nonlinear_cb, measure)
                instruction_count += n_frames * model.nonlinear_cb.size * predictor_instruction_count(cm)

    decided, candidates, combined = decide(lpcc_scores, residual_scores, alpha, k, criterion)
    logger.debug("Decided %s among %s", decided, candidates)

    return RecognitionResult(decided_speaker=decided,
                             lpcc_scores=lpcc_scores,
                             residual_scores=residual_scores,
                             combined_scores=combined,
                             preselected=candidates,
                             alpha=alpha,
                             k=k,
                             instruction_count=instruction_count,
                             frames_scored=n_frames,
                             residue_source=residue_source,
                             criterion=criterion)
