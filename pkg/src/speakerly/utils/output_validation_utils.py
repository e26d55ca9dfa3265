import math

from .. import constants
from .data_validation_utils import DataValidationUtils
from ..exceptions.custom_exceptions import ValidationException
from ..exceptions.error_messages import ValidationErrorMessage, ValidationErrorCode


def validate_eval_report(report):
    """
    Validates the structure and contents of an evaluation report.

    Args:
        report (dict): A dictionary produced by EvalReport.to_dict.

    Raises:
        ValidationException (KEY_ERROR_EXCEPTION_CODE: 4001): If a mandatory key is missing from the report or its config.

        ValidationException (DATA_FORMAT_EXCEPTION_CODE: 4002): If report is not of data type dict.
        ValidationException (DATA_FORMAT_EXCEPTION_CODE: 4002): If error_rate is not of data type int or float.
        ValidationException (DATA_FORMAT_EXCEPTION_CODE: 4002): If total_decisions or wrong_decisions is not of data type int.
        ValidationException (DATA_FORMAT_EXCEPTION_CODE: 4002): If confusion or config is not of data type dict.
        ValidationException (DATA_FORMAT_EXCEPTION_CODE: 4002): If decisions or skipped_utterances is not of data type list.

        ValidationException (VALUE_EXCEPTION_CODE: 4003): If error_rate is not in range [0, 1].
        ValidationException (VALUE_EXCEPTION_CODE: 4003): If a count or total_execution_time is negative.
        ValidationException (VALUE_EXCEPTION_CODE: 4003): If wrong_decisions exceeds total_decisions.
        ValidationException (VALUE_EXCEPTION_CODE: 4003): If the confusion counts do not sum to total_decisions.
        ValidationException (VALUE_EXCEPTION_CODE: 4003): If error_rate differs from wrong_decisions / total_decisions.
    """

    DataValidationUtils.check_dict(report, "report")

    for key in constants.EVAL_REPORT_KEYS:
        DataValidationUtils.check_key_in_a_dict(report, key)

    DataValidationUtils.check_non_negative_int_or_float(report["error_rate"], "error_rate")
    DataValidationUtils.check_non_negative_int(report["total_decisions"], "total_decisions")
    DataValidationUtils.check_non_negative_int(report["wrong_decisions"], "wrong_decisions")
    DataValidationUtils.check_dict(report["confusion"], "confusion")
    DataValidationUtils.check_list(report["decisions"], "decisions")
    DataValidationUtils.check_dict(report["config"], "config")
    DataValidationUtils.check_list(report["skipped_utterances"], "skipped_utterances")
    DataValidationUtils.check_non_negative_int_or_float(report["total_execution_time"], "total_execution_time")

    for key in constants.EVAL_REPORT_CONFIG_KEYS:
        DataValidationUtils.check_key_in_a_dict(report["config"], key)

    if report["error_rate"] > 1:
        raise ValidationException(ValidationErrorMessage.DATA_NOT_IN_RANGE.format("error_rate", 0, 1, report["error_rate"]),
                                  ValidationErrorCode.VALUE_EXCEPTION_CODE)

    total, wrong = report["total_decisions"], report["wrong_decisions"]
    if wrong > total:
        raise ValidationException(ValidationErrorMessage.DATA_NOT_IN_RANGE.format("wrong_decisions", 0, total, wrong),
                                  ValidationErrorCode.VALUE_EXCEPTION_CODE)

    confusion_sum = sum(count for row in report["confusion"].values() for count in row.values())
    if confusion_sum != total:
        raise ValidationException(ValidationErrorMessage.INCORRECT_CONFUSION_SUM.format(total, confusion_sum),
                                  ValidationErrorCode.VALUE_EXCEPTION_CODE)

    expected_rate = (wrong / total) if total else 0.0
    if not math.isclose(report["error_rate"], expected_rate, abs_tol=1e-12):
        raise ValidationException(ValidationErrorMessage.INCORRECT_ERROR_RATE,
                                  ValidationErrorCode.VALUE_EXCEPTION_CODE)
