import os

import numpy as np

from ..exceptions.custom_exceptions import ValidationException
from ..exceptions.error_messages import ValidationErrorMessage, ValidationErrorCode


def convert_time_interval_to_human_readable(time: int,
                                            format="hms") -> str:
    """
    Converts a time duration given in seconds into a human-readable format displaying hours, minutes, and seconds.

    Args:
        time (int, float): The time duration in seconds. Must be non-negative.
        format (str, optional): Format of output time string. Defaults to "hms" and can have following values:
                                "hms" : include hour, minute, second in output time string.
                                "ms" : include minute, second in output time string.
                                "s" : include only second in output time string.

    Returns:
        str: A string representing the time duration, or None if it can not be formatted.
    """

    try:
        if format == "hms":
            hours = time // (60 * 60)
            time %= (60 * 60)
            minutes = time // (60)
            time %= (60)
            return f"{int(hours)} hours, {int(minutes)} minutes and {int(time)} seconds"

        elif format == "ms":
            minutes = time // (60)
            time %= (60)
            return f"{int(minutes)} minutes and {int(time)} seconds"

        elif format == "s":
            return f"{int(time)} seconds"
    except Exception:
        return None


def create_path(file_path):
    """
    Creates all required parent directories for the file path "file_path".

    Args:
        file_path (string): A file path.
    """

    directory = os.path.dirname(file_path)
    if directory and (not os.path.exists(directory)):
        os.makedirs(directory, exist_ok=True)


def parse_alpha_grid(spec: str) -> list:
    """
    Parse an alpha grid specification.

    Accepted forms:
        "0,0.5,2"          explicit comma separated values
        "lin:0:10:101"     101 linearly spaced values from 0 to 10
        "log:1e-3:1e2:1000" 1000 logarithmically spaced values from 1e-3 to 1e2 (bounds must be positive)

    Returns:
        list: Non-negative alpha values in the given order.

    Raises:
        ValidationException (VALUE_EXCEPTION_CODE: 4003): If `spec` can not be parsed or yields negative or no values.
    """

    invalid = ValidationException(ValidationErrorMessage.INVALID_ALPHA_GRID.format(spec),
                                  ValidationErrorCode.VALUE_EXCEPTION_CODE)
    text = str(spec).strip()

    try:
        if text.startswith(("lin:", "log:")):
            kind, start, stop, count = text.split(":")
            start, stop, count = float(start), float(stop), int(count)
            if count < 1:
                raise invalid
            if kind == "lin":
                values = np.linspace(start, stop, count)
            else:
                if (start <= 0) or (stop <= 0):
                    raise invalid
                values = np.logspace(np.log10(start), np.log10(stop), count)
        else:
            values = [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise invalid

    values = [float(value) for value in values]
    if (len(values) == 0) or any((value < 0) or (not np.isfinite(value)) for value in values):
        raise invalid
    return values
