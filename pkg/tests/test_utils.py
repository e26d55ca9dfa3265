import re
import os
import pytest
import numpy as np

from src.speakerly.utils.utils import convert_time_interval_to_human_readable, create_path, parse_alpha_grid
from src.speakerly.utils.data_validation_utils import DataValidationUtils
from src.speakerly.exceptions.custom_exceptions import ValidationException


##################
# parse_alpha_grid
##################

def test_parse_alpha_grid_explicit_values():
    assert parse_alpha_grid("0, 0.5,2") == [0.0, 0.5, 2.0]


def test_parse_alpha_grid_linear():
    values = parse_alpha_grid("lin:0:10:101")

    assert len(values) == 101
    assert values[0] == 0.0 and values[-1] == 10.0
    assert values[1] == pytest.approx(0.1)


def test_parse_alpha_grid_logarithmic():
    values = parse_alpha_grid("log:1e-3:1e2:6")
    assert np.allclose(values, [1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0])


def test_parse_alpha_grid_invalid():
    """Negative values, non-positive log bounds and garbage are rejected."""

    for spec in ("a,b", "0,-1", "log:0:1:10", "lin:0:1", "lin:0:1:0", ""):
        expected_error_msg = re.escape(f"(\"Unable to parse alpha grid specification: '{spec}'\", 4003)")
        with pytest.raises(ValidationException, match=expected_error_msg):
            parse_alpha_grid(spec)


#############
# other utils
#############

def test_convert_time_interval_to_human_readable():
    assert convert_time_interval_to_human_readable(3661, "hms") == "1 hours, 1 minutes and 1 seconds"
    assert convert_time_interval_to_human_readable(3661, "ms") == "61 minutes and 1 seconds"
    assert convert_time_interval_to_human_readable(3661.7, "s") == "3661 seconds"


def test_convert_time_interval_to_human_readable_for_invalid_input():
    assert convert_time_interval_to_human_readable("10") is None


def test_create_path(tmp_path):
    file_path = str(tmp_path / "a" / "b" / "file.txt")
    create_path(file_path)

    assert os.path.isdir(str(tmp_path / "a" / "b"))
    create_path("file_in_working_directory.txt")


#####################
# DataValidationUtils
#####################

def test_check_key_in_a_dict():
    expected_error_msg = re.escape("(\"Expected key: 'k' missing from the dictionary\", 4001)")

    with pytest.raises(ValidationException, match=expected_error_msg):
        DataValidationUtils.check_key_in_a_dict({"alpha": 0.0}, "k")


def test_check_int_rejects_bool():
    with pytest.raises(ValidationException, match=re.escape("k must be of type Int")):
        DataValidationUtils.check_int(True, "k")


def test_check_choice():
    expected_error_msg = re.escape("(\"measure must be one of ['mae', 'mse'] but found abs\", 4003)")

    with pytest.raises(ValidationException, match=expected_error_msg):
        DataValidationUtils.check_choice("abs", ["mae", "mse"], "measure")


def test_check_range_pair_bounds():
    expected_error_msg = re.escape("('pole_radius_range lower bound must not exceed its upper bound but found (0.9, 0.5)', 4003)")

    with pytest.raises(ValidationException, match=expected_error_msg):
        DataValidationUtils.check_range_pair((0.9, 0.5), "pole_radius_range", 0)


def test_check_array_non_finite():
    expected_error_msg = re.escape("('data must contain only finite values', 4003)")

    with pytest.raises(ValidationException, match=expected_error_msg):
        DataValidationUtils.check_array(np.array([[1.0, np.nan]]), (None, 2), "data")


def test_validate_identify_parameters_negative_alpha():
    expected_error_msg = re.escape("('alpha cannot be negative', 4003)")

    with pytest.raises(ValidationException, match=expected_error_msg):
        DataValidationUtils.validate_identify_parameters(-1.0, 2)
