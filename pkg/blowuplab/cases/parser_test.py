import math

import pytest

from blowuplab.cases.parser import CaseFileParser
from blowuplab.core.errors import ConfigError

HEADER = """
base_uri: blowuplab.abel.fractional
function: abel_solve
cases:
  - group:
      id: basic
      description: Basic examples
    args:
"""


def _parse(args: str, result: str = "      value: 1.0\n      type: fp64\n"):
    text = HEADER + args + "    result:\n" + result
    return CaseFileParser().parse(text)


def test_float_strings():
    [case_file] = _parse(
        "      - value: inf\n        type: fp64\n"
        "      - value: [1.0, -inf, nan]\n        type: list<fp64>\n"
    )
    [case] = case_file.cases
    assert case.args[0].value == math.inf
    assert case.args[1].value[1] == -math.inf
    assert math.isnan(case.args[1].value[2])
    assert case.result.tolerance is None
    with pytest.raises(ConfigError):
        _parse("      - value: huge\n        type: fp64\n")


def test_structured_literals():
    [case_file] = _parse("      - value: {sample: sqrt, T: 1.0, n: 8}\n        type: series\n")
    assert case_file.cases[0].args[0].value["n"] == 8
    with pytest.raises(ConfigError, match="missing n"):
        _parse("      - value: {sample: sqrt, T: 1.0}\n        type: series\n")
    with pytest.raises(ConfigError):
        _parse("      - value: 3.0\n        type: grid\n")


def test_error_results():
    [case_file] = _parse("      - value: 1.0\n        type: fp64\n", "      special: error\n")
    assert case_file.cases[0].result == "error"
    with pytest.raises(ConfigError):
        _parse("      - value: 1.0\n        type: fp64\n", "      special: crash\n")
