import pytest

from blowuplab.cli.config import convert, load_defaults, parse_config, parse_lines
from blowuplab.core.errors import ConfigError


def test_convert():
    defaults = load_defaults()
    assert convert(defaults["override"], "yes") is True
    assert convert(defaults["nodes"], " 64 ") == 64
    with pytest.raises(ConfigError):
        convert(defaults["nodes"], "8")
    with pytest.raises(ConfigError):
        convert(defaults["subcommand"], "plot")


def test_parse_lines():
    assert parse_lines("k = 2  # rate\n\n# note\nT=0.5") == {"k": "2", "T": "0.5"}
    with pytest.raises(ConfigError):
        parse_lines("k 2")


def test_far_field():
    assert parse_config("T=0.04").far_field == pytest.approx(2.0)
    assert parse_config("x_max=3").far_field == 3.0
