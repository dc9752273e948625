import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from blowuplab.cli.config import parse_config
from blowuplab.cli.main import EXIT_CONFIG, EXIT_CONSTRAINT, EXIT_NUMERICAL, EXIT_OK, main
from blowuplab.cli.plots import emit_plot, loglog_slope
from blowuplab.cli.report import render_report
from blowuplab.cli.types import Series
from blowuplab.core.errors import ConfigError, ConstraintViolation, DomainError
from blowuplab.core.writers import read_csv_columns, read_key_values, write_csv, write_key_values
from blowuplab.html.builder import build_catalogue

SVG = "{http://www.w3.org/2000/svg}"


def _config(tmp_path, text):
    path = tmp_path / "run.cfg"
    path.write_text(text + f"\noutput={tmp_path / 'out'}\n")
    return path


def test_overrides_take_precedence():
    config = parse_config("k=2\nnodes=64", {"nodes": "128"})
    assert config.nodes == 128
    assert config.h_table is None


def test_constraint_failure_names_inequalities():
    with pytest.raises(ConstraintViolation) as err:
        parse_config("k=1")
    assert err.value.failures
    assert all(not f.satisfied for f in err.value.failures)


def test_unknown_key():
    with pytest.raises(ConfigError, match="bogus"):
        parse_config("bogus=1")


def test_exit_codes(tmp_path):
    assert main([str(tmp_path / "missing.cfg")]) == EXIT_CONFIG
    assert main([str(_config(tmp_path, "beta=0.6"))]) == EXIT_CONFIG
    assert main([str(_config(tmp_path, "k=1"))]) == EXIT_CONSTRAINT
    assert main([str(_config(tmp_path, "subcommand=report"))]) == EXIT_NUMERICAL


def test_bad_override_flag(tmp_path):
    assert main([str(_config(tmp_path, "")), "--set", "nodes"]) == EXIT_CONFIG


def test_abel_stage(tmp_path):
    assert main([str(_config(tmp_path, "subcommand=abel")), "--log-level", "ERROR"]) == EXIT_OK
    out = tmp_path / "out" / "abel"
    alpha = read_csv_columns(out / "alpha.csv")
    assert np.allclose(alpha["alpha"], 1.0, rtol=1e-10)
    values = read_key_values(out / "abel.txt")
    assert float(values["multipoint_power"]) == pytest.approx(2.0, abs=0.01)
    assert float(values["multipoint_fit_residual"]) < 1e-4
    assert float(values["abel_residual"]) < 1e-10
    assert float(values["reduced_residual"]) <= 1e-4
    assert float(values["vanishing_order"]) >= 1.0
    assert (out / "reduced.csv").exists()


def test_abel_stage_rejects_nonzero_start(tmp_path):
    table = tmp_path / "h.csv"
    write_csv(table, ["t", "h"], [(0.0, 1.0), (0.005, 1.0), (0.01, 1.0)])
    assert main([str(_config(tmp_path, f"subcommand=abel\nh_table={table}"))]) == EXIT_NUMERICAL


def test_emit_plot(tmp_path):
    x = np.geomspace(1e-3, 1.0, 20)
    path = emit_plot(
        [Series("power", list(x), list(3 * x**-0.5)), Series("samples", list(x), list(x), "points")],
        tmp_path / "plot.svg",
        title="Rate & fit",
        log_x=True,
        log_y=True,
    )
    root = ET.parse(path).getroot()
    assert root.tag == f"{SVG}svg"
    assert root.get("version") == "1.1"
    assert len(root.findall(f"{SVG}polyline")) == 1
    assert len(root.findall(f"{SVG}circle")) == 20
    texts = [t.text for t in root.iter(f"{SVG}text")]
    assert "Rate & fit" in texts
    assert "slope -0.5" in texts


def test_emit_plot_drops_nonpositive_points(tmp_path):
    path = emit_plot([Series("s", [0.0, 1.0, 2.0], [1.0, 2.0, 4.0])], tmp_path / "p.svg", log_x=True, log_y=True)
    assert "slope 1" in path.read_text()
    with pytest.raises(DomainError):
        emit_plot([Series("s", [0.0], [1.0])], tmp_path / "q.svg", log_x=True)
    with pytest.raises(DomainError):
        loglog_slope(Series("s", [1.0], [1.0]))


def test_render_report(tmp_path):
    stage = tmp_path / "abel"
    write_key_values(stage / "abel.txt", {"samples": 65, "alpha_sup": 1.0})
    write_csv(stage / "alpha.csv", ["t", "alpha"], [(0.0, 1.0), (1.0, 3.0)])
    emit_plot([Series("alpha", [0.0, 1.0], [1.0, 3.0])], stage / "alpha.svg")
    summary = render_report(tmp_path)
    text = summary.read_text()
    assert "## abel" in text
    assert "| alpha | 1 | 3 |" in text
    assert "![abel/alpha.svg](abel/alpha.svg)" in text
    assert "<table>" in (tmp_path / "summary.html").read_text()
    with pytest.raises(DomainError):
        render_report(tmp_path / "missing")


def test_build_catalogue(tmp_path):
    index = Path(__file__).parents[2] / "index.yaml"
    written = build_catalogue(index, tmp_path)
    names = {p.name for p in written}
    assert "index.html" in names
    assert "blowuplab.profiles.bubble.bubble_w.html" in names
    assert "bubble_w" in (tmp_path / "index.html").read_text()
