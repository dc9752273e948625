import logging
from pathlib import Path
from typing import List, NamedTuple

import mistletoe
import numpy as np

from blowuplab.core.errors import DomainError
from blowuplab.core.writers import format_value, read_csv_columns, read_key_values
from blowuplab.html.render import render

logger = logging.getLogger(__name__)

SUMMARY_NAMES = ("summary.md", "summary.html")


class ColumnInfo(NamedTuple):
    name: str
    low: str
    high: str


class TableInfo(NamedTuple):
    path: str
    rows: int
    columns: List[ColumnInfo]


class ValuesInfo(NamedTuple):
    path: str
    values: List[tuple]


class SectionInfo(NamedTuple):
    name: str
    values: List[ValuesInfo]
    tables: List[TableInfo]
    plots: List[str]


def _table(path: Path, root: Path) -> TableInfo:
    columns = read_csv_columns(path)
    infos = []
    rows = 0
    for name, values in columns.items():
        rows = len(values)
        if any(isinstance(v, str) for v in values):
            infos.append(ColumnInfo(name, "text", "text"))
            continue
        arr = np.asarray(values, dtype=float)
        finite = arr[np.isfinite(arr)]
        low, high = (format_value(float(finite.min())), format_value(float(finite.max()))) if len(finite) else ("nan", "nan")
        infos.append(ColumnInfo(name, low, high))
    return TableInfo(path.relative_to(root).as_posix(), rows, infos)


def _section(directory: Path, root: Path) -> SectionInfo:
    files = sorted(p for p in directory.iterdir() if p.is_file() and p.name not in SUMMARY_NAMES)
    values = [
        ValuesInfo(p.relative_to(root).as_posix(), sorted(read_key_values(p).items()))
        for p in files
        if p.suffix == ".txt"
    ]
    tables = [_table(p, root) for p in files if p.suffix == ".csv"]
    plots = [p.relative_to(root).as_posix() for p in files if p.suffix == ".svg"]
    name = "." if directory == root else directory.relative_to(root).as_posix()
    return SectionInfo(name, values, tables, plots)


def render_report(run_dir: Path) -> Path:
    """Collects every stage output under run_dir into summary.md and its HTML rendering"""
    root = Path(run_dir)
    if not root.is_dir():
        raise DomainError(f"Run directory {root} does not exist")
    directories = [root] + sorted(p for p in root.rglob("*") if p.is_dir())
    sections = [s for s in (_section(d, root) for d in directories) if s.values or s.tables or s.plots]
    if not sections:
        raise DomainError(f"Run directory {root} holds no stage outputs")
    markdown = render("report.md.j2", sections=sections)
    (root / "summary.md").write_text(markdown)
    body = mistletoe.markdown(markdown)
    (root / "summary.html").write_text(render("report.html.j2", body=body))
    logger.info("Rendered report for %d sections in %s", len(sections), root)
    return root / "summary.md"
