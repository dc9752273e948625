import csv
import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence

FLOAT_FORMAT = "%.17g"


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return FLOAT_FORMAT % value
    if hasattr(value, "dtype"):
        return format_value(value.item())
    return str(value)


def write_csv(
    path: Path,
    header: Sequence[str],
    rows: Iterable[Sequence],
    comments: Mapping[str, object] = None,
):
    """
    Writes rows at 17 significant digits.

    :param comments: optional mapping written first as ``# key=<json>`` lines
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as out:
        for key, value in (comments or {}).items():
            out.write(f"# {key}={json.dumps(value)}\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])


def _parse(value: str):
    try:
        return float(value)
    except ValueError:
        return value


def read_csv_columns(path: Path) -> dict:
    """Columns by header name; numeric cells become floats, others stay text"""
    columns = {}
    with open(path, newline="") as f:
        lines = [line for line in f if not line.startswith("#")]
    reader = csv.DictReader(lines)
    for row in reader:
        for key, value in row.items():
            columns.setdefault(key, []).append(_parse(value))
    return columns


def write_key_values(path: Path, values: Mapping[str, object]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as out:
        for key, value in values.items():
            out.write(f"{key}={format_value(value)}\n")


def read_key_values(path: Path) -> dict:
    values = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line and "=" in line:
                key, value = line.split("=", 1)
                values[key] = value
    return values
