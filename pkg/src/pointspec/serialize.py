"""Canonical CSV and JSON emission for CLI artifacts.

CSV: comma separated, LF line endings, every number written with 17
significant digits so that re-parsing and re-writing reproduces the file
byte for byte. Lines starting with ``#`` carry summaries and are kept as is.
"""

from __future__ import annotations

import io
import json
import math
from importlib import resources

SPECTRUM_COLUMNS = ("index", "parity", "branch", "k_or_kappa", "energy")
FLOW_COLUMNS = ("t", "theta_plus", "theta_minus", "level", "parity", "k_or_kappa", "energy")
SCATTER_COLUMNS = ("k", "re_r", "im_r", "re_t", "im_t", "unitarity_defect")
REPORT_COLUMNS = ("check", "metric", "value")


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return format(float(v), ".17g")
    if v is None:
        return ""
    return str(v)


def _parse_value(tok: str):
    try:
        return float(tok)
    except ValueError:
        return tok


def write_csv(columns, rows, comments=()) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(format_value(v) for v in row) + "\n")
    for c in comments:
        buf.write(f"# {c}\n")
    return buf.getvalue()


def read_csv(text: str):
    """Parse canonical CSV into ``(columns, rows, comments)``; numbers come back as floats."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    columns = tuple(lines[0].split(","))
    rows, comments = [], []
    for line in lines[1:]:
        if line.startswith("#"):
            comments.append(line[2:] if line.startswith("# ") else line[1:])
            continue
        rows.append([_parse_value(tok) for tok in line.split(",")])
    return columns, rows, comments


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def write_json(payload: dict) -> str:
    return json.dumps(_clean(payload), indent=2, sort_keys=False, allow_nan=False) + "\n"


def load_schema() -> dict:
    text = resources.files("pointspec").joinpath("schemas/report.schema.json").read_text()
    return json.loads(text)
