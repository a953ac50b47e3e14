"""Report persistence: canonical JSON, CSV plot data and the report schema."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
import warnings
from importlib import resources
from pathlib import Path

SCHEMA_VERSION = 1
PLOT_HEADER = ("n", "count", "log_n", "log_count", "fit_exponent")


def dumps(report: dict) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def atomic_write(path, text: str) -> None:
    """Write via a temporary file in the target directory and rename it into place."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(report: dict, path) -> None:
    atomic_write(path, dumps(report))


def envelope(command: str, config: dict, payload: dict) -> dict:
    """Attach the schema version, command name and run configuration."""
    out = {"schema_version": SCHEMA_VERSION, "command": command, "config": config}
    clash = out.keys() & payload.keys()
    if clash:
        raise ValueError(f"payload overrides envelope keys {sorted(clash)}")
    out.update(payload)
    return out


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def plot_rows(report) -> list[tuple]:
    """Rows of plot data for a growth report (object or its dict form), sorted by n."""
    data = report.to_dict() if hasattr(report, "to_dict") else report
    fitted = data.get("fitted")
    rows = []
    for rec in sorted(data.get("records", []), key=lambda r: r["n"]):
        # log_count is taken from the fitted quantity, which carries any K power
        value = rec.get("value", rec["count"])
        rows.append((rec["n"], rec["count"], _fmt(math.log(rec["n"])), _fmt(math.log(value)),
                     "" if fitted is None else _fmt(fitted)))
    return rows


def plot_csv(report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PLOT_HEADER)
    rows = plot_rows(report)
    if not rows:
        warnings.warn("growth report has no records; plot data holds the header only",
                      stacklevel=3)
    writer.writerows(rows)
    return buf.getvalue()


def emit_plot_data(report, path) -> None:
    """CSV ``n,count,log_n,log_count,fit_exponent``, one row per record."""
    atomic_write(path, plot_csv(report))


def load_schema() -> dict:
    text = resources.files("sumsetlab").joinpath("schemas/report.schema.json").read_text("utf-8")
    return json.loads(text)
