"""Rendering of command results as text, JSON or CSV.

Every format opens with the resolved run: text and CSV carry it on a
``# run {json}`` comment line, JSON under the ``run`` key. Text and CSV
print floats in fixed point at the run's precision; JSON keeps them at
full precision so parsing an emitted report gives back the same values.
"""

import csv
import io
import json
import math
import sys
from typing import Any, List, NamedTuple, Optional, Sequence

from pydantic import BaseModel

from app.cli.helpers import EXIT_UNWRITABLE, CliError, usage_error
from app.cli.schemas import RunSpec

TEXT = "text"
JSON = "json"
CSV = "csv"
FORMATS = (TEXT, JSON, CSV)


class Emission(NamedTuple):
    """What one command produced, ready for any output format.

    Args:
        key: JSON key the items are listed under.
        items: Wire models, in output order.
        columns: CSV header.
        rows: CSV rows of raw values, one per line.
        lines: Text body, built by the command at the run's precision.
    """

    key: str
    items: Sequence[BaseModel]
    columns: Sequence[str]
    rows: Sequence[Sequence[Any]]
    lines: Sequence[str]


def format_value(value: Any, precision: int) -> str:
    """Fixed-point for floats, empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.{precision}f}"
    return str(value)


def format_scientific(value: float, log_value: Optional[float], precision: int) -> str:
    """Scientific notation, rebuilt from the natural log when ``value`` underflowed to zero."""
    if value > 0.0 or log_value is None or not math.isfinite(log_value):
        return f"{value:.{precision}e}"
    exponent10 = log_value / math.log(10.0)
    exponent = math.floor(exponent10)
    mantissa = round(10.0 ** (exponent10 - exponent), precision)
    if mantissa >= 10.0:
        mantissa, exponent = mantissa / 10.0, exponent + 1
    return f"{mantissa:.{precision}f}e{exponent:+03d}"


def run_header(run: RunSpec) -> str:
    return "# run " + run.model_dump_json(exclude_none=True)


def render_text(run: RunSpec, emission: Emission) -> str:
    return "\n".join([run_header(run), *emission.lines]) + "\n"


def render_json(run: RunSpec, emission: Emission) -> str:
    document = {
        "run": run.model_dump(exclude_none=True),
        emission.key: [item.model_dump(by_alias=True) for item in emission.items],
    }
    return json.dumps(document, indent=2) + "\n"


def render_csv(run: RunSpec, emission: Emission) -> str:
    buffer = io.StringIO()
    buffer.write(run_header(run) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(emission.columns)
    for row in emission.rows:
        writer.writerow([format_value(value, run.precision) for value in row])
    return buffer.getvalue()


RENDERERS = {TEXT: render_text, JSON: render_json, CSV: render_csv}


def render(run: RunSpec, emission: Emission) -> str:
    try:
        renderer = RENDERERS[run.format]
    except KeyError as exc:
        raise usage_error(f"invalid_format: {run.format!r}") from exc
    return renderer(run, emission)


def write_output(content: str, out: Optional[str]) -> None:
    """Writes to ``out`` or, without one, to standard output."""
    if out is None:
        sys.stdout.write(content)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(content)
    except OSError as exc:
        raise CliError(EXIT_UNWRITABLE, f"unwritable_output: {out}: {exc.strerror or exc}") from exc


def table_lines(columns: Sequence[str], rows: Sequence[Sequence[Any]], precision: int) -> List[str]:
    """Left-aligned columns for the text format."""
    cells = [[format_value(value, precision) for value in row] for row in rows]
    widths = [max([len(name)] + [len(row[index]) for row in cells]) for index, name in enumerate(columns)]
    lines = ["  ".join(name.ljust(width) for name, width in zip(columns, widths)).rstrip()]
    lines.extend("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in cells)
    return lines
