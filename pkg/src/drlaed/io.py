"""Text file formats: samples CSV, network and config JSON, result CSVs.

Numbers are written with 12 significant digits. Lines starting with ``#``
are comments and are skipped on input.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ParseError
from .grid import Network
from .risk import SampleSet


def fmt(v) -> str:
    """Decimal text with 12 significant digits; ``None`` becomes an empty field."""
    if v is None:
        return ""
    if isinstance(v, (str, bool)):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.12g}"


def header_line(config_hash: str, seed) -> str:
    return f"drlaed {__version__} config={config_hash} seed={seed}"


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def write_table(path, columns, rows, comment: str | None = None) -> None:
    """Write a CSV with an optional leading ``#`` comment line."""
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    Path(path).write_text(buf.getvalue())


def _data_lines(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield lineno, line


def read_samples_csv(path, expected_labels=None) -> SampleSet:
    """Samples CSV: a header of component labels (``res<j>_t<t>``) and one
    scenario per row.

    Raises
    ------
    ParseError
        With the 1-based line and column of the offending field.
    """
    path = str(path)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read samples: {exc.strerror}", path) from exc
    lines = list(_data_lines(text))
    if not lines:
        raise ParseError("samples file is empty", path)
    head_no, head = lines[0]
    labels = [h.strip() for h in next(csv.reader([head]))]
    if expected_labels is not None and labels != list(expected_labels):
        for col, (got, want) in enumerate(zip(labels, expected_labels), start=1):
            if got != want:
                raise ParseError(f"column label {got!r}, expected {want!r}", path, head_no, col)
        raise ParseError(f"header has {len(labels)} columns, expected {len(expected_labels)}", path, head_no)
    rows = []
    for lineno, line in lines[1:]:
        fields = next(csv.reader([line]))
        if len(fields) != len(labels):
            raise ParseError(f"row has {len(fields)} fields, expected {len(labels)}", path, lineno)
        vals = []
        for col, cell in enumerate(fields, start=1):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"not a number: {cell.strip()!r}", path, lineno, col) from None
            if not np.isfinite(v) or v < 0:
                raise ParseError(f"samples must be finite and nonnegative, got {cell.strip()}", path, lineno, col)
            vals.append(v)
        rows.append(vals)
    if not rows:
        raise ParseError("samples file has a header but no rows", path, head_no)
    return SampleSet(np.array(rows), labels)


def write_samples_csv(path, samples: SampleSet, comment: str | None = None) -> None:
    write_table(path, samples.labels, samples.samples.tolist(), comment)


def read_json(path) -> dict:
    """Parse JSON, reporting syntax errors with line and column."""
    path = str(path)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read: {exc.strerror}", path) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path, exc.lineno, exc.colno) from None


def read_network(path) -> Network:
    data = read_json(path)
    if not isinstance(data, dict):
        raise ParseError("network file must hold a JSON object", str(path), 1, 1)
    return Network.from_dict(data, name=Path(path).stem)
