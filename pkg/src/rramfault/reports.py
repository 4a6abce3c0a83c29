"""Evaluation reports: one flat row schema, CSV and JSON emission.

Rows are plain dicts over a fixed column set. Emission canonicalizes row
order and floats print with full round-trip precision, so re-emitting the
same results is byte-identical, and identical seeds give identical files.
"""

import json

import numpy as np

from .defects import DEFECT_KINDS
from .mlp import ARCHITECTURE_LADDER

REPORT_FORMAT = "eval-report/1"

REPORT_COLUMNS = (
    "experiment",
    "corrector",
    "kind_train",
    "kind_test",
    "size",
    "layer",
    "severity_pairs",
    "coverage",
    "acc_faulty",
    "acc_corrected",
    "delta_pp",
    "n_samples",
    "seed",
)


def report_row(**fields):
    """A full-schema row; omitted columns are None (empty in CSV)."""
    unknown = set(fields) - set(REPORT_COLUMNS)
    if unknown:
        raise ValueError(f"unknown report columns: {sorted(unknown)}")
    row = {}
    for column in REPORT_COLUMNS:
        value = fields.get(column)
        if isinstance(value, np.integer):
            value = int(value)
        elif isinstance(value, np.floating):
            value = float(value)
        row[column] = value
    return row


def _rank(value, ordering):
    try:
        return (0, ordering.index(value), "")
    except (ValueError, TypeError):
        return (1, 0, str(value))


def _size_rank(value):
    if value is None:
        return 5  # unsized kinds (checkerboard)
    if value == "all":
        return 9
    return int(value)


def _layer_rank(value):
    if value == "all" or value is None:
        return 9
    return int(value)


def _row_key(row):
    return (
        str(row.get("experiment") or ""),
        _rank(row.get("corrector"), list(ARCHITECTURE_LADDER)),
        _rank(row.get("kind_train"), list(DEFECT_KINDS)),
        _rank(row.get("kind_test"), list(DEFECT_KINDS)),
        _size_rank(row.get("size")),
        _layer_rank(row.get("layer")),
    )


def canonical_rows(rows):
    """Stable report ordering, independent of generation order."""
    return sorted(rows, key=_row_key)


def _csv_value(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        raise ValueError("boolean report values are not part of the schema")
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_text(rows):
    lines = [",".join(REPORT_COLUMNS)]
    for row in canonical_rows(rows):
        lines.append(",".join(_csv_value(row.get(c)) for c in REPORT_COLUMNS))
    return "\n".join(lines) + "\n"


def emit_csv(rows, path):
    text = csv_text(rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def report_payload(experiment, rows, seeds=None, summary=None):
    """Assemble the JSON report document."""
    return {
        "format": REPORT_FORMAT,
        "experiment": experiment,
        "seeds": dict(seeds) if seeds is not None else None,
        "summary": summary,
        "rows": canonical_rows(
            [report_row(**row) for row in rows]
        ),
    }


def json_text(payload):
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def emit_json(payload, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(json_text(payload))


def load_report(path):
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != REPORT_FORMAT:
        raise ValueError(f"unsupported report format: {payload.get('format')!r}")
    return payload
