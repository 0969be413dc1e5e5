"""Serialization of reports and sampled fields.

Output is deterministic for fixed inputs: JSON keys are sorted and floats
are written with ``repr`` (shortest round-trip form).
"""

from __future__ import annotations

import csv
import io
import json
import sys

import numpy as np

from ..inversion import SignedJointDistribution
from ..quasiprob import PhaseSpaceField
from .report import ScenarioReport

REPORT_COLUMNS = (
    "name",
    "computed",
    "expected",
    "relation",
    "tolerance",
    "provenance",
    "abs_error",
    "passed",
)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def report_to_json(report, include_time=True):
    return json.dumps(_jsonable(report.as_dict(include_time)), sort_keys=True, indent=2) + "\n"


def report_to_csv(report, include_time=True):
    buf = io.StringIO()
    buf.write(f"# scenario: {report.scenario}\n")
    buf.write(f"# inputs: {json.dumps(_jsonable(report.inputs), sort_keys=True)}\n")
    buf.write("# units: all values dimensionless (photon number, quadrature in vacuum-variance-1/4 units)\n")
    if include_time:
        buf.write(f"# wall_time_s: {report.wall_time!r}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for c in report.comparisons:
        row = c.as_dict()
        writer.writerow([repr(row[k]) if isinstance(row[k], float) else row[k] for k in REPORT_COLUMNS])
    return buf.getvalue()


def field_to_csv(field):
    """Matrix rows indexed by x, columns by y, after a 4-line header."""
    if isinstance(field, SignedJointDistribution):
        x, y = field.x_grid, field.y_grid
    else:
        x, y = field.x, field.y
    values = np.asarray(field.values)
    buf = io.StringIO()
    buf.write(f"# x_range: {float(x[0])!r},{float(x[-1])!r}\n")
    buf.write(f"# y_range: {float(y[0])!r},{float(y[-1])!r}\n")
    buf.write(f"# nx: {x.size}\n")
    buf.write(f"# ny: {y.size}\n")
    writer = csv.writer(buf, lineterminator="\n")
    for row in values:
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def field_to_json(field):
    if isinstance(field, SignedJointDistribution):
        x, y = field.x_grid, field.y_grid
    else:
        x, y = field.x, field.y
    doc = {
        "x_range": [float(x[0]), float(x[-1])],
        "y_range": [float(y[0]), float(y[-1])],
        "nx": int(x.size),
        "ny": int(y.size),
        "values": np.asarray(field.values).tolist(),
    }
    return json.dumps(doc, sort_keys=True) + "\n"


def render(obj, fmt="json", include_time=True):
    if isinstance(obj, ScenarioReport):
        return report_to_json(obj, include_time) if fmt == "json" else report_to_csv(obj, include_time)
    if isinstance(obj, (PhaseSpaceField, SignedJointDistribution)):
        return field_to_json(obj) if fmt == "json" else field_to_csv(obj)
    raise TypeError(f"cannot emit {type(obj).__name__}")


def emit(obj, fmt="json", path=None, include_time=True):
    """Write ``obj`` to ``path`` (stdout when None). OSError propagates."""
    text = render(obj, fmt, include_time)
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_field_csv(path):
    """Inverse of field_to_csv, returning a PhaseSpaceField."""
    with open(path, encoding="utf-8") as fh:
        header = [fh.readline() for _ in range(4)]
        meta = {}
        for line in header:
            key, value = line.lstrip("# ").split(":", 1)
            meta[key.strip()] = value.strip()
        values = np.loadtxt(fh, delimiter=",", ndmin=2)
    x0, x1 = (float(v) for v in meta["x_range"].split(","))
    y0, y1 = (float(v) for v in meta["y_range"].split(","))
    x = np.linspace(x0, x1, int(meta["nx"]))
    y = np.linspace(y0, y1, int(meta["ny"]))
    return PhaseSpaceField(x, y, values)
