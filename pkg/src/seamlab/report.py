"""Report records, the JSON envelope, and CSV grid export.

Numbers are written losslessly: JSON uses the shortest round-trip float
representation, CSV uses 17 significant digits.  Non-finite floats become
``null`` in JSON and ``nan``/``inf`` text in CSV.  Complex numbers are
``{"re": .., "im": ..}`` in JSON and split into ``_re``/``_im`` columns in CSV.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import itertools
import json
import math
import os
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

__all__ = [
    "SCHEMA_VERSION",
    "OUTCOMES",
    "Record",
    "ReportEnvelope",
    "to_jsonable",
    "dumps",
    "export_grid",
    "load_schema",
]

SCHEMA_VERSION = "1.0"
OUTCOMES = ("pass", "fail", "diagnostic")


@dataclass
class Record:
    name: str
    inputs: dict
    values: object
    est_error: float | None
    outcome: str
    wall_time: float | None = None
    error: str | None = None

    def __post_init__(self):
        if self.outcome not in OUTCOMES:
            raise ValueError(f"outcome must be one of {OUTCOMES}")


@dataclass
class ReportEnvelope:
    toolkit_version: str
    command: str
    config: dict
    records: list = field(default_factory=list)
    exports: list = field(default_factory=list)
    deterministic: bool = True

    def timings(self):
        return {r.name: r.wall_time for r in self.records}

    def summary(self):
        counts = {k: 0 for k in OUTCOMES}
        for r in self.records:
            counts[r.outcome] += 1
        counts["total"] = len(self.records)
        return counts

    @property
    def ok(self):
        return all(r.outcome != "fail" for r in self.records)

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "toolkit": {"name": "seamlab", "version": self.toolkit_version},
            "command": self.command,
            "config": self.config,
            "records": [
                {
                    "name": r.name,
                    "inputs": r.inputs,
                    "values": r.values,
                    "est_error": r.est_error,
                    "outcome": r.outcome,
                    # timings vary run to run; deterministic reports leave them out
                    "wall_time": None if self.deterministic else r.wall_time,
                    "error": r.error,
                }
                for r in self.records
            ],
            "summary": self.summary(),
            "exports": list(self.exports),
        }


def to_jsonable(obj):
    """Recursively convert numpy, complex, dataclass and tuple values for JSON."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(envelope):
    """Canonical JSON text of an envelope (sorted keys, fixed indentation)."""
    return json.dumps(to_jsonable(envelope.to_dict()), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _fmt(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def export_grid(name, axes, values, out_dir=".", value_names=None):
    """Write a grid as ``<name>.csv`` and return the path.

    Parameters
    ----------
    name : str
        File stem.
    axes : dict or sequence of (label, list of real)
        Axis labels and coordinates, outermost first.
    values : array-like or dict of array-like
        Array of shape ``(len(ax0), len(ax1), ...)`` (real or complex), or a
        mapping from column name to such arrays.
    value_names : list of str, optional
        Column name for a single value array (default ``"value"``).

    Rows are in lexicographic order of the axis coordinates as given.

    Raises
    ------
    ValueError
        If a value array does not match the axis shape.
    OSError
        If the file cannot be written.
    """
    axes = list(axes.items()) if isinstance(axes, dict) else [tuple(a) for a in axes]
    if not axes:
        raise ValueError("at least one axis is required")
    shape = tuple(len(c) for _, c in axes)
    if not isinstance(values, dict):
        values = {(value_names or ["value"])[0]: values}
    cols = {}
    for key, arr in values.items():
        a = np.asarray(arr)
        if a.shape != shape:
            raise ValueError(f"values {key!r} have shape {a.shape}, axes imply {shape}")
        cols[key] = a
    header = [label for label, _ in axes]
    for key, a in cols.items():
        if np.iscomplexobj(a):
            header += [f"{key}_re", f"{key}_im"]
        else:
            header.append(key)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for idx in itertools.product(*(range(n) for n in shape)):
        row = [_fmt(axes[d][1][i]) for d, i in enumerate(idx)]
        for a in cols.values():
            v = a[idx]
            if np.iscomplexobj(a):
                row += [_fmt(v.real), _fmt(v.imag)]
            else:
                row.append(_fmt(v))
        writer.writerow(row)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{name}.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())
    return path


def load_schema():
    """The published JSON schema for ``report.json``."""
    text = resources.files("seamlab").joinpath("schema/report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)
