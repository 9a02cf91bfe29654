"""CSV matrix/sample files and the JSON model document."""
from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path

import numpy as np

from .model import LatentTreeError, TreeModel, tree_is_valid
from .oracle import SampleMatrix

SCHEMA_VERSION = 1


class InputFormatError(LatentTreeError, ValueError):
    """Malformed input file; the message carries file:line:column."""


def read_rows(path) -> list[list[str]]:
    with open(path, newline="") as fh:
        return [row for row in csv.reader(fh) if any(cell.strip() for cell in row)]


def _number(cell: str, where: str) -> float:
    try:
        return float(cell)
    except ValueError:
        raise InputFormatError(f"{where}: cannot parse {cell.strip()!r} as a number") from None


def looks_like_matrix(rows: list[list[str]]) -> bool:
    """Matrix files are square below a header row and carry names in column 0."""
    if len(rows) < 2:
        return False
    header = [c.strip() for c in rows[0]]
    if len(rows) != len(header):
        return False
    try:
        float(rows[1][0])
    except (ValueError, IndexError):
        return True
    return False


def read_matrix(path) -> tuple[tuple[str, ...], np.ndarray]:
    """Read a named square matrix: first row and first column hold the names."""
    rows = read_rows(path)
    if not rows:
        raise InputFormatError(f"{path}: empty file")
    names = tuple(c.strip() for c in rows[0][1:])
    n = len(names)
    if n == 0:
        raise InputFormatError(f"{path}:1: header row has no variable names")
    if len(rows) - 1 != n:
        raise InputFormatError(f"{path}: header names {n} variables but there are {len(rows) - 1} data rows")
    out = np.empty((n, n))
    for i, row in enumerate(rows[1:]):
        line = i + 2
        if len(row) != n + 1:
            raise InputFormatError(f"{path}:{line}: expected {n + 1} columns, got {len(row)}")
        if row[0].strip() != names[i]:
            raise InputFormatError(
                f"{path}:{line}:1: row name {row[0].strip()!r} does not match column name {names[i]!r}"
            )
        for j, cell in enumerate(row[1:]):
            out[i, j] = _number(cell, f"{path}:{line}:{j + 2}")
    return names, out


def read_samples(path) -> SampleMatrix:
    rows = read_rows(path)
    if not rows:
        raise InputFormatError(f"{path}: empty file")
    names = tuple(c.strip() for c in rows[0])
    data = np.empty((len(rows) - 1, len(names)))
    for i, row in enumerate(rows[1:]):
        line = i + 2
        if len(row) != len(names):
            raise InputFormatError(f"{path}:{line}: expected {len(names)} columns, got {len(row)}")
        for j, cell in enumerate(row):
            data[i, j] = _number(cell, f"{path}:{line}:{j + 1}")
    if data.shape[0] < 1:
        raise InputFormatError(f"{path}: no observations")
    return SampleMatrix(names, data)


def write_matrix(path, names, values) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([""] + list(names))
        for name, row in zip(names, np.asarray(values)):
            w.writerow([name] + [repr(float(v)) for v in row])


def samples_to_csv(s: SampleMatrix) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(s.names)
    for row in s.values:
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def model_to_document(t: TreeModel) -> dict:
    names = t.leaf_names + t.hidden
    return {
        "schema_version": SCHEMA_VERSION,
        "leaves": [
            {"name": name, "mean": float(mu), "variance": float(var)}
            for name, mu, var in zip(t.leaf_names, t.leaf_means, t.leaf_variances)
        ],
        "hidden": [{"id": h} for h in t.hidden],
        "edges": [
            {"endpoint_a": names[a], "endpoint_b": names[b], "correlation": float(r)} for a, b, r in t.edges
        ],
        "root": names[t.root],
        "flags": {"degenerate": t.degenerate, "notes": list(t.notes)},
    }


def dumps_model(t: TreeModel) -> str:
    return json.dumps(model_to_document(t), indent=2) + "\n"


def _require(doc: dict, key: str, kind):
    if key not in doc:
        raise InputFormatError(f"model document is missing {key!r}")
    if not isinstance(doc[key], kind):
        raise InputFormatError(f"model document field {key!r} has the wrong type")
    return doc[key]


def document_to_model(doc: dict) -> TreeModel:
    """Parse a model document; raises :class:`InputFormatError` listing invariant violations."""
    if not isinstance(doc, dict):
        raise InputFormatError("model document must be a JSON object")
    version = _require(doc, "schema_version", int)
    if version != SCHEMA_VERSION:
        raise InputFormatError(f"unsupported schema_version {version}")
    try:
        leaves = _require(doc, "leaves", list)
        leaf_names = tuple(str(x["name"]) for x in leaves)
        means = tuple(float(x["mean"]) for x in leaves)
        variances = tuple(float(x["variance"]) for x in leaves)
        hidden = tuple(str(x["id"]) for x in _require(doc, "hidden", list))
        index = {name: i for i, name in enumerate(leaf_names + hidden)}
        edges = []
        for e in _require(doc, "edges", list):
            a, b = index[e["endpoint_a"]], index[e["endpoint_b"]]
            edges.append((min(a, b), max(a, b), float(e["correlation"])))
        root = index[_require(doc, "root", str)]
        flags = doc.get("flags", {})
        notes = tuple(str(x) for x in flags.get("notes", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"malformed model document: {exc!r}") from None
    n = len(leaf_names)
    coincident = tuple(
        sorted((max(a, b), min(a, b)) for a, b, r in edges if abs(r) == 1.0 and min(a, b) < n <= max(a, b))
    )
    model = TreeModel(leaf_names, means, variances, hidden, tuple(edges), root, coincident, notes)
    report = tree_is_valid(model)
    if not report:
        raise InputFormatError("invalid model: " + "; ".join(report.violations))
    return model


def loads_model(text: str) -> TreeModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return document_to_model(doc)


def read_model(path) -> TreeModel:
    return loads_model(Path(path).read_text())


def write_model(path, t: TreeModel) -> None:
    Path(path).write_text(dumps_model(t))
