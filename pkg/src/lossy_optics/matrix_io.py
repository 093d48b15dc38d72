"""Matrix literal formats.

Two interchangeable encodings of a complex matrix:

* JSON: an array of rows, each entry a ``[re, im]`` pair.
* Text: one row per line, whitespace-separated ``re+imj`` tokens.

Both use shortest round-trip float repr so that ``loads(dumps(m)) == m``
bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .linalg import as_matrix


class MatrixFormatError(ValueError):
    pass


def to_pairs(m) -> list[list[list[float]]]:
    m = as_matrix(m)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def from_pairs(data) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise MatrixFormatError("matrix must be a non-empty array of rows")
    rows = []
    for i, row in enumerate(data):
        if not isinstance(row, list) or not row:
            raise MatrixFormatError(f"row {i}: expected a non-empty array")
        parsed = []
        for j, entry in enumerate(row):
            if (not isinstance(entry, list) or len(entry) != 2
                    or not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                               for x in entry)):
                raise MatrixFormatError(f"entry [{i}][{j}]: expected [re, im], got {entry!r}")
            parsed.append(complex(entry[0], entry[1]))
        rows.append(parsed)
    if len({len(r) for r in rows}) != 1:
        raise MatrixFormatError("rows have differing lengths")
    try:
        return as_matrix(rows)
    except ValueError as exc:
        raise MatrixFormatError(str(exc)) from exc


def dumps_json(m) -> str:
    return json.dumps(to_pairs(m))


def loads_json(text: str) -> np.ndarray:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"invalid JSON: {exc}") from exc
    if isinstance(data, dict) and "matrix" in data:
        data = data["matrix"]
    return from_pairs(data)


def format_complex(z: complex) -> str:
    return f"{z.real!r}{'+' if np.copysign(1.0, z.imag) > 0 else '-'}{abs(z.imag)!r}j"


def dumps_text(m) -> str:
    m = as_matrix(m)
    return "".join(" ".join(format_complex(complex(z)) for z in row) + "\n" for row in m)


def loads_text(text: str) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        row = []
        for tok in tokens:
            try:
                row.append(complex(tok))
            except ValueError:
                raise MatrixFormatError(f"line {lineno}: bad complex token {tok!r}") from None
        rows.append(row)
    if not rows:
        raise MatrixFormatError("no matrix rows found")
    if len({len(r) for r in rows}) != 1:
        raise MatrixFormatError("rows have differing lengths")
    try:
        return as_matrix(rows)
    except ValueError as exc:
        raise MatrixFormatError(str(exc)) from exc


def load_matrix(path) -> np.ndarray:
    """Read a matrix file, choosing the format from content."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith(("[", "{")):
        return loads_json(text)
    return loads_text(text)


def save_matrix(m, path) -> None:
    path = Path(path)
    text = dumps_json(m) + "\n" if path.suffix == ".json" else dumps_text(m)
    path.write_text(text, encoding="utf-8", newline="\n")
