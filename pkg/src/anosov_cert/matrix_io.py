"""Plain-text matrix files.

One matrix per block: d rows of d whitespace-separated decimals.  Blocks
are separated by blank lines and lines starting with ``#`` are comments.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

import numpy as np


class MatrixFormatError(ValueError):
    pass


def parse_matrices(text: str) -> list[np.ndarray]:
    blocks: list[list[list[float]]] = []
    current: list[list[float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            if current:
                blocks.append(current)
                current = []
            continue
        try:
            current.append([float(tok) for tok in line.split()])
        except ValueError as exc:
            raise MatrixFormatError(f"line {lineno}: {exc}") from None
    if current:
        blocks.append(current)
    if not blocks:
        raise MatrixFormatError("no matrices found")

    out = []
    for n, rows in enumerate(blocks, start=1):
        d = len(rows)
        if any(len(r) != d for r in rows):
            raise MatrixFormatError(f"matrix {n} is not square ({d} rows)")
        out.append(np.array(rows, dtype=float))
    if len({m.shape for m in out}) != 1:
        raise MatrixFormatError("matrices have different sizes")
    return out


def read_matrices(path: "str | Path") -> list[np.ndarray]:
    return parse_matrices(Path(path).read_text(encoding="utf-8"))


def format_matrices(matrices: Iterable[np.ndarray], comments: Iterable[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    for i, m in enumerate(matrices):
        if i or lines:
            lines.append("")
        lines.extend(" ".join(format(float(x), ".17g") for x in row) for row in np.asarray(m))
    return "\n".join(lines) + "\n"


def write_matrices(path: "str | Path", matrices: Iterable[np.ndarray], comments: Iterable[str] = ()) -> None:
    Path(path).write_text(format_matrices(matrices, comments), encoding="utf-8")
