import csv
import io
import json
import os
from typing import Any, Iterable, Sequence
import numpy as np
from services.printr import Printr

printr = Printr()


def format_value(value: Any) -> str:
    """Floats get 17 significant digits so values round-trip exactly."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if value is None:
        return ""
    return str(value)


def to_jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"Row has {len(row)} columns, header has {len(header)}")
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def write_csv(path: str | None, header: Sequence[str], rows: Iterable[Sequence[Any]]):
    """Writes a CSV file, or prints it to stdout when no path is given."""
    text = render_csv(header, rows)
    _emit(path, text)


def write_json(path: str | None, content: Any, compact: bool = False):
    if compact:
        text = json.dumps(to_jsonable(content), separators=(",", ":")) + "\n"
    else:
        text = json.dumps(to_jsonable(content), indent=2) + "\n"
    _emit(path, text)


def write_coo(path: str | None, matrix: np.ndarray):
    """Upper-triangular `i j value` lines, 0-based indices."""
    lines = []
    for i in range(matrix.shape[0]):
        for j in range(i, matrix.shape[1]):
            lines.append(f"{i} {j} {format_value(matrix[i, j])}")
    _emit(path, "\n".join(lines) + "\n")


def _emit(path: str | None, text: str):
    if path is None:
        printr.print(text.rstrip("\n"))
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="UTF-8", newline="") as stream:
        stream.write(text)
    printr.print_debug(f"Wrote {path}")
