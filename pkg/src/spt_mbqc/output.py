"""Deterministic JSON, JSON lines and CSV writers.

Floats are written with a fixed number of significant digits and complex
numbers as ``[re, im]`` pairs, so re-running a command with the same resolved
configuration produces byte-identical files.
"""

import csv
import io
import json
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, TextIO, Union

import numpy as np

from .errors import InvalidInput
from .numerics import format_float


def to_plain(value: Any) -> Any:
    """Convert numpy values, complex numbers and dataclasses to JSON types."""
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            stacked = np.stack([value.real, value.imag], axis=-1)
            return stacked.tolist()
        return value.tolist()
    if isinstance(value, np.generic):
        return to_plain(value.item())
    if isinstance(value, complex):
        return [value.real, value.imag]
    if is_dataclass(value) and not isinstance(value, type):
        return to_plain(asdict(value))
    if isinstance(value, Mapping):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, Path):
        return str(value)
    return value


def _encode(value: Any, digits: int, indent: Optional[int], level: int) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value, digits)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, list):
        # numeric arrays stay on one line
        return "[" + ", ".join(_encode(v, digits, None, level + 1) for v in value) + "]"
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            json.dumps(str(k), ensure_ascii=False)
            + ": "
            + _encode(v, digits, indent, level + 1)
            for k, v in value.items()
        ]
        if indent is None:
            return "{" + ", ".join(items) + "}"
        pad = " " * (indent * (level + 1))
        close = " " * (indent * level)
        return "{\n" + ",\n".join(pad + item for item in items) + "\n" + close + "}"
    raise InvalidInput(f"Cannot serialize value of type {type(value).__name__}")


def dumps(value: Any, digits: int = 17, indent: Optional[int] = 2) -> str:
    """Serialize ``value`` with fixed float formatting.

    Args:
        value: Any mix of dicts, lists, numpy arrays, dataclasses and scalars
        digits: Significant digits for floats
        indent: Indentation of nested objects, ``None`` for a single line

    Returns:
        JSON text
    """
    return _encode(to_plain(value), digits, indent, 0)


def jsonl_lines(records: Iterable[Any], digits: int = 17) -> List[str]:
    return [dumps(record, digits, indent=None) for record in records]


def write_text(text: str, out: Optional[Union[str, Path]] = None) -> Optional[Path]:
    """Write ``text`` to ``out`` (with a trailing newline) and return the path."""
    if out is None:
        return None
    path = Path(out)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text if text.endswith("\n") else text + "\n")
    return path


def write_json(value: Any, out: Union[str, Path], digits: int = 17) -> Path:
    return write_text(dumps(value, digits), out)


def write_jsonl(
    records: Iterable[Any], out: Union[str, Path], digits: int = 17
) -> Path:
    return write_text("\n".join(jsonl_lines(records, digits)), out)


def _cell(value: Any, digits: int) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format_float(float(value), digits)
    if value is None:
        return ""
    return str(value)


def csv_text(
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    header: Optional[Mapping[str, Any]] = None,
    digits: int = 17,
) -> str:
    """CSV with an optional ``# key = value`` comment header."""
    buffer = io.StringIO()
    if header:
        for key, value in header.items():
            if isinstance(value, str):
                shown = value
            else:
                shown = dumps(value, digits, indent=None)
            buffer.write(f"# {key} = {shown}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(value, digits) for value in row])
    return buffer.getvalue()


def write_csv(
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    out: Union[str, Path],
    header: Optional[Mapping[str, Any]] = None,
    digits: int = 17,
) -> Path:
    return write_text(csv_text(columns, rows, header, digits), out)


def read_csv(source: Union[str, Path, TextIO]) -> Dict[str, Any]:
    """Read a CSV written by :func:`write_csv` back into header and rows."""
    if isinstance(source, (str, Path)):
        text = Path(source).read_text()
    else:
        text = source.read()
    header: Dict[str, str] = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            header[key.strip()] = value.strip()
        elif line:
            body.append(line)
    reader = csv.DictReader(body)
    return {"header": header, "rows": list(reader)}


def complex_array(value: Any) -> np.ndarray:
    """Inverse of :func:`to_plain` for complex arrays (trailing ``[re, im]`` axis)."""
    array = np.asarray(value, dtype=float)
    if array.ndim == 0 or array.shape[-1] != 2:
        raise InvalidInput(f"Expected [re, im] pairs, got array of shape {array.shape}")
    return array[..., 0] + 1j * array[..., 1]
