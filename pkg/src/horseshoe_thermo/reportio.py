"""Deterministic report serialization: JSON with 17-significant-digit floats,
CSV tables, and byte-stable ordering."""

from __future__ import annotations

import math
from pathlib import Path


def format_float(x: float, sig: int = 17) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format(x, f".{sig}g")
    return repr(x)


def dumps(obj, sig: int = 17, indent: int = 0) -> str:
    """JSON text with deterministic key order and pinned float formatting."""
    pad = " " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj, sig)
    if isinstance(obj, str):
        escaped = (
            obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        )
        return f'"{escaped}"'
    if isinstance(obj, dict):
        items = [
            f'{pad}  "{k}": {dumps(v, sig, indent + 2)}' for k, v in obj.items()
        ]
        if not items:
            return "{}"
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        items = [f"{pad}  {dumps(v, sig, indent + 2)}" for v in obj]
        if not items:
            return "[]"
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    # numpy scalars and arrays
    try:
        import numpy as np

        if isinstance(obj, np.integer):
            return str(int(obj))
        if isinstance(obj, np.floating):
            return format_float(float(obj), sig)
        if isinstance(obj, np.ndarray):
            return dumps(obj.tolist(), sig, indent)
    except ImportError:
        pass
    raise TypeError(f"cannot serialize {type(obj)}")


def write_json(path: str | Path, obj, sig: int = 17) -> None:
    Path(path).write_text(dumps(obj, sig) + "\n")


def write_csv(path: str | Path, header: list[str], rows, sig: int = 17) -> None:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, float):
                cells.append(format(cell, f".{sig}g"))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")
