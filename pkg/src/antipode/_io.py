"""Deterministic JSON emission and number parsing for the two numeric regimes.

Floats are written with 17 significant digits (full float64 precision, so
payloads round-trip bit-exactly), rationals as "p/q" strings. Keys are
sorted, which together with the fixed float format makes payloads
byte-identical across runs for identical inputs.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from fractions import Fraction
from typing import Any

Real = int | float | Fraction


def parse_number(value: Any, *, exact: bool) -> Real:
    """Parse a JSON-ish scalar into the requested numeric regime.

    Accepts int, float, Fraction, and strings like "5/9" or "0.25". In exact
    mode floats are read through their decimal literal (str(x)), so a JSON
    0.8 becomes Fraction(4, 5), not the binary expansion.
    """
    if isinstance(value, bool):
        raise TypeError("boolean is not a number")
    if exact:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError(f"non-finite number {value!r}")
            return Fraction(str(value))
        if isinstance(value, str):
            return Fraction(value)
        raise TypeError(f"cannot parse {value!r} as a rational")
    if isinstance(value, Fraction):
        return float(value)
    if isinstance(value, (int, float)):
        out = float(value)
    elif isinstance(value, str):
        out = float(Fraction(value))
    else:
        raise TypeError(f"cannot parse {value!r} as a number")
    if not math.isfinite(out):
        raise ValueError(f"non-finite number {value!r}")
    return out


def number_to_json(x: Real) -> int | float | str:
    """Render a number for a JSON payload (Fractions become "p/q" strings)."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return int(x)
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return x
    return float(x)


def dumps(payload: Any, *, indent: int = 2) -> str:
    """Serialize with sorted keys and 17-significant-digit floats."""
    return _emit(payload, indent, 0) + "\n"


def _emit(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    close_pad = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, Fraction):
        return json.dumps(number_to_json(obj))
    if isinstance(obj, int):
        return repr(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError("non-finite float in payload")
        return format(obj, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for key in sorted(obj):
            if not isinstance(key, str):
                raise TypeError(f"non-string key {key!r}")
            items.append(f"{pad}{json.dumps(key)}: {_emit(obj[key], indent, level + 1)}")
        return "{\n" + ",\n".join(items) + "\n" + close_pad + "}"
    if isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            return "[]"
        flat = all(isinstance(v, (int, float, Fraction, str)) and not isinstance(v, bool) for v in seq)
        if flat:
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in seq) + "]"
        items = [f"{pad}{_emit(v, indent, level + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + close_pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_atomic(path: str, text: str) -> None:
    """Write via a temp file in the same directory plus rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
