"""Text formatting shared by the file writers: floats at 17 significant digits."""
from __future__ import annotations

import json
import math


def fmt_float(x: float | None) -> str:
    if x is None:
        return ""
    return format(float(x), ".17g")


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        return fmt_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{_encode(v, indent, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return _encode(obj.item(), indent, level)
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps_json(obj, indent: int = 2) -> str:
    """JSON text with every float written at 17 significant digits."""
    return _encode(obj, indent, 0) + "\n"
