"""JSON encoding for table values.

Frames use the wire shape ``{"columns": [...], "index": [...],
"data": [[row-major cells...]...], "dtypes": [...]}``; the optional
dtypes array disambiguates int from float columns when the JSON numbers
alone would not.  Series, scalars and containers get small tagged
wrappers so every Value round-trips.
"""

from __future__ import annotations

from .values import Cell, FrameValue, SeriesValue, Value, is_cell


def _column_dtype(values: tuple[Cell, ...]) -> str:
    kinds = set()
    for v in values:
        if v is None:
            continue
        if isinstance(v, bool):
            kinds.add("bool")
        elif isinstance(v, int):
            kinds.add("int")
        elif isinstance(v, float):
            kinds.add("float")
        else:
            kinds.add("str")
    if not kinds:
        return "null"
    if len(kinds) == 1:
        return kinds.pop()
    if kinds == {"int", "float"}:
        return "float"
    return "mixed"


def _coerce(cell, dtype: str) -> Cell:
    if cell is None:
        return None
    if dtype == "int" and not isinstance(cell, bool):
        return int(cell)
    if dtype == "float":
        return float(cell)
    return cell


def frame_to_json(frame: FrameValue) -> dict:
    return {
        "columns": list(frame.names),
        "index": list(frame.index),
        "data": [list(frame.row(i)) for i in range(frame.n_rows)],
        "dtypes": [_column_dtype(values) for _, values in frame.columns],
    }


def frame_from_json(obj: dict) -> FrameValue:
    names = obj["columns"]
    data = obj["data"]
    index = obj.get("index", list(range(len(data))))
    dtypes = obj.get("dtypes")
    cols: list[tuple[str, tuple[Cell, ...]]] = []
    for j, name in enumerate(names):
        values = [row[j] for row in data]
        if dtypes and j < len(dtypes) and dtypes[j] in ("int", "float"):
            values = [_coerce(v, dtypes[j]) for v in values]
        cols.append((str(name), tuple(values)))
    return FrameValue(tuple(cols), tuple(index))


def value_to_json(value: Value):
    if isinstance(value, FrameValue):
        return frame_to_json(value)
    if isinstance(value, SeriesValue):
        return {
            "name": value.name,
            "index": list(value.index),
            "values": list(value.values),
        }
    if isinstance(value, list):
        return {"list": [value_to_json(v) for v in value]}
    if isinstance(value, dict):
        return {"dict": [[k, value_to_json(v)] for k, v in value.items()]}
    if is_cell(value):
        return {"scalar": value}
    raise TypeError(f"not a serializable value: {value!r}")


def value_from_json(obj) -> Value:
    if is_cell(obj):
        return obj
    if isinstance(obj, list):
        return [value_from_json(v) for v in obj]
    if isinstance(obj, dict):
        if "columns" in obj and "data" in obj:
            return frame_from_json(obj)
        if "values" in obj:
            values = obj["values"]
            index = obj.get("index", list(range(len(values))))
            return SeriesValue(tuple(values), tuple(index), obj.get("name"))
        if "scalar" in obj:
            return obj["scalar"]
        if "list" in obj:
            return [value_from_json(v) for v in obj["list"]]
        if "dict" in obj:
            return {k: value_from_json(v) for k, v in obj["dict"]}
    raise ValueError(f"unrecognized value encoding: {obj!r}")
