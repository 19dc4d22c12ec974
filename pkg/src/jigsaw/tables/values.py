"""In-memory tabular values: frames, series, scalar cells and containers.

Cells are plain Python values (int, float, str, bool, None); None plays
the role of a missing value.  Frames and series are immutable snapshots:
every operation builds a new value, which is what lets the evaluator
guarantee isolation on error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

Cell = Union[int, float, str, bool, None]


class EvalError(Exception):
    """Evaluation failure; ``kind`` decides which repairs apply downstream."""

    KINDS = (
        "unknown_name", "unknown_member", "bad_argument", "type_mismatch",
        "ambiguous_truth", "step_limit", "missing_file",
    )

    def __init__(self, kind: str, message: str, node=None):
        assert kind in self.KINDS, kind
        self.kind = kind
        self.message = message
        self.node = node
        super().__init__(f"{kind}: {message}")


@dataclass(frozen=True)
class FrameValue:
    """Ordered named columns over a shared row index."""

    columns: tuple[tuple[str, tuple[Cell, ...]], ...]
    index: tuple[Cell, ...]

    def __post_init__(self):
        names = [n for n, _ in self.columns]
        if len(set(names)) != len(names):
            raise ValueError("duplicate column names")
        for name, values in self.columns:
            if len(values) != len(self.index):
                raise ValueError(f"column {name!r} length != index length")

    @classmethod
    def make(cls, data: dict[str, list], index: Optional[list] = None) -> "FrameValue":
        n_rows = len(next(iter(data.values()))) if data else 0
        idx = tuple(index) if index is not None else tuple(range(n_rows))
        return cls(tuple((k, tuple(v)) for k, v in data.items()), idx)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.columns)

    @property
    def n_rows(self) -> int:
        return len(self.index)

    def column(self, name: str) -> tuple[Cell, ...]:
        for n, values in self.columns:
            if n == name:
                return values
        raise KeyError(name)

    def has_column(self, name: str) -> bool:
        return any(n == name for n, _ in self.columns)

    def row(self, i: int) -> tuple[Cell, ...]:
        return tuple(values[i] for _, values in self.columns)

    def take(self, positions: list[int]) -> "FrameValue":
        cols = tuple(
            (n, tuple(values[i] for i in positions)) for n, values in self.columns
        )
        return FrameValue(cols, tuple(self.index[i] for i in positions))

    def with_column(self, name: str, values: tuple[Cell, ...]) -> "FrameValue":
        if self.has_column(name):
            cols = tuple(
                (n, values if n == name else v) for n, v in self.columns
            )
        else:
            cols = self.columns + ((name, values),)
        return FrameValue(cols, self.index)


@dataclass(frozen=True)
class SeriesValue:
    """One-dimensional labeled array."""

    values: tuple[Cell, ...]
    index: tuple[Cell, ...]
    name: Optional[str] = None

    def __post_init__(self):
        if len(self.values) != len(self.index):
            raise ValueError("series values/index length mismatch")

    @classmethod
    def make(cls, values: list, index: Optional[list] = None, name: Optional[str] = None) -> "SeriesValue":
        idx = tuple(index) if index is not None else tuple(range(len(values)))
        return cls(tuple(values), idx, name)

    @property
    def n_rows(self) -> int:
        return len(self.values)


Value = Union[FrameValue, SeriesValue, Cell, list, dict]


@dataclass
class Env:
    """Named value bindings plus a virtual-file registry for read_csv."""

    bindings: dict[str, Value] = field(default_factory=dict)
    virtual_files: dict[str, FrameValue] = field(default_factory=dict)

    def copy(self) -> "Env":
        return Env(dict(self.bindings), dict(self.virtual_files))


def kind_of(value: Value) -> str:
    if isinstance(value, FrameValue):
        return "frame"
    if isinstance(value, SeriesValue):
        return "series"
    if isinstance(value, list):
        return "list"
    if isinstance(value, dict):
        return "dict"
    return "scalar"


def is_cell(value) -> bool:
    return value is None or isinstance(value, (bool, int, float, str))


def _cells_equal(a: Cell, b: Cell, tol: float) -> bool:
    if a is None or b is None:
        return a is None and b is None
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return abs(a - b) <= tol
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    return False


def values_equal(a: Value, b: Value, float_tol: float = 1e-9) -> bool:
    """Deep equality used for I/O checking.

    Frames must agree on ordered column names, index sequence and every
    cell; ints and floats compare within ``float_tol``; Null equals Null.
    Cross-variant comparisons are False, never an error.
    """
    if isinstance(a, FrameValue) or isinstance(b, FrameValue):
        if not (isinstance(a, FrameValue) and isinstance(b, FrameValue)):
            return False
        if a.names != b.names or len(a.index) != len(b.index):
            return False
        if not all(_cells_equal(x, y, float_tol) for x, y in zip(a.index, b.index)):
            return False
        for (_, va), (_, vb) in zip(a.columns, b.columns):
            if not all(_cells_equal(x, y, float_tol) for x, y in zip(va, vb)):
                return False
        return True
    if isinstance(a, SeriesValue) or isinstance(b, SeriesValue):
        if not (isinstance(a, SeriesValue) and isinstance(b, SeriesValue)):
            return False
        if len(a.values) != len(b.values):
            return False
        if a.name is not None and b.name is not None and a.name != b.name:
            return False
        return all(
            _cells_equal(x, y, float_tol) for x, y in zip(a.index, b.index)
        ) and all(_cells_equal(x, y, float_tol) for x, y in zip(a.values, b.values))
    if isinstance(a, list) or isinstance(b, list):
        if not (isinstance(a, list) and isinstance(b, list)) or len(a) != len(b):
            return False
        return all(values_equal(x, y, float_tol) for x, y in zip(a, b))
    if isinstance(a, dict) or isinstance(b, dict):
        if not (isinstance(a, dict) and isinstance(b, dict)):
            return False
        if set(a.keys()) != set(b.keys()):
            return False
        return all(values_equal(a[k], b[k], float_tol) for k in a)
    return _cells_equal(a, b, float_tol)
