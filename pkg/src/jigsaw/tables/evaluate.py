"""Deterministic evaluator for programs over table values.

Evaluation runs against a scratch copy of the environment and commits
only on success, so a failing program never mutates the caller's Env.
Elementwise semantics follow the mainstream dataframe library:
comparisons on series yield boolean series, ``|``/``&`` are elementwise,
subscripting a frame with an aligned boolean series filters rows, and a
chained comparison over a series raises the ambiguous-truth error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..lang import ast as A
from . import catalog
from .values import Cell, Env, EvalError, FrameValue, SeriesValue, Value, is_cell

DEFAULT_STEP_LIMIT = 100_000

_FRAME_METHODS = catalog.method_names("frame")
_SERIES_METHODS = catalog.method_names("series")
_STR_METHODS = catalog.method_names("str")
_ROLLING_METHODS = catalog.method_names("rolling")


# internal callables; these never land in an Env
@dataclass
class _Method:
    receiver: object
    receiver_kind: str
    name: str


@dataclass
class _StrAccessor:
    series: SeriesValue


@dataclass
class _Rolling:
    series: SeriesValue
    window: int


class _PdModule:
    pass


@dataclass
class _SliceVal:
    lower: Optional[Value]
    upper: Optional[Value]

    @property
    def is_full(self) -> bool:
        return self.lower is None and self.upper is None


def _is_bool_series(s: SeriesValue) -> bool:
    return all(v is None or isinstance(v, bool) for v in s.values)


def _is_numeric(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


class _Evaluator:
    def __init__(self, env: Env, step_limit: int):
        self.bindings: dict[str, Value] = dict(env.bindings)
        self.files = env.virtual_files
        self.steps = 0
        self.limit = step_limit

    # ------------------------------------------------------------------

    def run(self, program: A.Program) -> Env:
        for stmt in program.stmts:
            if isinstance(stmt, A.Assign):
                value = self.eval(stmt.value)
                self.assign(stmt.target, value, stmt)
            else:
                self.eval(stmt.value)
        return Env(self.bindings, dict(self.files))

    def tick(self, node) -> None:
        self.steps += 1
        if self.steps > self.limit:
            raise EvalError("step_limit", f"exceeded {self.limit} node evaluations", node)

    # ------------------------------------------------------------------
    # expressions

    def eval(self, e: A.Expr):
        self.tick(e)
        if isinstance(e, A.NameRef):
            if e.id in self.bindings:
                return self.bindings[e.id]
            if e.id == "pd":
                return _PdModule()
            raise EvalError("unknown_name", f"name {e.id!r} is not defined", e)
        if isinstance(e, A.Literal):
            return e.value
        if isinstance(e, A.Attr):
            return self.eval_attr(e)
        if isinstance(e, A.Subscript):
            return self.eval_subscript(e)
        if isinstance(e, A.Call):
            return self.eval_call(e)
        if isinstance(e, A.Unary):
            return self.eval_unary(e)
        if isinstance(e, A.Binary):
            return self.eval_binary(e)
        if isinstance(e, A.CompareChain):
            return self.eval_compare(e)
        if isinstance(e, A.ListLit):
            return [self.eval(x) for x in e.items]
        if isinstance(e, A.DictLit):
            out = {}
            for k, v in e.pairs:
                key = self.eval(k)
                if not is_cell(key):
                    raise EvalError("bad_argument", "dict keys must be scalar", e)
                out[key] = self.eval(v)
            return out
        if isinstance(e, A.TupleLit):
            return tuple(self.eval(x) for x in e.items)
        if isinstance(e, A.Slice):
            lo = self.eval(e.lower) if e.lower is not None else None
            up = self.eval(e.upper) if e.upper is not None else None
            return _SliceVal(lo, up)
        raise EvalError("bad_argument", f"cannot evaluate {type(e).__name__}", e)

    def eval_attr(self, e: A.Attr):
        base = self.eval(e.base)
        name = e.name
        if isinstance(base, _PdModule):
            if name == "read_csv":
                return _Method(base, "top", "read_csv")
            raise EvalError("unknown_member", f"pd has no member {name!r}", e)
        if isinstance(base, FrameValue):
            if name == "index":
                return SeriesValue(base.index, base.index, None)
            if name in _FRAME_METHODS:
                return _Method(base, "frame", name)
            if base.has_column(name):
                return SeriesValue(base.column(name), base.index, name)
            raise EvalError("unknown_member", f"frame has no member {name!r}", e)
        if isinstance(base, SeriesValue):
            if name == "str":
                return _StrAccessor(base)
            if name == "index":
                return SeriesValue(base.index, base.index, None)
            if name in _SERIES_METHODS:
                return _Method(base, "series", name)
            raise EvalError("unknown_member", f"series has no member {name!r}", e)
        if isinstance(base, _StrAccessor):
            if name in _STR_METHODS:
                return _Method(base.series, "str", name)
            raise EvalError("unknown_member", f"str accessor has no member {name!r}", e)
        if isinstance(base, _Rolling):
            if name in _ROLLING_METHODS:
                return _Method(base, "rolling", name)
            raise EvalError("unknown_member", f"rolling has no member {name!r}", e)
        raise EvalError("unknown_member", f"value has no member {name!r}", e)

    def eval_subscript(self, e: A.Subscript):
        # loc/iloc need the raw key expression, not its value
        if isinstance(e.base, A.Attr) and e.base.name in ("loc", "iloc"):
            container = self.eval(e.base.base)
            if not isinstance(container, FrameValue):
                raise EvalError("bad_argument", f"{e.base.name} on a non-frame", e)
            key = self.eval(e.key)
            if e.base.name == "loc":
                return self.loc_get(container, key, e)
            return self.iloc_get(container, key, e)
        base = self.eval(e.base)
        key = self.eval(e.key)
        if isinstance(base, FrameValue):
            if isinstance(key, str):
                if not base.has_column(key):
                    raise EvalError("bad_argument", f"no column {key!r}", e)
                return SeriesValue(base.column(key), base.index, key)
            if isinstance(key, SeriesValue):
                return self.filter_frame(base, key, e)
            if isinstance(key, list):
                if all(isinstance(k, str) for k in key):
                    missing = [k for k in key if not base.has_column(k)]
                    if missing:
                        raise EvalError("bad_argument", f"no column {missing[0]!r}", e)
                    cols = tuple((k, base.column(k)) for k in key)
                    return FrameValue(cols, base.index)
                raise EvalError("bad_argument", "list subscript must name columns", e)
            raise EvalError("bad_argument", "unsupported frame subscript", e)
        if isinstance(base, SeriesValue):
            if isinstance(key, SeriesValue):
                return self.filter_series(base, key, e)
            raise EvalError("bad_argument", "unsupported series subscript", e)
        if isinstance(base, dict):
            if is_cell(key) and key in base:
                return base[key]
            raise EvalError("bad_argument", f"missing dict key {key!r}", e)
        if isinstance(base, list):
            if isinstance(key, int) and not isinstance(key, bool) and -len(base) <= key < len(base):
                return base[key]
            raise EvalError("bad_argument", "bad list subscript", e)
        raise EvalError("bad_argument", "value is not subscriptable", e)

    def eval_call(self, e: A.Call):
        callee = self.eval(e.callee)
        if not isinstance(callee, _Method):
            raise EvalError("bad_argument", "value is not callable", e)
        args = [self.eval(a) for a in e.args]
        kwargs = {}
        for k, v in e.kwargs:
            if k in kwargs:
                raise EvalError("bad_argument", f"duplicate keyword {k!r}", e)
            kwargs[k] = self.eval(v)
        return self.dispatch(callee, args, kwargs, e)

    def eval_unary(self, e: A.Unary):
        v = self.eval(e.operand)
        if e.op == A.BITNOT:
            if isinstance(v, SeriesValue):
                return SeriesValue(
                    tuple(self.cell_bitnot(c, e) for c in v.values), v.index, v.name
                )
            return self.cell_bitnot(v, e)
        if isinstance(v, SeriesValue):
            return SeriesValue(
                tuple(self.cell_neg(c, e) for c in v.values), v.index, v.name
            )
        return self.cell_neg(v, e)

    def cell_bitnot(self, v, node):
        if v is None:
            return None
        if isinstance(v, bool):
            return not v
        if isinstance(v, int):
            return ~v
        raise EvalError("type_mismatch", f"~ needs bool or int, got {type(v).__name__}", node)

    def cell_neg(self, v, node):
        if v is None:
            return None
        if _is_numeric(v):
            return -v
        raise EvalError("type_mismatch", f"- needs a number, got {type(v).__name__}", node)

    def eval_binary(self, e: A.Binary):
        left = self.eval(e.left)
        right = self.eval(e.right)
        return self.binary_values(e.op, left, right, e)

    def binary_values(self, op: str, left, right, node):
        if isinstance(left, SeriesValue) or isinstance(right, SeriesValue):
            return self.elementwise(op, left, right, node)
        return self.cell_binary(op, left, right, node)

    def elementwise(self, op: str, left, right, node):
        if isinstance(left, SeriesValue) and isinstance(right, SeriesValue):
            if left.index != right.index:
                raise EvalError("type_mismatch", "series indexes are not aligned", node)
            values = tuple(
                self.cell_binary(op, a, b, node)
                for a, b in zip(left.values, right.values)
            )
            name = left.name if left.name == right.name else None
            return SeriesValue(values, left.index, name)
        if isinstance(left, SeriesValue):
            values = tuple(self.cell_binary(op, a, right, node) for a in left.values)
            return SeriesValue(values, left.index, left.name)
        values = tuple(self.cell_binary(op, left, b, node) for b in right.values)
        return SeriesValue(values, right.index, right.name)

    def cell_binary(self, op: str, a, b, node):
        if a is None or b is None:
            return None
        if op in (A.OR, A.AND):
            if isinstance(a, bool) and isinstance(b, bool):
                return (a or b) if op == A.OR else (a and b)
            if isinstance(a, (bool, int)) and isinstance(b, (bool, int)):
                return (int(a) | int(b)) if op == A.OR else (int(a) & int(b))
            raise EvalError("type_mismatch", "| and & need bool or int operands", node)
        if isinstance(a, str) and isinstance(b, str) and op == A.ADD:
            return a + b
        if not (_is_numeric(a) and _is_numeric(b)):
            raise EvalError(
                "type_mismatch",
                f"arithmetic needs numbers, got {type(a).__name__} and {type(b).__name__}",
                node,
            )
        try:
            if op == A.ADD:
                return a + b
            if op == A.SUB:
                return a - b
            if op == A.MUL:
                return a * b
            if op == A.DIV:
                return a / b
            if op == A.MOD:
                return a % b
        except ZeroDivisionError:
            raise EvalError("bad_argument", "division by zero", node) from None
        raise EvalError("bad_argument", f"unknown operator {op}", node)

    def eval_compare(self, e: A.CompareChain):
        operands = [self.eval(x) for x in e.operands]
        results = []
        for op, a, b in zip(e.ops, operands, operands[1:]):
            results.append(self.compare_values(op, a, b, e))
        if len(results) == 1:
            return results[0]
        # Python chains comparisons with `and`; a series has no truth value
        if any(isinstance(r, SeriesValue) for r in results):
            raise EvalError(
                "ambiguous_truth",
                "truth value of a series is ambiguous in a chained comparison",
                e,
            )
        return all(results)

    def compare_values(self, op: str, a, b, node):
        if isinstance(a, SeriesValue) or isinstance(b, SeriesValue):
            if isinstance(a, SeriesValue) and isinstance(b, SeriesValue):
                if a.index != b.index:
                    raise EvalError("type_mismatch", "series indexes are not aligned", node)
                values = tuple(
                    self.cell_compare(op, x, y, node) for x, y in zip(a.values, b.values)
                )
                return SeriesValue(values, a.index, None)
            if isinstance(a, SeriesValue):
                values = tuple(self.cell_compare(op, x, b, node) for x in a.values)
                return SeriesValue(values, a.index, None)
            values = tuple(self.cell_compare(op, a, y, node) for y in b.values)
            return SeriesValue(values, b.index, None)
        return self.cell_compare(op, a, b, node)

    def cell_compare(self, op: str, a, b, node) -> bool:
        # missing values compare False, like NaN
        if a is None or b is None:
            return op == "ne" and not (a is None and b is None)
        same_family = (
            (_is_numeric(a) and _is_numeric(b))
            or (isinstance(a, str) and isinstance(b, str))
            or (isinstance(a, bool) and isinstance(b, bool))
        )
        if op == "eq":
            return same_family and a == b
        if op == "ne":
            return not (same_family and a == b)
        if not same_family:
            raise EvalError(
                "type_mismatch",
                f"cannot order {type(a).__name__} and {type(b).__name__}",
                node,
            )
        if op == "lt":
            return a < b
        if op == "le":
            return a <= b
        if op == "gt":
            return a > b
        if op == "ge":
            return a >= b
        raise EvalError("bad_argument", f"unknown comparison {op}", node)

    # ------------------------------------------------------------------
    # frame helpers

    def mask_positions(self, frame_index: tuple, mask: SeriesValue, node) -> list[int]:
        if not _is_bool_series(mask):
            raise EvalError("type_mismatch", "filter mask must be boolean", node)
        if mask.index != frame_index:
            raise EvalError("type_mismatch", "mask index is not aligned", node)
        return [i for i, v in enumerate(mask.values) if v is True]

    def filter_frame(self, frame: FrameValue, mask: SeriesValue, node) -> FrameValue:
        return frame.take(self.mask_positions(frame.index, mask, node))

    def filter_series(self, series: SeriesValue, mask: SeriesValue, node) -> SeriesValue:
        positions = self.mask_positions(series.index, mask, node)
        return SeriesValue(
            tuple(series.values[i] for i in positions),
            tuple(series.index[i] for i in positions),
            series.name,
        )

    def loc_get(self, frame: FrameValue, key, node):
        if isinstance(key, SeriesValue):
            return self.filter_frame(frame, key, node)
        if isinstance(key, tuple) and len(key) == 2:
            row_sel, col_sel = key
            rows = self.loc_rows(frame, row_sel, node)
            return self.loc_select(frame, rows, col_sel, row_sel, node)
        if is_cell(key):
            rows = self.loc_rows(frame, key, node)
            if len(rows) == 1:
                i = rows[0]
                return SeriesValue(frame.row(i), frame.names, None)
            return frame.take(rows)
        raise EvalError("bad_argument", "unsupported loc key", node)

    def loc_rows(self, frame: FrameValue, row_sel, node) -> list[int]:
        if isinstance(row_sel, SeriesValue):
            return self.mask_positions(frame.index, row_sel, node)
        if isinstance(row_sel, _SliceVal):
            if row_sel.is_full:
                return list(range(frame.n_rows))
            raise EvalError("bad_argument", "bounded slices are not supported in loc", node)
        if is_cell(row_sel):
            rows = [i for i, label in enumerate(frame.index) if label == row_sel]
            if not rows:
                raise EvalError("bad_argument", f"label {row_sel!r} not in index", node)
            return rows
        raise EvalError("bad_argument", "unsupported loc row selector", node)

    def loc_select(self, frame, rows, col_sel, row_sel, node):
        scalar_row = is_cell(row_sel) and not isinstance(row_sel, _SliceVal)
        if isinstance(col_sel, _SliceVal) and col_sel.is_full:
            sub = frame.take(rows)
            if scalar_row and len(rows) == 1:
                return SeriesValue(sub.row(0), sub.names, None)
            return sub
        if isinstance(col_sel, str):
            if not frame.has_column(col_sel):
                raise EvalError("bad_argument", f"no column {col_sel!r}", node)
            values = frame.column(col_sel)
            if scalar_row and len(rows) == 1:
                return values[rows[0]]
            return SeriesValue(
                tuple(values[i] for i in rows),
                tuple(frame.index[i] for i in rows),
                col_sel,
            )
        if isinstance(col_sel, list) and all(isinstance(c, str) for c in col_sel):
            sub = frame.take(rows)
            cols = tuple((c, sub.column(c)) for c in col_sel if sub.has_column(c))
            if len(cols) != len(col_sel):
                raise EvalError("bad_argument", "unknown column in loc selector", node)
            return FrameValue(cols, sub.index)
        raise EvalError("bad_argument", "unsupported loc column selector", node)

    def iloc_get(self, frame: FrameValue, key, node):
        if isinstance(key, tuple) and len(key) == 2:
            i, j = key
            if not isinstance(i, int) or isinstance(i, bool):
                raise EvalError("bad_argument", "iloc positions must be integers", node)
            if not isinstance(j, int) or isinstance(j, bool):
                raise EvalError("bad_argument", "iloc positions must be integers", node)
            if not (-frame.n_rows <= i < frame.n_rows):
                raise EvalError("bad_argument", f"row position {i} out of range", node)
            if not (-len(frame.columns) <= j < len(frame.columns)):
                raise EvalError("bad_argument", f"column position {j} out of range", node)
            return frame.columns[j][1][i]
        if isinstance(key, int) and not isinstance(key, bool):
            if not (-frame.n_rows <= key < frame.n_rows):
                raise EvalError("bad_argument", f"row position {key} out of range", node)
            i = key % frame.n_rows
            return SeriesValue(frame.row(i), frame.names, None)
        raise EvalError("bad_argument", "iloc positions must be integers", node)

    # ------------------------------------------------------------------
    # assignment

    def assign(self, target: A.Expr, value, node) -> None:
        if isinstance(value, (_Method, _StrAccessor, _Rolling, _PdModule, _SliceVal)):
            raise EvalError("bad_argument", "cannot assign an internal helper value", node)
        if isinstance(value, tuple):
            value = list(value)
        if isinstance(target, A.NameRef):
            self.bindings[target.id] = value
            return
        assert isinstance(target, A.Subscript)
        base = target.base
        if isinstance(base, A.NameRef):
            frame = self.bindings.get(base.id)
            if not isinstance(frame, FrameValue):
                raise EvalError("bad_argument", "subscript assignment needs a frame", node)
            key = self.eval(target.key)
            if not isinstance(key, str):
                raise EvalError("bad_argument", "column assignment key must be a string", node)
            self.bindings[base.id] = self.set_column(frame, key, value, node)
            return
        if isinstance(base, A.Attr) and base.name in ("loc", "iloc") and isinstance(base.base, A.NameRef):
            root = base.base.id
            frame = self.bindings.get(root)
            if not isinstance(frame, FrameValue):
                raise EvalError("bad_argument", f"{base.name} assignment needs a frame", node)
            key = self.eval(target.key)
            if base.name == "loc":
                self.bindings[root] = self.loc_set(frame, key, value, node)
            else:
                self.bindings[root] = self.iloc_set(frame, key, value, node)
            return
        raise EvalError("bad_argument", "unsupported assignment target", node)

    def set_column(self, frame: FrameValue, name: str, value, node) -> FrameValue:
        if isinstance(value, SeriesValue):
            if value.index != frame.index:
                raise EvalError("type_mismatch", "column assignment is not aligned", node)
            return frame.with_column(name, value.values)
        if isinstance(value, list):
            if len(value) != frame.n_rows:
                raise EvalError("type_mismatch", "column assignment length mismatch", node)
            if not all(is_cell(v) for v in value):
                raise EvalError("bad_argument", "column cells must be scalar", node)
            return frame.with_column(name, tuple(value))
        if is_cell(value):
            return frame.with_column(name, tuple(value for _ in range(frame.n_rows)))
        raise EvalError("bad_argument", "unsupported column assignment value", node)

    def loc_set(self, frame: FrameValue, key, value, node) -> FrameValue:
        if not (isinstance(key, tuple) and len(key) == 2):
            raise EvalError("bad_argument", "loc assignment needs (rows, column)", node)
        row_sel, col = key
        if not isinstance(col, str) or not frame.has_column(col):
            raise EvalError("bad_argument", "loc assignment needs an existing column", node)
        if not is_cell(value):
            raise EvalError("bad_argument", "loc assignment value must be scalar", node)
        rows = self.loc_rows(frame, row_sel, node)
        values = list(frame.column(col))
        for i in rows:
            values[i] = value
        return frame.with_column(col, tuple(values))

    def iloc_set(self, frame: FrameValue, key, value, node) -> FrameValue:
        if not (isinstance(key, tuple) and len(key) == 2):
            raise EvalError("bad_argument", "iloc assignment needs (row, column)", node)
        i, j = key
        if not isinstance(i, int) or isinstance(i, bool) or not isinstance(j, int) or isinstance(j, bool):
            raise EvalError("bad_argument", "iloc positions must be integers", node)
        if not (0 <= i < frame.n_rows) or not (0 <= j < len(frame.columns)):
            raise EvalError("bad_argument", "iloc position out of range", node)
        if not is_cell(value):
            raise EvalError("bad_argument", "iloc assignment value must be scalar", node)
        name, col = frame.columns[j]
        values = list(col)
        values[i] = value
        return frame.with_column(name, tuple(values))

    # ------------------------------------------------------------------
    # builtin dispatch

    def dispatch(self, method: _Method, args: list, kwargs: dict, node):
        impl = getattr(self, f"builtin_{method.receiver_kind}_{method.name}", None)
        if impl is None:
            raise EvalError("unknown_member", f"no builtin {method.name!r}", node)
        try:
            return impl(method.receiver, args, kwargs, node)
        except ValueError as err:
            # e.g. a rename collapsing two columns into one name
            raise EvalError("bad_argument", str(err), node) from err

    @staticmethod
    def _no_extras(kwargs: dict, allowed: tuple[str, ...], node) -> None:
        extra = [k for k in kwargs if k not in allowed]
        if extra:
            raise EvalError("bad_argument", f"unexpected keyword {extra[0]!r}", node)

    def builtin_top_read_csv(self, _recv, args, kwargs, node):
        if len(args) != 1 or not isinstance(args[0], str):
            raise EvalError("bad_argument", "read_csv needs a path string", node)
        # header/sep and friends are accepted and ignored: the virtual file
        # registry already stores parsed frames
        path = args[0]
        if path not in self.files:
            raise EvalError("missing_file", f"no virtual file {path!r}", node)
        return self.files[path]

    def builtin_frame_merge(self, frame: FrameValue, args, kwargs, node):
        self._no_extras(kwargs, (), node)
        if len(args) != 1 or not isinstance(args[0], FrameValue):
            raise EvalError("bad_argument", "merge needs a frame argument", node)
        other = args[0]
        keys = [n for n in frame.names if other.has_column(n)]
        if not keys:
            raise EvalError("bad_argument", "no common columns to merge on", node)
        out_names = list(frame.names) + [n for n in other.names if n not in keys]
        rows: list[list] = []
        for i in range(frame.n_rows):
            for j in range(other.n_rows):
                if all(frame.column(k)[i] == other.column(k)[j] for k in keys):
                    left = list(frame.row(i))
                    right = [other.column(n)[j] for n in other.names if n not in keys]
                    rows.append(left + right)
        cols = tuple(
            (name, tuple(row[c] for row in rows)) for c, name in enumerate(out_names)
        )
        return FrameValue(cols, tuple(range(len(rows))))

    def builtin_frame_replace(self, frame: FrameValue, args, kwargs, node):
        self._no_extras(kwargs, (), node)
        if len(args) == 2 and is_cell(args[0]) and is_cell(args[1]):
            mapping = {args[0]: args[1]}
            per_column = None
        elif len(args) == 1 and isinstance(args[0], dict):
            arg = args[0]
            if arg and all(isinstance(v, dict) for v in arg.values()):
                per_column = arg
                mapping = None
            elif any(isinstance(v, dict) for v in arg.values()):
                raise EvalError("bad_argument", "mixed flat and nested replace map", node)
            else:
                mapping = arg
                per_column = None
        else:
            raise EvalError("bad_argument", "unsupported replace arguments", node)

        def swap(cell, table: dict):
            for old, new in table.items():
                if cell is not None and not isinstance(cell, bool) and type(cell) is type(old) and cell == old:
                    return new
            return cell

        cols = []
        for name, values in frame.columns:
            if per_column is not None:
                table = per_column.get(name)
                if table is None:
                    cols.append((name, values))
                    continue
                if not all(is_cell(v) for v in table.values()):
                    raise EvalError("bad_argument", "replace values must be scalar", node)
                cols.append((name, tuple(swap(v, table) for v in values)))
            else:
                if not all(is_cell(v) for v in mapping.values()):
                    raise EvalError("bad_argument", "replace values must be scalar", node)
                cols.append((name, tuple(swap(v, mapping) for v in values)))
        return FrameValue(tuple(cols), frame.index)

    def _dedupe_keys(self, frame: FrameValue, subset, node) -> tuple[list[str], list[tuple]]:
        if subset is None:
            names = list(frame.names)
        elif isinstance(subset, str):
            names = [subset]
        elif isinstance(subset, list) and all(isinstance(s, str) for s in subset):
            names = subset
        else:
            raise EvalError("bad_argument", "subset must name columns", node)
        for n in names:
            if not frame.has_column(n):
                raise EvalError("bad_argument", f"no column {n!r}", node)
        keys = [
            tuple((type(v).__name__, v) for v in (frame.column(n)[i] for n in names))
            for i in range(frame.n_rows)
        ]
        return names, keys

    def _dup_flags(self, frame: FrameValue, subset, keep, node) -> list[bool]:
        if keep not in ("first", "last", False):
            raise EvalError("bad_argument", "keep must be 'first', 'last' or False", node)
        _, keys = self._dedupe_keys(frame, subset, node)
        counts: dict = {}
        for k in keys:
            counts[k] = counts.get(k, 0) + 1
        flags = []
        seen: dict = {}
        for i, k in enumerate(keys):
            seen[k] = seen.get(k, 0) + 1
            if keep == "first":
                flags.append(seen[k] > 1)
            elif keep == "last":
                flags.append(seen[k] < counts[k])
            else:
                flags.append(counts[k] > 1)
        return flags

    def builtin_frame_drop_duplicates(self, frame: FrameValue, args, kwargs, node):
        self._no_extras(kwargs, ("subset", "keep"), node)
        subset = kwargs.get("subset", args[0] if args else None)
        keep = kwargs.get("keep", "first")
        flags = self._dup_flags(frame, subset, keep, node)
        return frame.take([i for i, dup in enumerate(flags) if not dup])

    def builtin_frame_duplicated(self, frame: FrameValue, args, kwargs, node):
        self._no_extras(kwargs, ("subset", "keep"), node)
        subset = kwargs.get("subset", args[0] if args else None)
        keep = kwargs.get("keep", "first")
        flags = self._dup_flags(frame, subset, keep, node)
        return SeriesValue(tuple(flags), frame.index, None)

    def builtin_frame_sort_values(self, frame: FrameValue, args, kwargs, node):
        self._no_extras(kwargs, ("by", "ascending"), node)
        by = kwargs.get("by", args[0] if args else None)
        ascending = kwargs.get("ascending", True)
        if isinstance(by, str):
            by = [by]
        if not (isinstance(by, list) and by and all(isinstance(b, str) for b in by)):
            raise EvalError("bad_argument", "sort_values needs column names in 'by'", node)
        for b in by:
            if not frame.has_column(b):
                raise EvalError("bad_argument", f"no column {b!r}", node)
        if isinstance(ascending, bool):
            directions = [ascending] * len(by)
        elif isinstance(ascending, list) and all(isinstance(x, bool) for x in ascending):
            if len(ascending) != len(by):
                raise EvalError("bad_argument", "ascending length must match by", node)
            directions = ascending
        else:
            raise EvalError("bad_argument", "ascending must be bool or list of bool", node)

        positions = list(range(frame.n_rows))
        # stable multi-key sort: apply keys right-to-left, missing cells last
        for b, asc in reversed(list(zip(by, directions))):
            column = frame.column(b)

            def sort_key(i, column=column, asc=asc):
                v = column[i]
                if v is None:
                    return (1, 0)
                if isinstance(v, bool):
                    v = int(v)
                return (0, v if asc else _Reversed(v))

            positions.sort(key=sort_key)
        return frame.take(positions)

    def builtin_frame_isin(self, frame: FrameValue, args, kwargs, node):
        self._no_extras(kwargs, (), node)
        if len(args) != 1:
            raise EvalError("bad_argument", "isin needs one argument", node)
        values = args[0]

        def contains(cell, pool) -> bool:
            return any(
                cell is not None and type(cell) is type(p) and cell == p for p in pool
            )

        if isinstance(values, list):
            cols = tuple(
                (n, tuple(contains(c, values) for c in vals)) for n, vals in frame.columns
            )
            return FrameValue(cols, frame.index)
        if isinstance(values, dict):
            cols = []
            for n, vals in frame.columns:
                pool = values.get(n)
                if isinstance(pool, list):
                    cols.append((n, tuple(contains(c, pool) for c in vals)))
                else:
                    cols.append((n, tuple(False for _ in vals)))
            return FrameValue(tuple(cols), frame.index)
        raise EvalError("bad_argument", "isin needs a list or dict", node)

    def builtin_frame_isnull(self, frame: FrameValue, args, kwargs, node):
        self._no_extras(kwargs, (), node)
        if args:
            raise EvalError("bad_argument", "isnull takes no arguments", node)
        cols = tuple((n, tuple(v is None for v in vals)) for n, vals in frame.columns)
        return FrameValue(cols, frame.index)

    def builtin_frame_any(self, frame: FrameValue, args, kwargs, node):
        self._no_extras(kwargs, ("axis",), node)
        axis = kwargs.get("axis", args[0] if args else 0)
        if axis not in (0, 1):
            raise EvalError("bad_argument", "axis must be 0 or 1", node)
        if axis == 0:
            values = tuple(any(bool(v) for v in vals if v is not None) for _, vals in frame.columns)
            return SeriesValue(values, frame.names, None)
        values = tuple(
            any(bool(v) for v in frame.row(i) if v is not None) for i in range(frame.n_rows)
        )
        return SeriesValue(values, frame.index, None)

    def _numeric_agg(self, frame: FrameValue, agg: str, node):
        names = []
        out = []
        for n, vals in frame.columns:
            numeric = [v for v in vals if _is_numeric(v)]
            non_null = [v for v in vals if v is not None]
            if not non_null or len(numeric) != len(non_null):
                continue
            names.append(n)
            if agg == "mean":
                out.append(sum(numeric) / len(numeric) if numeric else None)
            else:
                out.append(sum(numeric))
        return SeriesValue(tuple(out), tuple(names), None)

    def builtin_frame_mean(self, frame, args, kwargs, node):
        self._no_extras(kwargs, (), node)
        return self._numeric_agg(frame, "mean", node)

    def builtin_frame_sum(self, frame, args, kwargs, node):
        self._no_extras(kwargs, (), node)
        return self._numeric_agg(frame, "sum", node)

    def builtin_frame_drop(self, frame: FrameValue, args, kwargs, node):
        self._no_extras(kwargs, (), node)
        if len(args) != 1:
            raise EvalError("bad_argument", "drop needs labels", node)
        labels = args[0]
        if isinstance(labels, SeriesValue):
            pool = list(labels.values)
        elif isinstance(labels, list):
            pool = labels
        elif is_cell(labels):
            pool = [labels]
        else:
            raise EvalError("bad_argument", "drop needs index labels", node)
        missing = [l for l in pool if l not in frame.index]
        if missing:
            raise EvalError("bad_argument", f"label {missing[0]!r} not in index", node)
        keep = [i for i, label in enumerate(frame.index) if label not in pool]
        return frame.take(keep)

    def builtin_frame_append(self, frame: FrameValue, args, kwargs, node):
        self._no_extras(kwargs, ("ignore_index",), node)
        if len(args) != 1 or not isinstance(args[0], FrameValue):
            raise EvalError("bad_argument", "append needs a frame argument", node)
        other = args[0]
        ignore_index = kwargs.get("ignore_index", False)
        if not isinstance(ignore_index, bool):
            raise EvalError("bad_argument", "ignore_index must be a bool", node)
        names = list(frame.names) + [n for n in other.names if not frame.has_column(n)]
        cols = []
        for n in names:
            top = list(frame.column(n)) if frame.has_column(n) else [None] * frame.n_rows
            bottom = list(other.column(n)) if other.has_column(n) else [None] * other.n_rows
            cols.append((n, tuple(top + bottom)))
        # duplicate labels are kept unless the caller asks for a reindex
        index = tuple(frame.index) + tuple(other.index)
        if ignore_index:
            index = tuple(range(len(index)))
        return FrameValue(tuple(cols), index)

    def builtin_frame_rename(self, frame: FrameValue, args, kwargs, node):
        self._no_extras(kwargs, ("columns",), node)
        mapping = kwargs.get("columns", args[0] if args else None)
        if not isinstance(mapping, dict):
            raise EvalError("bad_argument", "rename needs a columns dict", node)
        cols = tuple((mapping.get(n, n), vals) for n, vals in frame.columns)
        return FrameValue(cols, frame.index)

    def builtin_frame_head(self, frame: FrameValue, args, kwargs, node):
        self._no_extras(kwargs, ("n",), node)
        n = kwargs.get("n", args[0] if args else 5)
        if not isinstance(n, int) or isinstance(n, bool):
            raise EvalError("bad_argument", "head needs an integer", node)
        return frame.take(list(range(min(max(n, 0), frame.n_rows))))

    def builtin_series_isin(self, series: SeriesValue, args, kwargs, node):
        self._no_extras(kwargs, (), node)
        if len(args) != 1:
            raise EvalError("bad_argument", "isin needs one argument", node)
        values = args[0]
        if isinstance(values, SeriesValue):
            pool = list(values.values)
        elif isinstance(values, list):
            pool = values
        else:
            raise EvalError("bad_argument", "isin needs a list or series", node)
        out = tuple(
            any(v is not None and type(v) is type(p) and v == p for p in pool)
            for v in series.values
        )
        return SeriesValue(out, series.index, series.name)

    def builtin_series_sum(self, series: SeriesValue, args, kwargs, node):
        self._no_extras(kwargs, (), node)
        numeric = [int(v) if isinstance(v, bool) else v for v in series.values if v is not None]
        if not all(isinstance(v, (int, float)) for v in numeric):
            raise EvalError("type_mismatch", "sum needs numeric values", node)
        return sum(numeric) if numeric else 0

    def builtin_series_mean(self, series: SeriesValue, args, kwargs, node):
        self._no_extras(kwargs, (), node)
        numeric = [int(v) if isinstance(v, bool) else v for v in series.values if v is not None]
        if not all(isinstance(v, (int, float)) for v in numeric):
            raise EvalError("type_mismatch", "mean needs numeric values", node)
        if not numeric:
            return None
        return sum(numeric) / len(numeric)

    def builtin_series_unique(self, series: SeriesValue, args, kwargs, node):
        self._no_extras(kwargs, (), node)
        seen = []
        for v in series.values:
            if not any(type(v) is type(s) and v == s for s in seen):
                seen.append(v)
        return seen

    def builtin_series_rolling(self, series: SeriesValue, args, kwargs, node):
        self._no_extras(kwargs, ("window",), node)
        window = kwargs.get("window", args[0] if args else None)
        if not isinstance(window, int) or isinstance(window, bool) or window < 1:
            raise EvalError("bad_argument", "rolling needs a positive integer window", node)
        return _Rolling(series, window)

    def builtin_rolling_mean(self, rolling: _Rolling, args, kwargs, node):
        self._no_extras(kwargs, (), node)
        series, w = rolling.series, rolling.window
        out: list[Cell] = []
        for i in range(series.n_rows):
            if i + 1 < w:
                out.append(None)
                continue
            window = series.values[i + 1 - w : i + 1]
            if any(v is None for v in window):
                out.append(None)
                continue
            if not all(_is_numeric(v) for v in window):
                raise EvalError("type_mismatch", "rolling mean needs numbers", node)
            out.append(sum(window) / w)
        return SeriesValue(tuple(out), series.index, series.name)

    def _str_cells(self, series: SeriesValue, node):
        for v in series.values:
            if v is None or isinstance(v, str):
                yield v
            else:
                yield None  # non-string cells come back missing, like NaN

    def builtin_str_replace(self, series: SeriesValue, args, kwargs, node):
        self._no_extras(kwargs, (), node)
        if len(args) != 2 or not all(isinstance(a, str) for a in args):
            raise EvalError("bad_argument", "str.replace needs two strings", node)
        old, new = args
        out = tuple(v.replace(old, new) if isinstance(v, str) else v for v in self._str_cells(series, node))
        return SeriesValue(out, series.index, series.name)

    def builtin_str_contains(self, series: SeriesValue, args, kwargs, node):
        self._no_extras(kwargs, (), node)
        if len(args) != 1 or not isinstance(args[0], str):
            raise EvalError("bad_argument", "str.contains needs a string", node)
        pat = args[0]
        out = tuple(pat in v if isinstance(v, str) else None for v in self._str_cells(series, node))
        return SeriesValue(out, series.index, series.name)


class _Reversed:
    """Inverts comparison order for descending sort keys."""

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def __lt__(self, other):
        return other.value < self.value

    def __eq__(self, other):
        return isinstance(other, _Reversed) and other.value == self.value


def eval_program(
    p: A.Program, env: Env, step_limit: int = DEFAULT_STEP_LIMIT
) -> Env:
    """Execute a program against env; returns a new Env, raises EvalError.

    The input env is never mutated, even on failure.
    """
    if step_limit <= 0:
        raise ValueError("step_limit must be positive")
    return _Evaluator(env, step_limit).run(p)


def try_eval_program(
    p: A.Program, env: Env, step_limit: int = DEFAULT_STEP_LIMIT
) -> Env | EvalError:
    try:
        return eval_program(p, env, step_limit)
    except EvalError as err:
        return err
