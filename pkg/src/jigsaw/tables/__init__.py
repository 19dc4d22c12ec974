"""Tabular value model, builtin operation catalog, evaluator and I/O equality."""

from .catalog import ArgSlot, BuiltinSig, builtin_catalog, lookup, method_names
from .evaluate import DEFAULT_STEP_LIMIT, eval_program, try_eval_program
from .serialize import frame_from_json, frame_to_json, value_from_json, value_to_json
from .values import (
    Cell, Env, EvalError, FrameValue, SeriesValue, Value,
    is_cell, kind_of, values_equal,
)

__all__ = [
    "ArgSlot", "BuiltinSig", "Cell", "DEFAULT_STEP_LIMIT", "Env", "EvalError",
    "FrameValue", "SeriesValue", "Value", "builtin_catalog", "eval_program",
    "frame_from_json", "frame_to_json", "is_cell", "kind_of", "lookup",
    "method_names", "try_eval_program", "value_from_json", "value_to_json",
    "values_equal",
]
