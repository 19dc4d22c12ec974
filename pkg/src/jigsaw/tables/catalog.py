"""Closed catalog of builtin table operations.

Each signature names its receiver kind, result kind and ordered argument
slots; the slot domain tags drive the enumerative argument search.  The
catalog is the closure of the operations the snippets in this domain
use, with semantics matching the mainstream dataframe library (checked
against the golden-file oracle).
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ArgSlot:
    name: str                # keyword name; '' means positional-only
    required: bool
    domain: str              # enumeration domain tag used by argument repair


@dataclass(frozen=True)
class BuiltinSig:
    receiver: str            # frame | series | str | rolling | top
    name: str
    result: str              # frame | series | scalar | rolling | list | dynamic
    slots: tuple[ArgSlot, ...] = ()


_CATALOG: tuple[BuiltinSig, ...] = (
    BuiltinSig("frame", "merge", "frame", (ArgSlot("", True, "frame_var"),)),
    BuiltinSig("frame", "replace", "frame", (ArgSlot("", True, "replace_args"),)),
    BuiltinSig("frame", "drop_duplicates", "frame", (
        ArgSlot("subset", False, "column_list"),
        ArgSlot("keep", False, "keep_enum"),
    )),
    BuiltinSig("frame", "duplicated", "series", (
        ArgSlot("subset", False, "column_list"),
        ArgSlot("keep", False, "keep_enum"),
    )),
    BuiltinSig("frame", "sort_values", "frame", (
        ArgSlot("by", True, "column_or_list"),
        ArgSlot("ascending", False, "bool_or_list"),
    )),
    BuiltinSig("frame", "isin", "frame", (ArgSlot("", True, "isin_values"),)),
    BuiltinSig("frame", "isnull", "frame", ()),
    BuiltinSig("frame", "any", "series", (ArgSlot("axis", False, "axis_enum"),)),
    BuiltinSig("frame", "mean", "series", ()),
    BuiltinSig("frame", "sum", "series", ()),
    BuiltinSig("frame", "drop", "frame", (ArgSlot("", True, "labels_or_index"),)),
    BuiltinSig("frame", "append", "frame", (
        ArgSlot("", True, "frame_var"),
        ArgSlot("ignore_index", False, "bool_enum"),
    )),
    BuiltinSig("frame", "rename", "frame", (ArgSlot("columns", True, "rename_dict"),)),
    BuiltinSig("frame", "head", "frame", (ArgSlot("", False, "int_small"),)),
    BuiltinSig("series", "isin", "series", (ArgSlot("", True, "isin_values"),)),
    BuiltinSig("series", "sum", "scalar", ()),
    BuiltinSig("series", "mean", "scalar", ()),
    BuiltinSig("series", "unique", "list", ()),
    BuiltinSig("series", "rolling", "rolling", (ArgSlot("window", True, "int_small"),)),
    BuiltinSig("rolling", "mean", "series", ()),
    BuiltinSig("str", "replace", "series", (
        ArgSlot("", True, "str_pool"),
        ArgSlot("", True, "str_pool"),
    )),
    BuiltinSig("str", "contains", "series", (ArgSlot("", True, "str_pool"),)),
    BuiltinSig("top", "read_csv", "frame", (ArgSlot("", True, "path_str"),)),
)

_BY_NAME: dict[str, tuple[BuiltinSig, ...]] = {}
for _sig in _CATALOG:
    _BY_NAME.setdefault(_sig.name, ())
    _BY_NAME[_sig.name] = _BY_NAME[_sig.name] + (_sig,)


def builtin_catalog() -> tuple[BuiltinSig, ...]:
    """The closed catalog of builtin operations."""
    return _CATALOG


def lookup(name: str, receiver: str | None = None) -> tuple[BuiltinSig, ...]:
    """Signatures for a method name, optionally filtered by receiver kind."""
    sigs = _BY_NAME.get(name, ())
    if receiver is not None:
        sigs = tuple(s for s in sigs if s.receiver == receiver)
    return sigs


def method_names(receiver: str) -> frozenset[str]:
    return frozenset(s.name for s in _CATALOG if s.receiver == receiver)
