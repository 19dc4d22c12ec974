#!/usr/bin/env python3
"""Generate the golden evaluator corpus by running each snippet through a
real dataframe library and freezing the observed outputs as JSON.

Run once from the repo root:

    python3 scripts/generate_goldens.py

The test suite replays tests/data/goldens.json through the in-package
evaluator; it does not import pandas itself.
"""

import json
import math
from pathlib import Path

import numpy as np
import pandas as pd

OUT_PATH = Path(__file__).resolve().parent.parent / "tests" / "data" / "goldens.json"


def cell(v):
    if v is None:
        return None
    if isinstance(v, float) and math.isnan(v):
        return None
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


def dtype_tag(values):
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


def frame_json(df):
    columns = [str(c) for c in df.columns]
    data = [[cell(v) for v in row] for row in df.itertuples(index=False, name=None)]
    cols_values = list(zip(*data)) if data else [[] for _ in columns]
    return {
        "columns": columns,
        "index": [cell(v) for v in df.index.tolist()],
        "data": data,
        "dtypes": [dtype_tag(col) for col in cols_values],
    }


def value_json(v):
    if isinstance(v, pd.DataFrame):
        return frame_json(v)
    if isinstance(v, pd.Series):
        return {
            "name": v.name if isinstance(v.name, str) else None,
            "index": [cell(x) for x in v.index.tolist()],
            "values": [cell(x) for x in v.tolist()],
        }
    if isinstance(v, np.ndarray):
        return {"list": [{"scalar": cell(x)} for x in v.tolist()]}
    if isinstance(v, list):
        return {"list": [{"scalar": cell(x)} for x in v]}
    return {"scalar": cell(v)}


FRAMES = {
    "people": {
        "country": ["Name:France", "Name:Peru", "Name:India"],
        "city": ["Paris", "Lima", "Delhi"],
    },
    "grades": {
        "name": ["ann", "bob", "cat", "dan", "ann"],
        "score": [91, 74, 88, 74, 91],
    },
    "places": {
        "location": ["United States", "France", "United States"],
        "zip": [3434, 94025, 3434],
        "notes": ["United States", "zip 3434", "ok"],
    },
    "nums": {
        "foo": [10, 80, 20, 95],
        "bar": [1.5, 2.5, 3.5, 4.5],
    },
    "hp": {
        "HP": [45, 60, 80],
        "Attack": [49, 62, 82],
    },
    "nulls": {
        "a": [1, None, 3],
        "b": [None, None, 7],
    },
    "left": {
        "key": ["a", "b", "c"],
        "lval": [1, 2, 3],
    },
    "right": {
        "key": ["b", "c", "d"],
        "rval": [20, 30, 40],
    },
    "named": {
        "Name": ["Chip", "Dale", "Chad"],
        "Age": [4, 5, 6],
    },
    "dup_idx": {
        "v": [1, 2],
    },
}

INDEXES = {"dup_idx": [0, 0]}


def build_env(names):
    env = {}
    for n in names:
        df = pd.DataFrame(FRAMES[n])
        if n in INDEXES:
            df.index = INDEXES[n]
        env[n] = df
    return env


# (id, env frame names -> local var bindings, code, output var)
CASES = [
    ("str_replace", {"df": "people"},
     "df['country'] = df['country'].str.replace('Name:', '')\ndfout = df", "dfout"),
    ("str_contains_filter", {"df_p": "named", "df_per": "named"},
     'dfout = df_p.loc[df_per["Name"].str.contains("Ch")]', "dfout"),
    ("str_contains_negated", {"df_p": "named", "df_per": "named"},
     'dfout = df_p.loc[~df_per["Name"].str.contains("Ch")]', "dfout"),
    ("replace_flat", {"dfin": "places"},
     "dfout = dfin.replace({'United States':'US', 3434:4343})", "dfout"),
    ("replace_nested", {"dfin": "places"},
     "dfout = dfin.replace({'location':{'United States':'US'},'zip':{3434:4343}})", "dfout"),
    ("replace_two_scalars", {"dfin": "places"},
     "dfout = dfin.replace('United States', 'US')", "dfout"),
    ("drop_duplicates_first", {"df": "grades"},
     "dfout = df.drop_duplicates(subset=['score'])", "dfout"),
    ("drop_duplicates_keep_false", {"df": "grades"},
     "dfout = df.drop_duplicates(subset=['score'], keep=False)", "dfout"),
    ("drop_duplicates_last", {"df": "grades"},
     "dfout = df.drop_duplicates(subset=['score'], keep='last')", "dfout"),
    ("duplicated_sum", {"dfin": "grades"},
     "dfout = dfin.duplicated().sum()", "dfout"),
    ("duplicated_series", {"dfin": "grades"},
     "dfout = dfin.duplicated(subset=['score'], keep=False)", "dfout"),
    ("sort_two_keys", {"dfin": "grades"},
     'dfout = dfin.sort_values(by=["score","name"], ascending=[False, True])', "dfout"),
    ("sort_single", {"dfin": "nums"},
     "dfout = dfin.sort_values(by='foo')", "dfout"),
    ("isin_list", {"df": "grades"},
     "dfout = df.isin([74, 'ann'])", "dfout"),
    ("isnull_any_rows", {"df": "nulls"},
     "dfout = df.loc[~df.isnull().any(axis=1)]", "dfout"),
    ("isnull_any_columns", {"df": "nulls"},
     "dfout = df.isnull().any()", "dfout"),
    ("frame_mean", {"df": "nums"},
     "dfout = df.mean()", "dfout"),
    ("frame_sum", {"df": "nums"},
     "dfout = df.sum()", "dfout"),
    ("series_mean", {"df": "nums"},
     "dfout = df['foo'].mean()", "dfout"),
    ("drop_labels", {"data": "grades"},
     "train = data.drop([0, 2])", "train"),
    ("drop_by_index", {"data": "grades", "test": "grades_head"},
     "train = data.drop(test.index)", "train"),
    ("index_isin_negated", {"data": "grades", "test": "grades_head"},
     "train = data[~data.index.isin(test.index)]", "train"),
    ("append_keeps_labels", {"df1": "left", "df2": "right"},
     "dfout = df1.append(df2)", "dfout"),
    ("append_ignore_index", {"df1": "left", "df2": "right"},
     "dfout = df1.append(df2, ignore_index=True)", "dfout"),
    ("rename_columns", {"df": "left"},
     "dfout = df.rename(columns={'lval': 'value'})", "dfout"),
    ("head_two", {"df": "grades"},
     "dfout = df.head(2)", "dfout"),
    ("merge_inner", {"df1": "left", "df2": "right"},
     "dfout = df1.merge(df2)", "dfout"),
    ("merge_swapped", {"df1": "left", "df2": "right"},
     "dfout = df2.merge(df1)", "dfout"),
    ("loc_scalar", {"dfin": "hp"},
     "dfout = dfin.loc[0, 'HP']", "dfout"),
    ("loc_set_scalar", {"dfin": "hp"},
     "dfin.loc[1, 'HP'] = 99\ndfout = dfin", "dfout"),
    ("iloc_row", {"df": "hp"},
     "dfout = df.iloc[1]", "dfout"),
    ("iloc_cell", {"df": "hp"},
     "dfout = df.iloc[0, 1]", "dfout"),
    ("rolling_mean", {"dfin": "nums"},
     'dfout = dfin["foo"].rolling(window=3).mean()', "dfout"),
    ("rolling_reassign", {"dfin": "nums"},
     'dfin["foo"] = dfin["foo"].rolling(3).mean()\ndfout = dfin', "dfout"),
    ("series_unique", {"df": "grades"},
     "dfout = df['score'].unique()", "dfout"),
    ("series_isin_list", {"df": "grades"},
     "dfout = df['score'].isin([74, 88])", "dfout"),
    ("filter_parenthesized", {"dfin": "nums"},
     "dfout = dfin[(dfin['foo']>70)|(dfin['foo']<15)]", "dfout"),
    ("filter_and_or", {"dfin": "nums"},
     "dfout = dfin[((dfin['foo']<40)|(dfin['foo']>90))&(dfin['bar']>1.0)]", "dfout"),
    ("column_broadcast", {"df": "grades"},
     "df['flag'] = 1\ndfout = df", "dfout"),
    ("read_csv_virtual", {},
     "df = pd.read_csv('./data.csv')\ndfout = df.head(2)", "dfout"),
]


def special_frames(env):
    if "test" in env and isinstance(env["test"], str):
        pass
    return env


def main():
    goldens = []
    for case_id, bindings, code, out_name in CASES:
        env = {}
        for var, frame_name in bindings.items():
            if frame_name == "grades_head":
                df = pd.DataFrame(FRAMES["grades"]).head(2)
            else:
                df = pd.DataFrame(FRAMES[frame_name])
                if frame_name in INDEXES:
                    df.index = INDEXES[frame_name]
            env[var] = df
        files = {}
        if case_id == "read_csv_virtual":
            files["./data.csv"] = pd.DataFrame(FRAMES["grades"])
        scope = {"pd": pd, **{k: v.copy() for k, v in env.items()}}

        code_to_run = code
        # pandas 2.x dropped DataFrame.append; emulate the old semantics
        if ".append(" in code:
            scope["_concat"] = pd.concat
            if "ignore_index=True" in code:
                code_to_run = "dfout = _concat([df1, df2], ignore_index=True)"
            else:
                code_to_run = "dfout = _concat([df1, df2])"
        if case_id == "read_csv_virtual":
            scope["_vf"] = files["./data.csv"]
            code_to_run = "df = _vf.copy()\ndfout = df.head(2)"

        exec(compile(code_to_run, case_id, "exec"), scope)
        result = scope[out_name]
        goldens.append({
            "id": case_id,
            "code": code,
            "env": {var: frame_json(df) for var, df in env.items()},
            "files": {path: frame_json(df) for path, df in files.items()},
            "output": out_name,
            "expected": value_json(result),
        })

    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    OUT_PATH.write_text(json.dumps(goldens, indent=1))
    print(f"wrote {len(goldens)} goldens to {OUT_PATH}")


if __name__ == "__main__":
    main()
