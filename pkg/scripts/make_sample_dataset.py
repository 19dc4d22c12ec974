#!/usr/bin/env python3
"""Build the bundled sample dataset and matching mock-model script used
by the demos and the CLI quickstart.

    python3 scripts/make_sample_dataset.py
"""

import json
from pathlib import Path

from jigsaw.lang import parse
from jigsaw.tables import Env, FrameValue, eval_program, frame_to_json, value_to_json

OUT_DIR = Path(__file__).resolve().parent.parent / "demos" / "data"


def frame(**cols):
    return FrameValue.make(cols)


PEOPLE = frame(country=["Name:France", "Name:Peru", "Name:India"],
               city=["Paris", "Lima", "Delhi"])
PLACES = frame(location=["United States", "France", "United States"],
               zip=[3434, 94025, 3434],
               notes=["United States", "zip 3434", "ok"])
GRADES = frame(name=["ann", "bob", "cat", "dan"], score=[91, 74, 88, 74])
LEFT = frame(k=["a", "b", "c"], lval=[1, 2, 3])
RIGHT = frame(k=["b", "c"], rval=[20, 30])

# task id -> (code, env, queries, scripted model completions)
TASKS = {
    "strip_prefix": (
        "dfout = df['country'].str.replace('Name:', '')",
        {"df": PEOPLE},
        [["Remove substring 'Name:' from column 'country' of df", "user1"]],
        ["dfout = df['country'].str.replace('Name:', '')"],
    ),
    "scoped_replace": (
        "dfout = dfin.replace({'location':{'United States':'US'},'zip':{3434:4343}})",
        {"dfin": PLACES},
        [["replace 'United States' in 'location' by 'US' and '3434' in 'zip' by '4343'", "user1"]],
        ["dfout = dfin.replace({'United States':'US', 3434:4343})"],
    ),
    "merge_order": (
        "dfout = right.merge(left)",
        {"left": LEFT, "right": RIGHT},
        [["merge the right frame with the left one", "user2"]],
        ["dfout = df1.merge(df2)"],
    ),
    "dedupe_scores": (
        "dfout = df.drop_duplicates(subset=['score'], keep=False)",
        {"df": GRADES},
        [["remove all rows of df whose 'score' appears more than once", "user1"],
         ["drop every duplicated 'score' entry of df", "user3"]],
        ["dfout = df.drop_duplicates(subset=['score'])"],
    ),
    "missing_not": (
        "dfout = data[~data.index.isin(test.index)]",
        {"data": GRADES, "test": GRADES.take([0, 2])},
        [["rows of data whose index is not in test", "user2"]],
        ["dfout = data[data.index.isin(test.index)]"],
    ),
}


def main():
    tasks = {}
    script = {}
    for tid, (code, env, queries, completions) in TASKS.items():
        out = eval_program(parse(code), Env(dict(env)))
        tasks[tid] = {
            "queries": queries,
            "IO": [{
                "inputs": sorted(env),
                "output": "dfout",
                "expected": value_to_json(out.bindings["dfout"]),
            }],
            "env": {name: frame_to_json(f) for name, f in env.items()},
            "solutions": [code],
        }
        for query, _user in queries:
            script[query] = completions
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    (OUT_DIR / "sample_tasks.json").write_text(
        json.dumps({"name": "sample", "session": "demo", "tasks": tasks}, indent=1))
    (OUT_DIR / "mock_script.json").write_text(json.dumps(script, indent=1))
    (OUT_DIR / "people.json").write_text(json.dumps(frame_to_json(PEOPLE), indent=1))
    expected = eval_program(
        parse("dfout = df['country'].str.replace('Name:', '')"), Env({"df": PEOPLE})
    ).bindings["dfout"]
    (OUT_DIR / "people_expected.json").write_text(json.dumps(value_to_json(expected), indent=1))
    print(f"wrote sample dataset ({len(tasks)} tasks) to {OUT_DIR}")


if __name__ == "__main__":
    main()
