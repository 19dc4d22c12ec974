#!/usr/bin/env python3
# The black-box model protocol: prompt layout, the scripted mock, and the
# corruption injector that reproduces the three recurring failure classes.

from jigsaw.lang import parse, unparse
from jigsaw.modelio import ModelConfig, PromptPair, complete, corrupt, render_prompt

pairs = [
    PromptPair("Find the mean of data", "data.mean()"),
    PromptPair("Perform column-wise OR operation in df", "df = df.any()"),
]
prompt = render_prompt(pairs, "Load ./data.csv file")
print(prompt)

cfg = ModelConfig(kind="mock", script={
    "Load ./data.csv file": ["df = pd.read_csv('./data.csv')",
                             "csv = pd.read_csv('./data.csv', header=None)"],
}, n_completions=2, temperature=1.0, seed=4)
for c in complete(cfg, prompt):
    print(f"completion[{c.rank}]: {c.text}")

# The corruption injector turns a correct program into each failure class.
examples = {
    "var_rename": "dfout = dfin.drop_duplicates(subset=['inpB'], keep=False)",
    "arg_mutation": "dfout = dfin.drop_duplicates(subset=['inpB'], keep=False)",
    "semantic": "train = data[~data.index.isin(test.index)]",
}
for error_class, source in examples.items():
    correct = parse(source)
    for seed in range(8):
        broken, changed = corrupt(correct, error_class, seed)
        if changed and broken != correct:
            print(f"{error_class:13} {source}")
            print(f"{'':13} -> {unparse(broken)}")
            break
