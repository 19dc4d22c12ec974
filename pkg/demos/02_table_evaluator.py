#!/usr/bin/env python3
# The in-memory table model and deterministic evaluator.

from jigsaw.lang import parse
from jigsaw.tables import Env, FrameValue, try_eval_program, value_to_json, values_equal

df = FrameValue.make({
    "country": ["Name:France", "Name:Peru"],
    "population": [68, 34],
})
env = Env({"df": df})

out = try_eval_program(parse("df['country'] = df['country'].str.replace('Name:', '')"), env)
print("country after str.replace:", out.bindings["df"].column("country"))
print("original env untouched:   ", env.bindings["df"].column("country"))

# Boolean masks filter rows the way the mainstream dataframe library does.
env2 = Env({"df": FrameValue.make({"foo": [10, 80, 20, 95]})})
ok = try_eval_program(parse("dfout = df[(df['foo']>70)|(df['foo']<15)]"), env2)
print("\nfiltered rows:", ok.bindings["dfout"].column("foo"))

# ... and the unparenthesized version raises the same ambiguity error.
bad = try_eval_program(parse("dfout = df[df['foo']>70|df['foo']<15]"), env2)
print("without parentheses:", bad)

# Values serialize to a stable JSON wire format.
print("\nframe as JSON:", value_to_json(df))
print("frames compare cellwise with a float tolerance:",
      values_equal(1.0, 1.0 + 1e-12))
