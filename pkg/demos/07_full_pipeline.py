#!/usr/bin/env python3
# The whole loop on one task: synthesize, fail, learn from feedback,
# synthesize the same family again and watch the learned rule repair it.

from jigsaw.context import ContextBank
from jigsaw.lang import parse
from jigsaw.learn import RuleBank
from jigsaw.modelio import ModelConfig
from jigsaw.pipeline import (
    Banks, IOExample, PipelineConfig, TaskSpec, record_feedback, synthesize,
)
from jigsaw.tables import Env, FrameValue, eval_program

def expect(code, env):
    return eval_program(parse(code), Env(dict(env))).bindings["dfout"]

data = FrameValue.make({"k": ["a", "b", "c", "d"], "v": [4, 1, 3, 1]})
test = data.take([0, 2])

correct = "dfout = data[~data.index.isin(test.index)]"
query = "rows of data whose index is not in test"
spec = TaskSpec(
    queries=[(query, "user1")],
    io_examples=[IOExample({"data": data, "test": test}, "dfout", expect(correct, {"data": data, "test": test}))],
)

# The mock model always forgets the ~ for this family of queries.
script = {
    query: ["dfout = data[data.index.isin(test.index)]"],
    "rows of pool not listed in held": ["dfout = pool[pool.index.isin(held.index)]"],
}
banks = Banks(context=ContextBank(), rules=RuleBank())
cfg = PipelineConfig(model=ModelConfig(kind="mock", script=script))

result = synthesize(spec, banks, cfg)
print("first attempt:", result.stage_reached, "->",
      result.candidates[0].status, result.candidates[0].source)

# The user submits the fix; the bank grows and an edit pair is harvested.
outcome = record_feedback(spec, query, correct, result, banks, cfg)
print(f"feedback: bank_added={outcome.bank_added}, "
      f"pairs={outcome.pairs_harvested}, clusters={outcome.clusters_total}")

# A different task with the same mistake is now repaired by the rule.
pool = FrameValue.make({"w": [9, 8, 7]})
held = pool.take([1])
correct2 = "dfout = pool[~pool.index.isin(held.index)]"
spec2 = TaskSpec(
    queries=[("rows of pool not listed in held", "user2")],
    io_examples=[IOExample({"pool": pool, "held": held}, "dfout",
                           expect(correct2, {"pool": pool, "held": held}))],
)
result2 = synthesize(spec2, banks, cfg)
best = result2.candidates[0]
print("second task:", result2.stage_reached, "->", best.status,
      f"({best.origin}, rule {best.rule_id})")
print("repaired code:", best.source)
