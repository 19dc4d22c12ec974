#!/usr/bin/env python3
# Dataset evaluation with the bundled sample tasks: stage-wise accuracy
# table and the temporal (two-session) experiment shape.

import json
from pathlib import Path

from jigsaw.context import ContextBank
from jigsaw.harness import evaluate, load_dataset, replay_feedback
from jigsaw.learn import RuleBank
from jigsaw.modelio import ModelConfig
from jigsaw.pipeline import Banks, PipelineConfig

DATA = Path(__file__).parent / "data"

ds = load_dataset(str(DATA / "sample_tasks.json"))
script = json.loads((DATA / "mock_script.json").read_text())
cfg = PipelineConfig(model=ModelConfig(kind="mock", script=script))

banks = Banks(context=ContextBank(), rules=RuleBank())
report = evaluate(ds, banks, cfg, runs=3, temperatures=(0.0,))
print("before any feedback:")
print(report.format_table())

# Feed every task's reference solution back through the learning path,
# then evaluate again: the missing-~ task becomes repairable.
replay_feedback(ds, banks, cfg)
print(f"\nbank grew to {len(banks.context)} entries, "
      f"{len(banks.rules)} rewrite rule cluster(s)")

after = evaluate(ds, banks, cfg, runs=3, temperatures=(0.0,))
print("\nafter feedback:")
print(after.format_table())
