"""Shared application state: bank handles, model config, budgets and the
single-writer discipline for bank mutation."""

from __future__ import annotations

import os
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Optional

from ..context import ContextBank
from ..learn import RuleBank
from ..modelio import ModelConfig
from ..pipeline import Banks, PipelineConfig, SynthesisResult, TaskSpec

ENV_DATA_DIR = "JIGSAW_DATA_DIR"
RESULT_RING_SIZE = 1024


def data_dir() -> str:
    return os.environ.get(ENV_DATA_DIR, os.path.join(os.getcwd(), "jigsaw_data"))


def default_bank_paths(base: Optional[str] = None) -> tuple[str, str]:
    base = base or data_dir()
    return os.path.join(base, "context_bank.json"), os.path.join(base, "rule_bank.json")


def load_banks(base: Optional[str] = None) -> Banks:
    ctx_path, rules_path = default_bank_paths(base)
    context = ContextBank.load(ctx_path) if os.path.exists(ctx_path) else ContextBank()
    rules = RuleBank.load(rules_path) if os.path.exists(rules_path) else RuleBank()
    return Banks(context=context, rules=rules, context_path=ctx_path, rules_path=rules_path)


@dataclass
class AppState:
    banks: Banks
    cfg: PipelineConfig = field(default_factory=PipelineConfig)
    write_lock: threading.Lock = field(default_factory=threading.Lock)
    # result_id -> (spec, result); bounded ring for feedback correlation
    results: "OrderedDict[str, tuple[TaskSpec, SynthesisResult]]" = field(
        default_factory=OrderedDict
    )
    _counter: int = 0

    def remember(self, spec: TaskSpec, result: SynthesisResult) -> str:
        self._counter += 1
        result_id = f"r{self._counter:06d}"
        self.results[result_id] = (spec, result)
        while len(self.results) > RESULT_RING_SIZE:
            self.results.popitem(last=False)
        return result_id

    def recall(self, result_id: str) -> Optional[tuple[TaskSpec, SynthesisResult]]:
        return self.results.get(result_id)
