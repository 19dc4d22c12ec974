"""Dataset loading, grading, stage-wise accuracy reports, temperature
sweeps and the two-session temporal experiment driver.

A dataset file is a JSON object with a task map; each task carries the
user queries, I/O examples referencing named env bindings, and optional
reference solutions.  Accuracy is the fraction of query specifications
solved; task completion is the fraction of tasks with at least one
solved query.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace as dc_replace
from typing import Optional, Sequence

from .lang import ast as A
from .lang import parse
from .lang.lexer import ParseError
from .pipeline import (
    ORIGIN_STAGE, Banks, IOExample, PipelineConfig, SynthesisResult, TaskSpec,
    record_feedback, synthesize,
)
from .rules import program_to_gtree
from .tables import frame_from_json, value_from_json

STAGE_NAMES = ("model", "varfix", "semantic_repair")
STAGE_LABELS = {"model": "PTLM", "varfix": "Variable Name", "semantic_repair": "Semantic Repair"}
DEFAULT_TEMPERATURES = (0.0, 0.2, 0.4, 0.6)


class DatasetError(ValueError):
    def __init__(self, task_id: str, path: str, message: str):
        self.task_id = task_id
        self.path = path
        super().__init__(f"task {task_id!r}, field {path!r}: {message}")


@dataclass
class Dataset:
    tasks: dict[str, TaskSpec]
    name: str = ""
    session: str = ""


def _load_task(task_id: str, obj: dict) -> TaskSpec:
    raw_queries = obj.get("queries") or obj.get("NL query")
    if not raw_queries:
        raise DatasetError(task_id, "queries", "missing or empty")
    queries: list[tuple[str, str]] = []
    for i, q in enumerate(raw_queries):
        if isinstance(q, str):
            queries.append((q, ""))
        elif isinstance(q, list) and len(q) >= 1:
            queries.append((str(q[0]), str(q[1]) if len(q) > 1 else ""))
        else:
            raise DatasetError(task_id, f"queries[{i}]", "bad query entry")

    env = {}
    for name, val in (obj.get("env") or {}).items():
        try:
            env[name] = value_from_json(val)
        except (ValueError, KeyError, TypeError) as err:
            raise DatasetError(task_id, f"env.{name}", str(err)) from err
    files = {}
    for path, val in (obj.get("files") or {}).items():
        try:
            files[path] = frame_from_json(val)
        except (ValueError, KeyError, TypeError) as err:
            raise DatasetError(task_id, f"files.{path}", str(err)) from err

    raw_io = obj.get("IO") or obj.get("io")
    if not raw_io:
        raise DatasetError(task_id, "IO", "missing or empty")
    examples: list[IOExample] = []
    for i, ex in enumerate(raw_io):
        inputs = ex.get("inputs", [])
        if isinstance(inputs, str):
            inputs = [inputs]
        bound = {}
        for name in inputs:
            if name not in env:
                raise DatasetError(task_id, f"IO[{i}].inputs", f"name {name!r} has no env binding")
            bound[name] = env[name]
        out_name = ex.get("output")
        if not out_name:
            raise DatasetError(task_id, f"IO[{i}].output", "missing")
        if "expected" in ex:
            expected = value_from_json(ex["expected"])
        elif out_name in env:
            expected = env[out_name]
        else:
            raise DatasetError(task_id, f"IO[{i}].output",
                               f"no expected value: bind {out_name!r} in env or add 'expected'")
        examples.append(IOExample(bound, out_name, expected))

    solutions = obj.get("solutions")
    if solutions is not None:
        for i, code in enumerate(solutions):
            try:
                parse(code)
            except ParseError as err:
                raise DatasetError(task_id, f"solutions[{i}]", str(err)) from err
    return TaskSpec(
        queries=queries, io_examples=examples, virtual_files=files,
        reference_solutions=solutions, task_id=task_id,
    )


def load_dataset(path: str) -> Dataset:
    """Parse a dataset file, validating each task's schema."""
    with open(path) as fh:
        raw = json.load(fh)
    if "tasks" in raw:
        task_map = raw["tasks"]
        name = raw.get("name", "")
        session = raw.get("session", "")
    else:
        task_map, name, session = raw, "", ""
    tasks = {tid: _load_task(tid, obj) for tid, obj in task_map.items()}
    return Dataset(tasks=tasks, name=name, session=session)


# ----------------------------------------------------------------------
# grading


def alpha_equivalent(a: A.Program, b: A.Program) -> bool:
    """Structural equality modulo a consistent bijective renaming of
    variable names; literals and member names must match exactly."""
    forward: dict[str, str] = {}
    backward: dict[str, str] = {}

    def eq(x, y) -> bool:
        if x.tag != y.tag or len(x.children) != len(y.children):
            return False
        if x.tag == "name":
            if x.value in forward and forward[x.value] != y.value:
                return False
            if y.value in backward and backward[y.value] != x.value:
                return False
            forward[x.value] = y.value
            backward[y.value] = x.value
            return True
        if x.value != y.value:
            return False
        return all(eq(cx, cy) for cx, cy in zip(x.children, y.children))

    return eq(program_to_gtree(a), program_to_gtree(b))


@dataclass
class GradeOutcome:
    solved: bool
    needs_review: bool


def grade(result: SynthesisResult, spec: TaskSpec, strict: bool = True) -> GradeOutcome:
    """Solved iff some candidate passes all I/O and, when reference
    solutions exist, is alpha-equivalent to one of them.  An I/O pass
    without a reference match is flagged for review; under the default
    strict policy it does not count as solved."""
    return _grade_at_stage(result, spec, stage=3, strict=strict)


def _grade_at_stage(result: SynthesisResult, spec: TaskSpec, stage: int, strict: bool) -> GradeOutcome:
    passing = [c for c in result.passing() if ORIGIN_STAGE[c.origin] <= stage]
    if not passing:
        return GradeOutcome(solved=False, needs_review=False)
    references = []
    for code in spec.reference_solutions or []:
        try:
            references.append(parse(code))
        except ParseError:
            continue
    if not references:
        return GradeOutcome(solved=True, needs_review=False)
    for c in passing:
        if any(alpha_equivalent(c.program, ref) for ref in references):
            return GradeOutcome(solved=True, needs_review=False)
    return GradeOutcome(solved=not strict, needs_review=True)


# ----------------------------------------------------------------------
# evaluation


@dataclass
class StageStats:
    mean: float
    std: float

    def __str__(self) -> str:
        return f"{100 * self.mean:.1f}±{100 * self.std:.1f}"


@dataclass
class EvalReport:
    dataset: str
    runs: int
    seed: int
    temperatures: tuple[float, ...]
    # temperature -> stage -> stats over runs
    per_temperature: dict[float, dict[str, StageStats]]
    task_completion: dict[float, StageStats]
    best_temperature: float
    per_task: dict[str, dict[int, Optional[int]]]  # best temp, first run
    transport_errors: int = 0
    model_kind: str = "mock"

    def to_json(self) -> dict:
        return {
            "dataset": self.dataset,
            "runs": self.runs,
            "seed": self.seed,
            "temperatures": list(self.temperatures),
            "model_kind": self.model_kind,
            "per_temperature": {
                str(t): {s: {"mean": st.mean, "std": st.std} for s, st in stages.items()}
                for t, stages in self.per_temperature.items()
            },
            "task_completion": {
                str(t): {"mean": st.mean, "std": st.std}
                for t, st in self.task_completion.items()
            },
            "best_temperature": self.best_temperature,
            "per_task": {
                tid: {str(q): stage for q, stage in queries.items()}
                for tid, queries in self.per_task.items()
            },
            "transport_errors": self.transport_errors,
        }

    def format_table(self) -> str:
        labels = [STAGE_LABELS[s] for s in STAGE_NAMES]
        widths = [max(len(l), 12) for l in labels]
        header = "temp    " + "  ".join(l.ljust(w) for l, w in zip(labels, widths)) \
            + "  task completion"
        lines = [header, "-" * len(header)]
        for t in self.temperatures:
            stats = self.per_temperature[t]
            cells = [str(stats[s]).ljust(w) for s, w in zip(STAGE_NAMES, widths)]
            mark = "*" if t == self.best_temperature else " "
            lines.append(f"{t:<4}{mark}   " + "  ".join(cells)
                         + f"  {self.task_completion[t]}")
        lines.append(f"best temperature: {self.best_temperature}")
        return "\n".join(lines)

    def accuracy(self, stage: str = "semantic_repair", temperature: Optional[float] = None) -> float:
        t = self.best_temperature if temperature is None else temperature
        return self.per_temperature[t][stage].mean


def _mean_std(xs: Sequence[float]) -> StageStats:
    if not xs:
        return StageStats(0.0, 0.0)
    mean = sum(xs) / len(xs)
    var = sum((x - mean) ** 2 for x in xs) / len(xs)
    return StageStats(mean, math.sqrt(var))


def evaluate(
    ds: Dataset,
    banks: Banks,
    cfg: PipelineConfig,
    runs: int = 3,
    temperatures: Sequence[float] = DEFAULT_TEMPERATURES,
    strict: bool = True,
    seed: int = 0,
) -> EvalReport:
    """Stage-wise accuracy over the dataset, mean and std over repeated
    runs at each temperature; cumulative per stage by construction."""
    temperatures = tuple(temperatures)
    per_temperature: dict[float, dict[str, StageStats]] = {}
    completion: dict[float, StageStats] = {}
    first_run_outcomes: dict[float, dict[str, dict[int, Optional[int]]]] = {}
    transport_errors = 0

    total_queries = sum(len(spec.queries) for spec in ds.tasks.values())
    for t in temperatures:
        stage_runs: dict[str, list[float]] = {s: [] for s in STAGE_NAMES}
        completion_runs: list[float] = []
        for run in range(runs):
            model = dc_replace(cfg.model, temperature=t, seed=seed + run)
            run_cfg = dc_replace(cfg, model=model)
            solved_counts = {s: 0 for s in STAGE_NAMES}
            tasks_solved = 0
            per_task: dict[str, dict[int, Optional[int]]] = {}
            for task_id in sorted(ds.tasks):
                spec = ds.tasks[task_id]
                task_hit = False
                outcomes: dict[int, Optional[int]] = {}
                for qi, (query, _user) in enumerate(spec.queries):
                    result = synthesize(spec, banks, run_cfg, query=query)
                    if result.transport_error:
                        transport_errors += 1
                        outcomes[qi] = None
                        continue
                    solved_stage: Optional[int] = None
                    for stage_idx, stage_name in enumerate(STAGE_NAMES, start=1):
                        if _grade_at_stage(result, spec, stage_idx, strict).solved:
                            solved_stage = stage_idx
                            break
                    outcomes[qi] = solved_stage
                    if solved_stage is not None:
                        for stage_idx, stage_name in enumerate(STAGE_NAMES, start=1):
                            if stage_idx >= solved_stage:
                                solved_counts[stage_name] += 1
                        task_hit = True
                per_task[task_id] = outcomes
                tasks_solved += task_hit
            for s in STAGE_NAMES:
                stage_runs[s].append(solved_counts[s] / total_queries if total_queries else 0.0)
            completion_runs.append(tasks_solved / len(ds.tasks) if ds.tasks else 0.0)
            if run == 0:
                first_run_outcomes[t] = per_task
        per_temperature[t] = {s: _mean_std(stage_runs[s]) for s in STAGE_NAMES}
        completion[t] = _mean_std(completion_runs)

    best = max(temperatures, key=lambda t: per_temperature[t]["semantic_repair"].mean)
    return EvalReport(
        dataset=ds.name,
        runs=runs,
        seed=seed,
        temperatures=temperatures,
        per_temperature=per_temperature,
        task_completion=completion,
        best_temperature=best,
        per_task=first_run_outcomes.get(best, {}),
        transport_errors=transport_errors,
        model_kind=cfg.model.kind,
    )


def replay_feedback(ds: Dataset, banks: Banks, cfg: PipelineConfig) -> int:
    """Run each query of each task and feed its reference solution back;
    returns the number of accepted bank entries."""
    accepted = 0
    for task_id in sorted(ds.tasks):
        spec = ds.tasks[task_id]
        if not spec.reference_solutions:
            continue
        final_code = spec.reference_solutions[0]
        for query, _user in spec.queries:
            result = synthesize(spec, banks, cfg, query=query)
            if result.transport_error:
                continue
            try:
                outcome = record_feedback(spec, query, final_code, result, banks, cfg)
            except ValueError:
                continue
            accepted += outcome.bank_added
    return accepted


def temporal_run(
    session1: Dataset,
    session2: Dataset,
    banks: Banks,
    cfg: PipelineConfig,
    runs: int = 3,
    temperatures: Sequence[float] = (0.0,),
    strict: bool = True,
    seed: int = 0,
) -> tuple[EvalReport, EvalReport]:
    """Evaluate session 2 with the initial banks, replay session 1
    feedback through the banks, then evaluate session 2 again."""
    pre = evaluate(session2, banks, cfg, runs, temperatures, strict, seed)
    replay_feedback(session1, banks, cfg)
    post = evaluate(session2, banks, cfg, runs, temperatures, strict, seed)
    return pre, post
