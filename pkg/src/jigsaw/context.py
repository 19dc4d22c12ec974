"""Context bank: storage, TF-IDF similarity index, top-k selection and the
feedback-driven bank update.

The bank holds (natural-language query, code) pairs.  Selection picks the
entries closest to the current query under a TF-IDF cosine distance; the
update rule admits a new pair only when the synthesis pipeline got close
to the submitted code (edit distance) and no similar query is already
banked (TF-IDF distance).
"""

from __future__ import annotations

import json
import math
import os
import re
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .lang import parse
from .lang.lexer import ParseError
from .modelio import PromptPair

DEFAULT_EPS_CODE = 25
DEFAULT_EPS_BANK = 0.15

_WS_RUN = re.compile(r"\s+")
_QUOTED = re.compile(r"'([^']*)'|\"([^\"]*)\"")
_WORD = re.compile(r"[a-z0-9_]+")


def d_edit(a: str, b: str) -> int:
    """Character Levenshtein distance after whitespace normalization."""
    a = _WS_RUN.sub(" ", a.strip())
    b = _WS_RUN.sub(" ", b.strip())
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[len(b)]


def tokenize(text: str) -> list[str]:
    """Lowercase word tokens; quoted literals are kept whole."""
    tokens: list[str] = []
    rest: list[str] = []
    last = 0
    for m in _QUOTED.finditer(text):
        rest.append(text[last:m.start()])
        inner = m.group(1) if m.group(1) is not None else m.group(2)
        tokens.append(inner.lower())
        last = m.end()
    rest.append(text[last:])
    for chunk in rest:
        tokens.extend(_WORD.findall(chunk.lower()))
    return tokens


@dataclass(frozen=True)
class BankEntry:
    query: str
    code: str
    source: str = "seed"  # seed | feedback
    added_at: float = 0.0


class TfidfIndex:
    """Smoothed TF-IDF with L2-normalized vectors.

    idf(t) = ln((1 + N) / (1 + df_t)) + 1 over the indexed entries.
    """

    def __init__(self, texts: Sequence[str]):
        self.doc_tokens = [tokenize(t) for t in texts]
        df: dict[str, int] = {}
        for toks in self.doc_tokens:
            for t in set(toks):
                df[t] = df.get(t, 0) + 1
        n = len(self.doc_tokens)
        self.idf = {t: math.log((1 + n) / (1 + c)) + 1 for t, c in df.items()}
        self.vocabulary = {t: i for i, t in enumerate(sorted(self.idf))}
        self.doc_vectors = [self._vector_of(toks) for toks in self.doc_tokens]

    def _vector_of(self, tokens: list[str]) -> dict[str, float]:
        counts: dict[str, int] = {}
        for t in tokens:
            if t in self.idf:
                counts[t] = counts.get(t, 0) + 1
        vec = {t: c * self.idf[t] for t, c in counts.items()}
        norm = math.sqrt(sum(w * w for w in vec.values()))
        if norm > 0:
            vec = {t: w / norm for t, w in vec.items()}
        return vec

    def vector(self, text: str) -> dict[str, float]:
        return self._vector_of(tokenize(text))


def _cosine(a: dict[str, float], b: dict[str, float]) -> float:
    if len(b) < len(a):
        a, b = b, a
    return sum(w * b.get(t, 0.0) for t, w in a.items())


def d_tfidf(index: TfidfIndex, a: str, b: str) -> float:
    """1 - cosine similarity of TF-IDF vectors, in [0, 1]."""
    ta, tb = tokenize(a), tokenize(b)
    if sorted(ta) == sorted(tb):
        return 0.0
    va, vb = index._vector_of(ta), index._vector_of(tb)
    if not va or not vb:
        return 1.0
    return min(1.0, max(0.0, 1.0 - _cosine(va, vb)))


@dataclass(frozen=True)
class NoContext:
    pass


@dataclass(frozen=True)
class Tfidf:
    k: int = 4

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")


@dataclass(frozen=True)
class PluggableEmbedding:
    """Delegates similarity to an external embedding provider."""

    k: int = 4
    provider: Optional[Callable[[str], Sequence[float]]] = None


SelectionStrategy = NoContext | Tfidf | PluggableEmbedding


class ContextBank:
    """Owns the entries and keeps the TF-IDF index in sync."""

    def __init__(self, entries: Sequence[BankEntry] = (), clock: Callable[[], float] = time.time):
        self.entries: list[BankEntry] = list(entries)
        self.clock = clock
        self.rebuild()

    def __len__(self) -> int:
        return len(self.entries)

    def rebuild(self) -> None:
        self.index = TfidfIndex([e.query for e in self.entries])

    def add(self, query: str, code: str, source: str = "seed") -> BankEntry:
        entry = BankEntry(query, code, source, self.clock())
        self.entries.append(entry)
        self.rebuild()
        return entry

    # ------------------------------------------------------------------
    # persistence: JSON array of {"q","code","source","ts"}

    def to_json(self) -> list[dict]:
        return [
            {"q": e.query, "code": e.code, "source": e.source, "ts": e.added_at}
            for e in self.entries
        ]

    def save(self, path: str) -> None:
        tmp = f"{path}.tmp"
        with open(tmp, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str, clock: Callable[[], float] = time.time) -> "ContextBank":
        with open(path) as fh:
            raw = json.load(fh)
        entries = [
            BankEntry(r["q"], r["code"], r.get("source", "seed"), r.get("ts", 0.0))
            for r in raw
        ]
        return cls(entries, clock)


def select_context(
    bank: ContextBank, query: str, strategy: SelectionStrategy
) -> list[PromptPair]:
    """Pick the prompt pairs closest to the query under the strategy.

    Ties break by earlier added_at, then lexicographic query; the best
    match comes first.
    """
    if isinstance(strategy, NoContext):
        return []
    if isinstance(strategy, PluggableEmbedding):
        if strategy.provider is None:
            raise ValueError("PluggableEmbedding needs a provider")
        qv = list(strategy.provider(query))
        scored = []
        for e in bank.entries:
            ev = list(strategy.provider(e.query))
            num = sum(x * y for x, y in zip(qv, ev))
            den = math.sqrt(sum(x * x for x in qv)) * math.sqrt(sum(y * y for y in ev))
            dist = 1.0 - (num / den if den else 0.0)
            scored.append((dist, e.added_at, e.query, e))
        scored.sort(key=lambda t: t[:3])
        return [PromptPair(e.query, e.code) for _, _, _, e in scored[: strategy.k]]
    assert isinstance(strategy, Tfidf)
    scored = [
        (d_tfidf(bank.index, query, e.query), e.added_at, e.query, e)
        for e in bank.entries
    ]
    scored.sort(key=lambda t: t[:3])
    return [PromptPair(e.query, e.code) for _, _, _, e in scored[: strategy.k]]


def update_bank(
    bank: ContextBank,
    query: str,
    code: str,
    outputs: Sequence[str],
    eps_code: int = DEFAULT_EPS_CODE,
    eps_bank: float = DEFAULT_EPS_BANK,
) -> bool:
    """Feedback-driven bank update; returns True when an entry was added.

    The pair is admitted only when the pipeline's own outputs came within
    eps_code edit distance of the submitted code (some evidence it is a
    plausible answer for the query) and no banked query is already within
    eps_bank TF-IDF distance.
    """
    try:
        parse(code)
    except ParseError as err:
        raise ValueError(f"feedback code does not parse: {err}") from err
    if not outputs or min(d_edit(o, code) for o in outputs) > eps_code:
        return False
    if bank.entries:
        nearest = min(d_tfidf(bank.index, query, e.query) for e in bank.entries)
        if nearest < eps_bank:
            return False
    bank.add(query, code, source="feedback")
    return True
