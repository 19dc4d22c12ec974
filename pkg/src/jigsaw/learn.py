"""Learning rewrite rules from (incorrect, correct) edit pairs.

The flow: diff each pair down to its single edit site, augment pairs
with perturbed copies (consistent renaming of variables and literals so
rules do not overfit to spellings), anti-unify the before-subtrees into
a guard with typed holes, rebuild the afters as a template over those
holes, then generalize greedily by widening hole-bearing guard subtrees
into single holes wherever the template stays expressible.  Clustering
is greedy and online: a new pair joins the first cluster whose rule can
be re-learnt to cover it, otherwise it starts its own cluster.
"""

from __future__ import annotations

import json
import os
import random
import string
import time
import zlib
from dataclasses import dataclass, field, replace as dc_replace
from typing import Optional, Sequence

from .context import d_edit
from .lang import ast as A
from .lang import parse, unparse
from .lang.lexer import ParseError
from .modelio import rename_names, _map_program, _rebuild
from .rules import (
    EXPR_TAGS, GNode, GTree, Hole, MalformedTree, Ref, RewriteRule,
    apply_rule, gtree_from_json, gtree_to_json, gtree_to_program,
    program_to_gtree, rule_from_json, rule_to_json,
)

DEFAULT_PERTURBATIONS = 3
DEFAULT_EPS_PAIR = 25

_SITE_TAGS = EXPR_TAGS | {"member", "assign", "exprstmt"}


class LearnFail(Exception):
    def __init__(self, reason: str, detail: str = ""):
        assert reason in ("inexpressible", "inconsistent")
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


@dataclass(frozen=True)
class EditPair:
    before: A.Program
    after: A.Program
    task_id: str = ""
    provenance: str = "seed"  # seed | feedback | perturbed:<parent>

    def __post_init__(self):
        if self.before == self.after:
            raise ValueError("edit pair sides must differ")

    def key(self) -> str:
        return unparse(self.before) + "\n=>\n" + unparse(self.after)


# ----------------------------------------------------------------------
# tree diff


def tree_diff(before: A.Program, after: A.Program) -> Optional[tuple[tuple, GNode, GNode]]:
    """Smallest single-subtree replacement turning before into after.

    Returns (path into the program gtree, before-subtree, after-subtree),
    or None when the trees are identical or differ in more than one
    statement.  Within a statement, when no single subtree suffices the
    whole statement becomes the site.
    """
    gb, ga = program_to_gtree(before), program_to_gtree(after)
    if gb == ga:
        return None
    if len(gb.children) != len(ga.children):
        return None
    diff_stmts = [
        i for i, (b, a) in enumerate(zip(gb.children, ga.children)) if b != a
    ]
    if len(diff_stmts) != 1:
        return None
    path: tuple = (diff_stmts[0],)
    b, a = gb.children[path[0]], ga.children[path[0]]
    while True:
        if b.tag != a.tag or b.value != a.value or len(b.children) != len(a.children):
            break
        diffs = [i for i, (cb, ca) in enumerate(zip(b.children, a.children)) if cb != ca]
        if len(diffs) != 1:
            break
        path = path + (diffs[0],)
        b, a = b.children[diffs[0]], a.children[diffs[0]]
    # climb back to a position the rule language can express
    while path and _node_at(gb, path).tag not in _SITE_TAGS:
        path = path[:-1]
        b = _node_at(gb, path)
        a = _node_at(ga, path)
    return path, b, a


def _node_at(g: GNode, path: tuple) -> GNode:
    for i in path:
        g = g.children[i]
    return g


# ----------------------------------------------------------------------
# perturbation


def _collect_names(p: A.Program) -> list[str]:
    from .lang import walk_program

    seen: list[str] = []
    for node in walk_program(p):
        if isinstance(node, A.NameRef) and node.id != "pd" and node.id not in seen:
            seen.append(node.id)
    return seen


def _collect_literals(p: A.Program) -> list[tuple[str, object]]:
    from .lang import walk_program
    from .rules import _lit_payload

    seen: list[tuple[str, object]] = []
    for node in walk_program(p):
        if isinstance(node, A.Literal):
            payload = _lit_payload(node.value)
            if payload[0] in ("int", "float", "str", "bool") and payload not in seen:
                seen.append(payload)
    return seen


def _fresh_string(rng: random.Random, like: str, taken: set) -> str:
    length = max(2, len(like))
    while True:
        candidate = "".join(rng.choice(string.ascii_lowercase) for _ in range(length))
        if candidate != like and candidate not in taken:
            return candidate


def _replace_literals(p: A.Program, mapping: dict) -> A.Program:
    from .rules import _lit_payload

    def visit(e: A.Expr) -> A.Expr:
        if isinstance(e, A.Literal):
            payload = _lit_payload(e.value)
            if payload in mapping:
                return A.Literal(mapping[payload])
        return e

    return _map_program(p, lambda e: _rebuild(e, visit))


def perturb(pair: EditPair, seed: int, n: int = DEFAULT_PERTURBATIONS) -> list[EditPair]:
    """Perturbed copies: one consistent renaming of the pair's variable
    names plus one consistent same-kind replacement of each literal,
    applied identically to both sides.  Deterministic in seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    names = _collect_names(pair.before)
    literals = _collect_literals(pair.before)
    out: list[EditPair] = []
    for k in range(1, n + 1):
        rng = random.Random(f"perturb:{seed}:{k}")
        name_map = {name: f"{name}_p{k}" for name in names}
        lit_map: dict = {}
        taken = {v for _, v in literals if isinstance(v, str)}
        for kind, value in literals:
            if kind == "int":
                lit_map[(kind, value)] = value + 100 * k
            elif kind == "float":
                lit_map[(kind, value)] = value + 100.0 * k
            elif kind == "bool":
                lit_map[(kind, value)] = not value
            else:
                fresh = _fresh_string(rng, value, taken)
                taken.add(fresh)
                lit_map[(kind, value)] = fresh
        before = _replace_literals(rename_names(pair.before, name_map), lit_map)
        after = _replace_literals(rename_names(pair.after, name_map), lit_map)
        if before == after:
            # no names or literals to vary: keep a structural copy
            before, after = pair.before, pair.after
        out.append(EditPair(before, after, pair.task_id, f"perturbed:{pair.provenance}"))
    return out


def pair_seed(pair: EditPair) -> int:
    return zlib.crc32(pair.key().encode())


def augmented(pairs: Sequence[EditPair], n: int = DEFAULT_PERTURBATIONS) -> list[EditPair]:
    """Each pair followed by its perturbed copies."""
    out: list[EditPair] = []
    for pair in pairs:
        out.append(pair)
        out.extend(perturb(pair, pair_seed(pair), n))
    return out


# ----------------------------------------------------------------------
# anti-unification

class _Incompat(Exception):
    pass


@dataclass
class _APat:
    """Annotated pattern node: guard shape plus per-pair matched subtrees."""

    kind: str                      # equal | struct | hole
    matches: tuple                 # one concrete GNode per pair
    tag: str = ""
    value: object = None
    children: list = field(default_factory=list)
    hole_kind: str = ""


def _hole_kind_for(nodes: Sequence[GNode]) -> str:
    if all(n.tag in ("name", "member") for n in nodes):
        return "name"
    if all(n.tag == "lit" for n in nodes):
        return "literal"
    if all(n.tag in EXPR_TAGS for n in nodes):
        return "any_expr"
    raise _Incompat()


def _anti_unify(nodes: Sequence[GNode]) -> _APat:
    first = nodes[0]
    if all(n == first for n in nodes[1:]):
        return _APat("equal", tuple(nodes))
    tags = {n.tag for n in nodes}
    if len(tags) == 1:
        tag = first.tag
        if tag in ("name", "member"):
            return _APat("hole", tuple(nodes), hole_kind="name")
        if tag == "lit":
            return _APat("hole", tuple(nodes), hole_kind="literal")
        if all(n.value == first.value for n in nodes) and \
                all(len(n.children) == len(first.children) for n in nodes):
            try:
                kids = [
                    _anti_unify([n.children[i] for n in nodes])
                    for i in range(len(first.children))
                ]
                return _APat("struct", tuple(nodes), tag, first.value, kids)
            except _Incompat:
                pass
    return _APat("hole", tuple(nodes), hole_kind=_hole_kind_for(nodes))


def _apat_positions(root: _APat) -> list[tuple[tuple, _APat]]:
    out: list[tuple[tuple, _APat]] = []

    def visit(node: _APat, path: tuple) -> None:
        out.append((path, node))
        if node.kind == "struct":
            for i, c in enumerate(node.children):
                visit(c, path + (i,))

    visit(root, ())
    return out


def _apat_contains_hole(node: _APat) -> bool:
    if node.kind == "hole":
        return True
    if node.kind == "struct":
        return any(_apat_contains_hole(c) for c in node.children)
    return False


def _apat_replace(root: _APat, path: tuple, new: _APat) -> _APat:
    if not path:
        return new
    children = list(root.children)
    children[path[0]] = _apat_replace(children[path[0]], path[1:], new)
    return _APat(root.kind, root.matches, root.tag, root.value, children, root.hole_kind)


def _assign_hole_ids(root: _APat) -> tuple[GTree, dict[str, tuple], dict[str, str]]:
    """Convert to a guard pattern; holes with identical matches share an id."""
    groups: dict[tuple, str] = {}
    hole_matches: dict[str, tuple] = {}
    hole_kinds: dict[str, str] = {}

    def convert(node: _APat) -> GTree:
        if node.kind == "equal":
            return node.matches[0]
        if node.kind == "hole":
            key = (node.hole_kind, node.matches)
            if key not in groups:
                hid = f"h{len(groups) + 1}"
                groups[key] = hid
                hole_matches[hid] = node.matches
                hole_kinds[hid] = node.hole_kind
            return Hole(groups[key], node.hole_kind)
        return GNode(node.tag, node.value, tuple(convert(c) for c in node.children))

    guard = convert(root)
    return guard, hole_matches, hole_kinds


class _Inexpressible(Exception):
    pass


def _build_template(afters: Sequence[GNode], hole_matches: dict[str, tuple]) -> GTree:
    first = afters[0]
    if all(a == first for a in afters[1:]):
        return first
    for hid, matches in hole_matches.items():
        if all(a == m for a, m in zip(afters, matches)):
            return Ref(hid)
    tags = {a.tag for a in afters}
    if len(tags) == 1 and all(a.value == first.value for a in afters) and \
            all(len(a.children) == len(first.children) for a in afters):
        children = tuple(
            _build_template([a.children[i] for a in afters], hole_matches)
            for i in range(len(first.children))
        )
        return GNode(first.tag, first.value, children)
    raise _Inexpressible()


def _widen(root: _APat, afters: Sequence[GNode]) -> _APat:
    """Generalize: replace hole-bearing guard subtrees with single holes
    wherever the template can still be expressed.  Top-down, greedy."""
    changed = True
    while changed:
        changed = False
        for path, node in _apat_positions(root):
            if node.kind != "struct" or not _apat_contains_hole(node):
                continue
            try:
                _hole_kind_for(node.matches)
            except _Incompat:
                continue
            candidate_root = _apat_replace(
                root, path, _APat("hole", node.matches, hole_kind=_hole_kind_for(node.matches))
            )
            _, matches, _ = _assign_hole_ids(candidate_root)
            try:
                _build_template(afters, matches)
            except _Inexpressible:
                continue
            root = candidate_root
            changed = True
            break
    return root


def learn_rule(pairs: Sequence[EditPair]) -> RewriteRule:
    """Anti-unify the diff sites of the pairs into one guarded rewrite.

    The caller augments pairs with their perturbations beforehand.
    Raises LearnFail when the edits are structurally unrelated or the
    after-sides cannot be expressed over the guard's holes.
    """
    if not pairs:
        raise LearnFail("inconsistent", "no pairs")
    befores: list[GNode] = []
    afters: list[GNode] = []
    for pair in pairs:
        site = tree_diff(pair.before, pair.after)
        if site is None:
            raise LearnFail("inconsistent", "no single-site diff")
        _, b, a = site
        befores.append(b)
        afters.append(a)
    try:
        apat = _anti_unify(befores)
    except _Incompat as err:
        raise LearnFail("inconsistent", "edit sites are not in compatible positions") from err
    apat = _widen(apat, afters)
    guard, hole_matches, _ = _assign_hole_ids(apat)
    try:
        template = _build_template(afters, hole_matches)
    except _Inexpressible as err:
        raise LearnFail("inexpressible", "after-side is not expressible over the holes") from err
    rule = RewriteRule(id="", guard=guard, template=template, support=len(pairs))
    _verify_rule(rule, pairs)
    return rule


def _verify_rule(rule: RewriteRule, pairs: Sequence[EditPair]) -> None:
    for pair in pairs:
        outputs = apply_rule(pair.before, rule)
        if pair.after not in outputs:
            raise LearnFail("inexpressible", "rule does not reproduce a member pair")


# ----------------------------------------------------------------------
# clustering


@dataclass
class Cluster:
    id: str
    members: list[EditPair]
    rule: RewriteRule
    augmented_members: list[EditPair]
    created_order: int = 0


def _cluster_order_key(c: Cluster) -> tuple:
    # largest support first; ties go to the older cluster
    return (-len(c.members), c.created_order)


def add_pair(
    clusters: list[Cluster],
    pair: EditPair,
    n_perturbations: int = DEFAULT_PERTURBATIONS,
    clock=time.time,
) -> list[Cluster]:
    """Greedy online clustering: join the first cluster (largest support
    first) whose rule relearns successfully with the new pair, else
    start a new cluster.  Unlearnable pairs are dropped."""
    new_aug = [pair] + perturb(pair, pair_seed(pair), n_perturbations)
    for cluster in sorted(clusters, key=_cluster_order_key):
        try:
            rule = learn_rule(cluster.augmented_members + new_aug)
        except LearnFail:
            continue
        rule.id = cluster.rule.id
        rule.fire_count = cluster.rule.fire_count
        rule.match_attempts = cluster.rule.match_attempts
        rule.created_at = cluster.rule.created_at
        rule.support = len(cluster.members) + 1
        cluster.rule = rule
        cluster.members.append(pair)
        cluster.augmented_members.extend(new_aug)
        return clusters
    try:
        rule = learn_rule(new_aug)
    except LearnFail:
        return clusters
    order = max((c.created_order for c in clusters), default=-1) + 1
    rule.id = f"r{order}"
    rule.support = 1
    rule.created_at = clock()
    clusters.append(Cluster(rule.id, [pair], rule, list(new_aug), order))
    return clusters


def prune(
    rules: Sequence[RewriteRule],
    min_attempts: int = 50,
    min_fires: int = 1,
) -> list[RewriteRule]:
    """Drop rules that have been tried often enough without ever firing."""
    return [
        r for r in rules
        if not (r.match_attempts >= min_attempts and r.fire_count < min_fires)
    ]


def harvest_feedback(
    correct_codes: Sequence[str],
    candidates: Sequence,
    eps_pair: int = DEFAULT_EPS_PAIR,
) -> list[EditPair]:
    """Edit pairs from failing candidates near a correct code.

    Candidates need .source, .program and .status attributes; passing and
    non-parsing ones are skipped, as are corrections too far away.
    """
    if eps_pair <= 0:
        raise ValueError("eps_pair must be positive")
    corrects: list[tuple[str, A.Program]] = []
    for code in correct_codes:
        try:
            corrects.append((code, parse(code)))
        except ParseError:
            continue
    pairs: list[EditPair] = []
    seen: set[str] = set()
    for cand in candidates:
        if getattr(cand, "status", "") == "pass_io" or getattr(cand, "program", None) is None:
            continue
        for code, after in corrects:
            if cand.program == after:
                continue
            if d_edit(cand.source, code) > eps_pair:
                continue
            pair = EditPair(cand.program, after, provenance="feedback")
            if pair.key() in seen:
                continue
            seen.add(pair.key())
            pairs.append(pair)
    return pairs


# ----------------------------------------------------------------------
# persistent rule bank


class RuleBank:
    """Owns the clusters and their learned rules; single writer."""

    def __init__(self, clusters: Optional[list[Cluster]] = None, clock=time.time):
        self.clusters: list[Cluster] = clusters or []
        self.clock = clock

    @property
    def rules(self) -> list[RewriteRule]:
        return [c.rule for c in self.clusters]

    def __len__(self) -> int:
        return len(self.clusters)

    def add_pair(self, pair: EditPair, n_perturbations: int = DEFAULT_PERTURBATIONS) -> None:
        add_pair(self.clusters, pair, n_perturbations, self.clock)

    def record_attempts(self, rule_ids: Sequence[str]) -> None:
        ids = set(rule_ids)
        for c in self.clusters:
            if c.rule.id in ids:
                c.rule.match_attempts += 1

    def record_fire(self, rule_id: str) -> None:
        for c in self.clusters:
            if c.rule.id == rule_id:
                c.rule.fire_count += 1

    def prune(self, min_attempts: int = 50, min_fires: int = 1) -> int:
        kept = []
        for c in self.clusters:
            if c.rule.match_attempts >= min_attempts and c.rule.fire_count < min_fires:
                continue
            kept.append(c)
        removed = len(self.clusters) - len(kept)
        self.clusters = kept
        return removed

    # ------------------------------------------------------------------

    def to_json(self) -> list[dict]:
        out = []
        for c in self.clusters:
            obj = rule_to_json(c.rule)
            obj["members"] = [
                {
                    "before": unparse(m.before),
                    "after": unparse(m.after),
                    "task_id": m.task_id,
                    "provenance": m.provenance,
                }
                for m in c.members
            ]
            out.append(obj)
        return out

    def save(self, path: str) -> None:
        tmp = f"{path}.tmp"
        with open(tmp, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str, clock=time.time) -> "RuleBank":
        with open(path) as fh:
            raw = json.load(fh)
        clusters = []
        for order, obj in enumerate(raw):
            rule = rule_from_json(obj)
            members = [
                EditPair(
                    parse(m["before"]), parse(m["after"]),
                    m.get("task_id", ""), m.get("provenance", "seed"),
                )
                for m in obj.get("members", [])
            ]
            aug = augmented(members) if members else []
            clusters.append(Cluster(rule.id, members, rule, aug, order))
        return cls(clusters, clock)
