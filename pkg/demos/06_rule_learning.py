#!/usr/bin/env python3
# Learning AST-to-AST rewrite rules from (incorrect, correct) edit pairs:
# diff, perturb, anti-unify, cluster.

from jigsaw.lang import parse, unparse
from jigsaw.learn import Cluster, EditPair, add_pair, perturb
from jigsaw.rules import apply_rule, gtree_to_json

def pair(before, after):
    return EditPair(parse(before), parse(after))

# Two tasks that both needed a missing bitwise-not inside a subscript.
edits = [
    pair("dfout = df.loc[df.isnull().any(axis=1), :]",
         "dfout = df.loc[~df.isnull().any(axis=1)]"),
    pair('df_p = df_p.loc[df_per["Name"].str.contains("Ch")]',
         'df_p = df_p.loc[~df_per["Name"].str.contains("Ch")]'),
]

clusters: list[Cluster] = []
for e in edits:
    add_pair(clusters, e)
print(f"{len(clusters)} cluster(s) after the two related edits")
rule = clusters[0].rule
print("guard:   ", gtree_to_json(rule.guard))
print("template:", gtree_to_json(rule.template))

# The learned rule fires on an unseen snippet with fresh names; one
# candidate per match site, and the right one is among them.
new_code = parse("train = data[data.index.isin(test.index)]")
outputs = {unparse(out) for out in apply_rule(new_code, rule)}
target = "train = data[~data.index.isin(test.index)]"
print(f"fires at {len(outputs)} sites; target produced:", target in outputs)

# An unrelated edit starts its own cluster instead of over-generalizing.
add_pair(clusters, pair("dfout = dfin.ix[3, 'C']", "dfout = dfin.loc[3, 'C']"))
print(f"{len(clusters)} clusters after an unrelated ix->loc edit")

# Perturbation keeps rules from overfitting to spellings: names and
# literals vary consistently on both sides of the pair.
variant = perturb(pair("a == 1", "a.Equals(1)"), seed=0, n=1)[0]
print("perturbed pair:", unparse(variant.before), "->", unparse(variant.after))
