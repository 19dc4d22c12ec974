#!/usr/bin/env python3
# The table-expression language: parsing, canonical unparsing, free names.

from jigsaw.lang import free_names, parse, try_parse, unparse

snippets = [
    "dfout = dfin.replace({'location':{'United States':'US'},'zip':{3434:4343}})",
    "train = data[~data.index.isin(test.index)]",
    "df=df[df['foo']>70|df['foo']<34]",
    'dfin["A"]=dfin["A"].rolling(3).mean()',
]

for source in snippets:
    tree = parse(source)
    print("source:   ", source)
    print("canonical:", unparse(tree))
    print("free names:", sorted(free_names(tree)))
    assert parse(unparse(tree)) == tree  # round-trip
    print()

# Chained comparisons parse the way Python reads them, so the classic
# missing-parentheses bug produces the same tree a Python parser builds:
tree = parse("df=df[df['foo']>70|df['foo']<34]")
key = tree.stmts[0].value.key
print("unparenthesized filter parses as a comparison chain:", type(key).__name__)
print("middle operand:", unparse(parse("x")) and unparse(tree))

# Anything outside the subset is a clean ParseError, never a crash.
err = try_parse("for x in y: pass")
print("\nreserved statement ->", err)
