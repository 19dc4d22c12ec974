#!/usr/bin/env python3
# The three post-processing repair stages, run by hand on small examples.

from jigsaw.lang import parse, unparse
from jigsaw.repair import (
    Candidate, SearchBudget, candidate_receivers, enumerate_candidates,
    extract_call_chain, fix_variable_names, infer_argument_pool,
)
from jigsaw.tables import Env, FrameValue

left = FrameValue.make({"k": ["a", "b"], "lval": [1, 2]})
right = FrameValue.make({"k": ["b"], "rval": [20]})
env = Env({"df1": left, "df2": right})

# 1. variable-name repair: permutations of in-scope names + retargeting
candidate = Candidate.from_program(parse("dfout = df1.merge(df2)"))
for fixed in fix_variable_names(candidate, env, "dfout"):
    print("varfix candidate:", fixed.source)

# 2. argument repair: the call chain stays, the arguments are searched
query = "replace 'United States' in 'location' by 'US' and '3434' in 'zip' by '4343'"
places = FrameValue.make({
    "location": ["United States", "France"],
    "zip": [3434, 94025],
})
env2 = Env({"dfin": places})
flat = Candidate.from_program(parse("dfout = dfin.replace({'United States':'US', 3434:4343})"))
chain = extract_call_chain(flat.program)
pool = infer_argument_pool(query, flat, env2)
print("\ncall chain:", chain)
print("string pool:", pool.strings)
print("number pool:", pool.numbers)

budget = SearchBudget(max_programs=20000)
target = "dfout = dfin.replace({'location': {'United States': 'US'}, 'zip': {3434: 4343}})"
for i, out in enumerate(enumerate_candidates(chain, pool, candidate_receivers(flat, env2),
                                             budget, env2, "dfout")):
    if out.source == target:
        print(f"nested replace found after {i + 1} programs")
        break
