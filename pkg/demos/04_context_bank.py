#!/usr/bin/env python3
# Context bank: TF-IDF selection and the gated feedback update.

from jigsaw.context import ContextBank, Tfidf, d_edit, d_tfidf, select_context, update_bank

bank = ContextBank()
seed_pairs = [
    ("find the mean of data", "out = data.mean()"),
    ("sort df by column 'a'", "df = df.sort_values(by='a')"),
    ("drop duplicate rows of df", "df = df.drop_duplicates()"),
    ("merge the two frames", "out = df1.merge(df2)"),
    ("rows of df where 'v' is above 10", "out = df[df['v'] > 10]"),
]
for q, code in seed_pairs:
    bank.add(q, code)

query = "sort my frame by the column 'price'"
for pair in select_context(bank, query, Tfidf(k=2)):
    print(f"selected: {pair.question!r} -> {pair.answer}")

print("\nedit distance ix->loc:",
      d_edit("dfout = dfin.ix[3, 'C']", "dfout = dfin.loc[3, 'C']"))

# The update rule only admits pairs the pipeline nearly produced itself,
# and skips queries too close to an existing entry.
added = update_bank(bank, "compute the average of every column",
                    "out = df.mean()", outputs=["out = df.mean()"])
print("novel query admitted:", added, f"(bank size {len(bank)})")

again = update_bank(bank, "compute the average of every column please",
                    "out = df.mean()", outputs=["out = df.mean()"])
print("near-duplicate admitted:", again, f"(bank size {len(bank)})")

rejected = update_bank(bank, "transpose the frame",
                       "out = df.transpose()",
                       outputs=["something = completely.unrelated(1, 2, 3)"])
print("far-from-outputs admitted:", rejected, f"(bank size {len(bank)})")
print("\nTF-IDF distance of the duplicate:",
      round(d_tfidf(bank.index, "compute the average of every column",
                    "compute the average of every column please"), 3))
