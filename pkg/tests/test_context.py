import itertools

import pytest

from jigsaw.context import (
    BankEntry, ContextBank, NoContext, PluggableEmbedding, Tfidf, TfidfIndex,
    d_edit, d_tfidf, select_context, tokenize, update_bank,
)


def reference_levenshtein(a, b):
    # plain DP matrix, kept independent of the implementation under test
    import re
    a = re.sub(r"\s+", " ", a.strip())
    b = re.sub(r"\s+", " ", b.strip())
    m = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        m[i][0] = i
    for j in range(len(b) + 1):
        m[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            m[i][j] = min(
                m[i - 1][j] + 1,
                m[i][j - 1] + 1,
                m[i - 1][j - 1] + (a[i - 1] != b[j - 1]),
            )
    return m[len(a)][len(b)]


def test_d_edit_identity():
    assert d_edit("abc", "abc") == 0
    assert d_edit("", "abc") == 3


def test_d_edit_ix_to_loc():
    a = "dfout = dfin.ix[3, 'C']"
    b = "dfout = dfin.loc[3, 'C']"
    assert reference_levenshtein(a, b) == 3
    assert d_edit(a, b) == 3


@pytest.mark.parametrize("a,b", [
    ("sort df by col A", "sort df by col B"),
    ("drop duplicate rows", "df = df.drop_duplicates()"),
    ("  spaced   out  text ", "spaced out text"),
    ("replace 'France' with 'FR'", "replace 'Paris' with 'PAR'"),
])
def test_d_edit_matches_reference(a, b):
    assert d_edit(a, b) == reference_levenshtein(a, b)


def test_d_edit_normalizes_whitespace():
    assert d_edit("a   b", "a b") == 0
    assert d_edit(" a b ", "a b") == 0


def test_tokenize_keeps_quoted_literals_whole():
    toks = tokenize("replace 'United States' in 'location' by 'US'")
    assert "united states" in toks
    assert "location" in toks
    assert "replace" in toks


def test_d_tfidf_properties():
    queries = [
        "sort df by col A",
        "sort df by col B",
        "completely unrelated words here",
    ]
    index = TfidfIndex(queries)
    assert d_tfidf(index, queries[0], queries[0]) == 0.0
    disjoint = d_tfidf(index, "sort df by col A", "completely unrelated words here")
    assert disjoint == pytest.approx(1.0)
    near = d_tfidf(index, "sort df by col A", "sort df by col B")
    assert 0.0 < near < disjoint


def test_d_tfidf_reference_formula():
    # compute the expected cosine by hand for a two-document index
    import math
    docs = ["alpha beta gamma", "alpha delta"]
    index = TfidfIndex(docs)
    n = 2
    idf = {
        "alpha": math.log((1 + n) / (1 + 2)) + 1,
        "beta": math.log((1 + n) / (1 + 1)) + 1,
        "gamma": math.log((1 + n) / (1 + 1)) + 1,
        "delta": math.log((1 + n) / (1 + 1)) + 1,
    }
    va = {t: idf[t] for t in ("alpha", "beta", "gamma")}
    vb = {t: idf[t] for t in ("alpha", "delta")}
    na = math.sqrt(sum(w * w for w in va.values()))
    nb = math.sqrt(sum(w * w for w in vb.values()))
    cos = (va["alpha"] * vb["alpha"]) / (na * nb)
    assert d_tfidf(index, docs[0], docs[1]) == pytest.approx(1 - cos)


def make_bank(pairs, clock=None):
    ticker = itertools.count(1)
    bank = ContextBank(clock=(clock or (lambda: float(next(ticker)))))
    for q, code in pairs:
        bank.add(q, code)
    return bank


def test_select_context_exact_match_first():
    bank = make_bank([
        ("find the mean of data", "data.mean()"),
        ("sort df by column 'a'", "df = df.sort_values(by='a')"),
        ("drop duplicate rows of df", "df = df.drop_duplicates()"),
    ])
    picked = select_context(bank, "sort df by column 'a'", Tfidf(k=2))
    assert picked[0].question == "sort df by column 'a'"
    assert len(picked) == 2


def test_select_context_k_limits_and_no_context():
    bank = make_bank([(f"task number {i} does thing {i}", f"x{i} = y{i}") for i in range(8)])
    assert select_context(bank, "task number 3", NoContext()) == []
    assert len(select_context(bank, "task number 3 does thing 3", Tfidf(k=4))) == 4
    assert len(select_context(bank, "anything", Tfidf(k=20))) == 8


def test_select_context_every_entry_ranks_itself_first():
    bank = make_bank([
        ("replace 'France' with 'FR' in country column", "df = df.replace('France', 'FR')"),
        ("compute the rolling mean of column 'A'", "out = df['A'].rolling(3).mean()"),
        ("drop rows with missing values", "out = df.loc[~df.isnull().any(axis=1)]"),
    ])
    for entry in bank.entries:
        picked = select_context(bank, entry.query, Tfidf(k=1))
        assert picked[0].question == entry.query


def test_select_context_deterministic_tie_break():
    bank = make_bank([
        ("zzz common words", "a = 1"),
        ("aaa common words", "b = 2"),
    ])
    picked = select_context(bank, "common words", Tfidf(k=2))
    # equal distance: earlier added_at wins
    assert [p.question for p in picked] == ["zzz common words", "aaa common words"]


def test_pluggable_embedding_strategy():
    bank = make_bank([("alpha", "a = 1"), ("beta", "b = 2")])

    def provider(text):
        return [1.0, 0.0] if "alpha" in text else [0.0, 1.0]

    picked = select_context(bank, "alpha query", PluggableEmbedding(k=1, provider=provider))
    assert picked[0].question == "alpha"


def test_update_bank_accept_reject_dedupe():
    bank = make_bank([("sort the frame by column 'alpha'", "df = df.sort_values(by='alpha')")])
    # accept: outputs contain the code verbatim, no similar banked query
    added = update_bank(bank, "count duplicate rows of the frame",
                        "n = df.duplicated().sum()",
                        outputs=["n = df.duplicated().sum()"])
    assert added and len(bank) == 2
    # reject: nearest output too far
    added = update_bank(bank, "join the two frames together",
                        "out = df1.merge(df2)",
                        outputs=["something = completely.unrelated('and long')"])
    assert not added and len(bank) == 2
    # reject: similar query already banked
    added = update_bank(bank, "sort the frame by column 'alpha' quickly",
                        "df = df.sort_values(by='alpha')",
                        outputs=["df = df.sort_values(by='alpha')"])
    assert not added and len(bank) == 2


def test_update_bank_idempotent():
    bank = make_bank([])
    for _ in range(2):
        update_bank(bank, "compute the mean of data", "out = data.mean()",
                    outputs=["out = data.mean()"])
    assert len(bank) == 1


def test_update_bank_rejects_nonparsing_code():
    bank = make_bank([])
    with pytest.raises(ValueError):
        update_bank(bank, "q", "def nope():", outputs=["def nope():"])
    assert len(bank) == 0


def test_update_bank_monotone_growth():
    bank = make_bank([])
    sizes = []
    for i in range(5):
        update_bank(bank, f"totally distinct query number {i} about topic{i}",
                    f"x{i} = df{i}.head({i + 1})",
                    outputs=[f"x{i} = df{i}.head({i + 1})"])
        sizes.append(len(bank))
    assert sizes == sorted(sizes)


def test_bank_save_load_round_trip(tmp_path):
    bank = make_bank([("a query", "x = y"), ("b query", "y = z")])
    path = tmp_path / "bank.json"
    bank.save(str(path))
    loaded = ContextBank.load(str(path))
    assert [(e.query, e.code, e.source, e.added_at) for e in loaded.entries] == \
           [(e.query, e.code, e.source, e.added_at) for e in bank.entries]
