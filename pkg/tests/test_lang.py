import pytest

from jigsaw.lang import (
    Assign, Attr, Binary, Call, CompareChain, DictLit, ExprStmt, Literal,
    NameRef, ParseError, Program, Subscript, TupleLit, Unary,
    free_names, parse, try_parse, unparse,
)

from corpus import PRECEDENCE_SNIPPETS, SNIPPETS
from ref_parser import reference_parse


def test_parse_replace_snippet_shape():
    p = parse("dfout = dfin.replace({'location':{'United States':'US'},'zip':{3434:4343}})")
    stmt = p.stmts[0]
    assert isinstance(stmt, Assign)
    assert stmt.target == NameRef("dfout")
    call = stmt.value
    assert isinstance(call, Call)
    assert call.callee == Attr(NameRef("dfin"), "replace")
    (arg,) = call.args
    assert isinstance(arg, DictLit)
    assert arg.pairs[0][0] == Literal("location")


def test_parse_minimal_assignment():
    p = parse("x = y")
    assert p == Program((Assign(NameRef("x"), NameRef("y")),))


def test_unparenthesized_filter_is_a_chain():
    # `df['foo'] > (70|df['foo']) < 34`: | binds tighter than comparisons
    p = parse("df=df[df['foo']>70|df['foo']<34]")
    key = p.stmts[0].value.key
    assert isinstance(key, CompareChain)
    assert key.ops == ("gt", "lt")
    middle = key.operands[1]
    assert isinstance(middle, Binary) and middle.op == "or_"
    assert middle.left == Literal(70)
    assert middle.right == Subscript(NameRef("df"), Literal("foo"))
    assert parse("df=df[df['foo']>70|df['foo']<34]") == reference_parse(
        "df=df[df['foo']>70|df['foo']<34]"
    )


def test_unparse_bitwise_not_subscript():
    p = parse("dfout = data[~data.index.isin(test.index)]")
    assert unparse(p) == "dfout = data[~data.index.isin(test.index)]"
    inner = p.stmts[0].value.key
    assert isinstance(inner, Unary) and inner.op == "bitnot"


def test_unparse_fixed_point():
    assert unparse(parse("x = y")) == "x = y"


def test_unparse_forces_parens_around_chains():
    p = Program((
        ExprStmt(Binary(
            "or_",
            CompareChain((NameRef("a"), NameRef("b")), ("lt",)),
            CompareChain((NameRef("c"), NameRef("d")), ("gt",)),
        )),
    ))
    assert unparse(p) == "(a < b) | (c > d)"
    assert parse(unparse(p)) == p


def test_free_names():
    assert free_names(parse("dfout = df1.merge(df2)")) == {"df1", "df2"}
    assert free_names(parse("x = y")) == {"y"}
    assert free_names(parse("df = df.country.str.remove('Name:')")) == {"df"}
    # subscript targets read their base
    assert free_names(parse("df['c'] = s")) == {"s", "df"}
    # once assigned, later reads are not free
    assert free_names(parse("x = 1\ny = x")) == set()


@pytest.mark.parametrize("source", SNIPPETS)
def test_round_trip(source):
    tree = parse(source)
    text = unparse(tree)
    again = parse(text)
    assert again == tree
    assert unparse(again) == text


@pytest.mark.parametrize("source", PRECEDENCE_SNIPPETS)
def test_precedence_matches_python_grammar(source):
    assert parse(source) == reference_parse(source)


def test_corpus_is_large_enough():
    assert len(SNIPPETS) >= 50
    assert len(PRECEDENCE_SNIPPETS) >= 10


def test_loc_trailing_full_slice_normalizes():
    a = parse("dfout = df.loc[df.isnull().any(axis=1), :]")
    b = parse("dfout = df.loc[df.isnull().any(axis=1)]")
    assert a == b
    # a leading slice is meaningful and survives
    c = parse("s = df.loc[:, 'col']")
    key = c.stmts[0].value.key
    assert isinstance(key, TupleLit) and len(key.items) == 2
    assert unparse(c) == "s = df.loc[:, 'col']"
    assert parse(unparse(c)) == c


@pytest.mark.parametrize("source,fragment", [
    ("for x in y: pass", "for"),
    ("def f(): pass", "def"),
    ("x = ", "expression"),
    ("x = (1", ")"),
    ("df[1", "]"),
    ("x = 'unterminated", "unterminated"),
    ("x = $", "unknown"),
    ("", "empty"),
    ("x = {f(): 1}", "dict keys"),
    ("f(a=1, 2)", "positional"),
    ("1 = x", "assignment target"),
    ("a = b = c", "chained"),
    ("x=1\n" * 9, "too many"),
])
def test_parse_errors(source, fragment):
    err = try_parse(source)
    assert isinstance(err, ParseError)
    assert fragment.lower() in str(err).lower()


def test_parse_error_positions_in_bounds():
    src = "x = $"
    err = try_parse(src)
    assert isinstance(err, ParseError)
    assert 1 <= err.line <= src.count("\n") + 1
    assert 1 <= err.col <= len(src) + 1


def test_literal_equality_is_type_exact():
    assert Literal(1) != Literal(1.0)
    assert Literal(True) != Literal(1)
    assert Literal(1) == Literal(1)
    assert parse("x = 1") != parse("x = 1.0")
    assert parse("x = True") != parse("x = 1")


def test_comments_are_skipped():
    assert parse("x = y  # incorrect") == parse("x = y")


def test_multi_statement_programs():
    p = parse("a = df['x']; b = a.sum()")
    assert len(p.stmts) == 2
    q = parse("a = df['x']\nb = a.sum()\n")
    assert p == q


def test_parse_is_total_on_junk():
    for junk in ["\x00", "((((", "}{", "0x", "...", "@", "x==", "~"]:
        result = try_parse(junk)
        assert isinstance(result, (Program, ParseError))
