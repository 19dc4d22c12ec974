"""Property tests: random programs in the subset round-trip through the
canonical unparser."""

from hypothesis import given, settings
from hypothesis import strategies as st

from jigsaw.lang import ast as A
from jigsaw.lang import parse, unparse

names = st.from_regex(r"[a-z_][a-z0-9_]{0,6}", fullmatch=True).filter(
    lambda s: s not in ("pd", "in", "or", "and", "not", "is", "if", "for", "as", "del")
)

# negative numbers unparse through the unary-minus node, so literal
# payloads stay non-negative
cells = st.one_of(
    st.integers(min_value=0, max_value=10_000),
    st.floats(min_value=0.0, max_value=1e6, allow_nan=False, allow_infinity=False),
    st.text(alphabet="abcXYZ0189_ :'\"\\", max_size=8),
    st.booleans(),
    st.none(),
)

atoms = st.one_of(
    names.map(A.NameRef),
    cells.map(A.Literal),
)


def compound(children: st.SearchStrategy) -> st.SearchStrategy:
    dict_keys = st.one_of(
        names.map(A.NameRef),
        st.one_of(st.integers(min_value=0, max_value=99),
                  st.text(alphabet="abc", max_size=4)).map(A.Literal),
    )
    chains = st.lists(children, min_size=2, max_size=3).flatmap(
        lambda operands: st.lists(
            st.sampled_from(A.CMP_OPS),
            min_size=len(operands) - 1, max_size=len(operands) - 1,
        ).map(lambda ops: A.CompareChain(tuple(operands), tuple(ops)))
    )
    return st.one_of(
        st.builds(A.Attr, children, names),
        st.builds(A.Subscript, children, children),
        st.builds(
            A.Call, children,
            st.lists(children, max_size=2).map(tuple),
            st.lists(st.tuples(names, children), max_size=2, unique_by=lambda kv: kv[0]).map(tuple),
        ),
        st.builds(A.Unary, st.sampled_from([A.BITNOT, A.NEG]), children),
        st.builds(A.Binary, st.sampled_from([A.OR, A.AND, A.ADD, A.SUB, A.MUL, A.DIV, A.MOD]),
                  children, children),
        chains,
        st.builds(A.ListLit, st.lists(children, max_size=3).map(tuple)),
        st.builds(A.TupleLit, st.lists(children, min_size=2, max_size=3).map(tuple)),
        st.builds(
            A.DictLit,
            st.lists(st.tuples(dict_keys, children), max_size=2).map(tuple),
        ),
    )


exprs = st.recursive(atoms, compound, max_leaves=8)

lvalues = st.one_of(
    names.map(A.NameRef),
    st.builds(A.Subscript, names.map(A.NameRef), exprs),
    st.builds(lambda n, attr, key: A.Subscript(A.Attr(A.NameRef(n), attr), key),
              names, names, exprs),
)

stmts = st.one_of(
    st.builds(A.Assign, lvalues, exprs),
    exprs.map(A.ExprStmt),
)

programs = st.lists(stmts, min_size=1, max_size=3).map(lambda s: A.Program(tuple(s)))


@settings(max_examples=150, deadline=None)
@given(programs)
def test_random_programs_round_trip(program):
    text = unparse(program)
    reparsed = parse(text)
    assert reparsed == program, text
    assert unparse(reparsed) == text


@settings(max_examples=60, deadline=None)
@given(programs)
def test_unparse_is_deterministic(program):
    assert unparse(program) == unparse(program)
