# type: ignore
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this file,
# You can obtain one at http://mozilla.org/MPL/2.0/.
import hypothesis.strategies as st
from hypothesis import given
from pytest import mark, raises

from .common import ParseError, SignatureError
from .grammar import (
    load_signature,
    parse,
    parse_inequality,
    parse_quasi,
    parse_signature,
    parse_term,
    render,
)
from .syntax import (
    App,
    Binder,
    BinderKind,
    Bottom,
    CoNominal,
    FVar,
    Inequality,
    Join,
    Meet,
    Nominal,
    Prop,
    QuasiInequality,
    Top,
)

SIG = parse_signature(
    """
    # test signature
    connective f : F / 1 / (1);
    connective g : G / 1 / (1)
    connective k : G / 2 / (1,1)
    """
)
LEAVES = st.one_of(
    st.sampled_from([Prop("p"), Prop("q"), Bottom(), Top(), FVar("X")]),
    st.integers(1, 3).map(Nominal),
    st.integers(1, 3).map(CoNominal),
)


def _extend(children):
    return st.one_of(
        st.tuples(children, children).map(lambda x: Meet(*x)),
        st.tuples(children, children).map(lambda x: Join(*x)),
        children.map(lambda x: App(SIG.lookup("f"), (x,))),
        children.map(lambda x: App(SIG.lookup("f#1"), (x,))),
        st.tuples(children, children).map(lambda x: App(SIG.lookup("k"), x)),
        st.tuples(st.sampled_from(list(BinderKind)), children).map(
            lambda x: Binder(x[0], "X", Join(x[1], FVar("X")))
        ),
    )


TERMS = st.recursive(LEAVES, _extend, max_leaves=12)


@given(st.data())
def test_round_trip_01(data):
    """test parse_term(render(t)) == t"""
    t = data.draw(TERMS)
    assert parse_term(render(t), SIG) == t


@given(st.data())
def test_round_trip_02(data):
    """test round trip of quasi-inequalities"""
    parts = data.draw(st.lists(st.tuples(TERMS, TERMS), min_size=1, max_size=3))
    q = QuasiInequality(
        tuple(Inequality(*x) for x in parts[:-1]), Inequality(*parts[-1])
    )
    assert parse_quasi(render(q), SIG) == q


@mark.parametrize(
    "text, expected",
    [
        ("p /\\ q \\/ r", "((p /\\ q) \\/ r)"),
        ("p \\/ q /\\ r", "(p \\/ (q /\\ r))"),
        ("f(mu X. f(X))", "f(mu X. f(X))"),
        ("mu X. p \\/ f(X)", "mu X. (p \\/ f(X))"),
        ("(mu X. f(X)) /\\ p", "((mu X. f(X)) /\\ p)"),
        ("k(bot, top)", "k(bot, top)"),
        ("gb1(j1) \\/ m2", "(gb1(j1) \\/ m2)"),
    ],
)
def test_render_01(text, expected):
    """test render()"""
    assert render(parse_term(text, SIG)) == expected


def test_parse_01():
    """test parse() of each kind"""
    assert isinstance(parse("f(p)", SIG), App)
    assert isinstance(parse("f(p) <= g(p)", SIG), Inequality)
    q = parse("j1 <= p & p <= m1 => j1 <= m1", SIG)
    assert isinstance(q, QuasiInequality)
    assert len(q.antecedents) == 2
    q = parse_quasi("=> bot <= top", SIG)
    assert q.antecedents == ()
    assert render(q) == "=> bot <= top"
    assert parse_inequality("mu* X. f(X) <= p", SIG).lhs.kind is BinderKind.MU_STAR


@mark.parametrize(
    "text, msg",
    [
        # unknown connective
        ("h(p) <= p", "Unknown connective 'h'"),
        # wrong arity
        ("f(p, q) <= p", "'f' expects 1 argument"),
        # syntax error
        ("f(p <= q", "Syntax error"),
        # residual used as letter
        ("f#1 <= p", "is not a proposition letter"),
    ],
)
def test_parse_02(text, msg):
    """test parse() errors"""
    with raises(ParseError, match=msg):
        parse_inequality(text, SIG)


def test_parse_03():
    """test ParseError location"""
    with raises(ParseError) as exc:
        parse_term("f(p))", SIG)
    assert exc.value.line == 1
    assert exc.value.column == 5


def test_parse_signature_01(tmp_path):
    """test parse_signature() and load_signature()"""
    assert [x.name for x in SIG.base] == ["f", "g", "k"]
    with raises(SignatureError, match="line 2"):
        parse_signature("connective f : F / 1 / (1)\nconnective g : X / 1 / (1)")
    sig_file = tmp_path / "sig.txt"
    sig_file.write_text("connective h : F / 2 / (1,d)\n")
    loaded = load_signature(sig_file)
    assert str(loaded.lookup("h").order_type) == "(1,d)"
    with raises(SignatureError, match="Cannot read"):
        load_signature(tmp_path / "missing")
