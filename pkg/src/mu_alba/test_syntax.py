# type: ignore
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this file,
# You can obtain one at http://mozilla.org/MPL/2.0/.
from pytest import mark, raises

from .common import SignatureError, TermError
from .grammar import parse_inequality, parse_quasi, parse_term
from .syntax import (
    App,
    Binder,
    BinderKind,
    Bottom,
    Family,
    FreshNames,
    FVar,
    Join,
    Language,
    Meet,
    Nominal,
    OrderType,
    Positivity,
    Prop,
    Sign,
    Top,
    Variance,
    binder_paths,
    declare_signature,
    default_signature,
    expand_tense,
    free_fixpoint_variables,
    in_language,
    is_sentence,
    join_all,
    letters,
    meet_all,
    nominals,
    occurrence_signs,
    positivity,
    replace_at,
    star_translation,
    substitute,
    subterm_at,
    term_depth,
)

SIG = declare_signature(
    [
        ("f", "F", 1, "(1)"),
        ("g", "G", 1, "(1)"),
        ("h", "F", 2, "(1,d)"),
        ("k", "G", 2, "(1,1)"),
    ]
)


@mark.parametrize(
    "decls, msg",
    [
        # duplicate name
        ([("f", "F", 1, "1"), ("f", "G", 1, "1")], "Duplicate connective name 'f'"),
        # order-type length
        ([("f", "F", 2, "(1)")], "does not match arity 2"),
        # bad order-type
        ([("f", "F", 1, "(x)")], "Invalid order-type"),
        # bad name
        ([("F1", "F", 1, "(1)")], "Invalid connective name"),
    ],
)
def test_declare_signature_01(decls, msg):
    """test declare_signature() errors"""
    with raises(SignatureError, match=msg):
        declare_signature(decls)


def test_declare_signature_02():
    """test declare_signature()"""
    sig = default_signature()
    assert [x.name for x in sig.base] == ["f", "g"]
    assert sig.lookup("f").family is Family.F
    assert OrderType.parse("(1,d)").entries == (Variance.MONO, Variance.ANTI)
    assert str(OrderType.parse("1d")) == "(1,d)"
    with raises(SignatureError, match="Unknown connective 'x'"):
        sig.lookup("x")


def test_expand_tense_01():
    """test expand_tense()"""
    sig = declare_signature([("f", "F", 1, "(1)")])
    tense = expand_tense(sig)
    (res,) = tense.residuals
    assert res.name == "f#1"
    assert res.family is Family.G
    assert res.order_type.entries == (Variance.MONO,)
    with raises(SignatureError, match="already tense expanded"):
        expand_tense(tense)


@mark.parametrize(
    "name, family, order, coordinate, res_name, res_family, res_order",
    [
        # binary F, monotone coordinate: G residual, other coordinate flipped
        ("h", "F", "(1,d)", 1, "h#1", Family.G, "(1,1)"),
        # binary F, antitone coordinate: F residual, other coordinate kept
        ("h", "F", "(1,d)", 2, "h#2", Family.F, "(1,d)"),
        # binary G, monotone coordinates
        ("k", "G", "(1,1)", 2, "kb2", Family.F, "(d,1)"),
    ],
)
def test_connective_residual_01(
    name, family, order, coordinate, res_name, res_family, res_order
):
    """test Connective.residual() and Connective.origin()"""
    sig = declare_signature([(name, family, len(OrderType.parse(order)), order)])
    conn = sig.lookup(name)
    res = conn.residual(coordinate)
    assert res.name == res_name
    assert res.family is res_family
    assert str(res.order_type) == res_order
    assert res.origin() == conn
    assert sig.lookup(res_name) == res
    with raises(SignatureError, match="already a residual"):
        res.residual(1)
    with raises(SignatureError, match="not a residual"):
        conn.origin()
    with raises(SignatureError, match="has no coordinate 3"):
        conn.residual(3)


def test_terms_01():
    """test term construction errors"""
    f = SIG.lookup("f")
    with raises(TermError, match="expects 1 argument"):
        App(f, (Prop("p"), Prop("q")))
    # X occurs negatively in the antitone coordinate of h
    with raises(TermError, match="not positive in X"):
        Binder(BinderKind.MU, "X", App(SIG.lookup("h"), (Prop("p"), FVar("X"))))
    # vacuous binder is fine
    assert Binder(BinderKind.NU, "X", Prop("p")).body == Prop("p")


@mark.parametrize(
    "text, atom, signs, expected",
    [
        ("f(p) \\/ p", Prop("p"), [Sign.PLUS, Sign.PLUS], Positivity.POSITIVE),
        ("h(q, p)", Prop("p"), [Sign.MINUS], Positivity.NEGATIVE),
        ("h(p, p)", Prop("p"), [Sign.PLUS, Sign.MINUS], Positivity.NEITHER),
        ("f(q)", Prop("p"), [], Positivity.BOTH),
        # bound occurrences are not free
        ("mu X. (p \\/ f(X))", FVar("X"), [], Positivity.BOTH),
    ],
)
def test_positivity_01(text, atom, signs, expected):
    """test occurrence_signs() and positivity()"""
    t = parse_term(text, SIG)
    assert list(occurrence_signs(t, atom)) == signs
    assert positivity(t, atom) is expected


def test_positions_01():
    """test subterm_at(), replace_at() and binder_paths()"""
    t = parse_term("f(p) \\/ (mu X. (q \\/ f(X)))", SIG)
    assert subterm_at(t, (0, 0)) == Prop("p")
    assert subterm_at(t, (1, 0, 0)) == Prop("q")
    assert binder_paths(t) == ((1,),)
    replaced = replace_at(t, (0, 0), Nominal(1))
    assert str(replaced) == "(f(j1) \\/ (mu X. (q \\/ f(X))))"
    assert nominals(replaced) == frozenset({1})
    with raises(TermError, match="Invalid position"):
        subterm_at(t, (0, 5))
    with raises(TermError, match="Invalid position"):
        replace_at(t, (3,), Top())


def test_collectors_01():
    """test letters(), free_fixpoint_variables(), is_sentence() and term_depth()"""
    ineq = parse_inequality("g(q) /\\ p <= h(r, q)", SIG)
    assert letters(ineq) == ("q", "p", "r")
    t = parse_term("mu X. (f(X) \\/ Y)", SIG)
    assert free_fixpoint_variables(t) == frozenset({"Y"})
    assert not is_sentence(t)
    assert is_sentence(parse_term("nu X. g(X)", SIG))
    assert term_depth(parse_term("f(g(p))", SIG)) == 3


@mark.parametrize(
    "text, language, expected",
    [
        ("mu X. f(X) <= p", Language.L1, True),
        ("mu X. f(X) <= p", Language.L, False),
        ("mu* X. f(X) <= p", Language.LSTAR, True),
        ("mu* X. f(X) <= p", Language.L1, False),
        ("mu2 X. f(X) <= p", Language.L2, True),
        ("f(j1) <= m1", Language.L, False),
        ("f(j1) <= m1", Language.L_PLUS, True),
        ("f#1(p) <= p", Language.L, False),
        ("f#1(p) <= p", Language.L1_PLUS, True),
    ],
)
def test_in_language_01(text, language, expected):
    """test in_language()"""
    assert in_language(parse_inequality(text, SIG), language) is expected


def test_substitute_01():
    """test substitute()"""
    t = parse_term("f(p) /\\ (mu X. (p \\/ f(X)))", SIG)
    # all free occurrences replaced
    assert str(substitute(t, Prop("p"), Nominal(1))) == (
        "(f(j1) /\\ (mu X. (j1 \\/ f(X))))"
    )
    # bound variable renamed to avoid capture
    t = parse_term("mu X. (Y \\/ f(X))", SIG)
    result = substitute(t, FVar("Y"), FVar("X"))
    assert isinstance(result, Binder)
    assert result.var == "X1"
    assert free_fixpoint_variables(result) == frozenset({"X"})
    # nothing to replace
    assert substitute(t, Prop("p"), Top()) is t


def test_fresh_names_01():
    """test FreshNames"""
    names = FreshNames()
    assert names.fresh({"X1"}) == "X2"
    assert names.fresh(()) == "X3"


def test_star_translation_01():
    """test star_translation()"""
    q = parse_quasi("j1 <= mu X. f(X) => nu2 Y. g(Y) <= p", SIG)
    assert str(star_translation(q)) == "j1 <= mu* X. f(X) => nu* Y. g(Y) <= p"
    t = parse_term("f(p)", SIG)
    assert star_translation(t) == t


def test_folds_01():
    """test join_all() and meet_all()"""
    assert join_all([]) == Bottom()
    assert meet_all([]) == Top()
    assert join_all([Prop("p"), Prop("q"), Prop("r")]) == Join(
        Join(Prop("p"), Prop("q")), Prop("r")
    )
    assert meet_all([Prop("p")]) == Prop("p")
    assert isinstance(meet_all([Prop("p"), Prop("q")]), Meet)
