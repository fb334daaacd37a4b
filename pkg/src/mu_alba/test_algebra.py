# type: ignore
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this file,
# You can obtain one at http://mozilla.org/MPL/2.0/.
from pytest import mark, raises

from .algebra import (
    FiniteLE,
    Quantify,
    attach_operation,
    build_lattice,
    check_inequality,
    check_monotone,
    check_quasi,
    check_targeted_preservation,
    evaluate,
    greatest_fixed_point,
    is_distributive,
    least_fixed_point,
    symbols,
    tabulate,
    uses_only,
)
from .common import AlgebraError, NormalityError
from .grammar import parse_inequality, parse_quasi, parse_signature, parse_term
from .syntax import FVar, Nominal, Prop, Variance

SIG = parse_signature(
    "connective f : F / 1 / (1)\n"
    "connective g : G / 1 / (1)\n"
    "connective n : F / 1 / (d)\n"
)
F = SIG.lookup("f")
G = SIG.lookup("g")
N = SIG.lookup("n")


def _chain(size):
    labels = [str(x) for x in range(size)]
    return build_lattice(labels, zip(labels, labels[1:]), f"chain{size}")


def _m3():
    return build_lattice(
        ["0", "a", "b", "c", "1"],
        [("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")],
        "m3",
    )


def _n5():
    return build_lattice(
        ["0", "a", "b", "c", "1"],
        [("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")],
        "n5",
    )


def _identities(lattice):
    le = FiniteLE(lattice)
    for conn in (F, G):
        le = attach_operation(le, conn, tabulate(lattice, 1, lambda x: x))
    return le


def _top_only(lattice):
    """Meet preserving G table sending everything but top to bottom."""
    return tabulate(
        lattice, 1, lambda x: lattice.top if x == lattice.top else lattice.bot
    )


def test_build_lattice_01():
    """test build_lattice()"""
    chain = _chain(2)
    assert (chain.bot, chain.top) == (0, 1)
    assert chain.join(0, 1) == 1
    assert chain.meet(0, 1) == 0
    m3 = _m3()
    assert m3.size == 5
    assert m3.join(1, 2) == 4
    assert m3.meet(1, 3) == 0
    assert not is_distributive(m3)
    assert not is_distributive(_n5())
    assert is_distributive(_chain(4))
    assert m3.index("c") == 3
    with raises(AlgebraError, match="Unknown element 'x'"):
        m3.index("x")


@mark.parametrize(
    "elements, order, msg",
    [
        # 2x2 grid minus top
        (["0", "a", "b"], [("0", "a"), ("0", "b")], "join of 'a' and 'b' missing"),
        (["0", "1"], [("0", "1"), ("1", "0")], "has a cycle"),
        (["0", "0"], [], "Duplicate element labels"),
        (["0"], [("0", "x")], "Unknown element"),
        ([], [], "no bounds"),
    ],
)
def test_build_lattice_02(elements, order, msg):
    """test build_lattice() errors"""
    with raises(AlgebraError, match=msg):
        build_lattice(elements, order)


def test_irreducibles_01():
    """test join_irreducibles() and meet_irreducibles()"""
    n5 = _n5()
    assert n5.join_irreducibles() == [1, 2, 3]
    assert n5.meet_irreducibles() == [1, 2, 3]
    chain = _chain(3)
    assert chain.join_irreducibles() == [1, 2]
    assert chain.meet_irreducibles() == [0, 1]


def test_attach_operation_01():
    """test attach_operation() and residual tables"""
    chain = _chain(2)
    le = _identities(chain)
    assert le.connectives == (F, G)
    assert le.operation(F.residual(1)) == {(0,): 0, (1,): 1}
    assert le.operation(G.residual(1)) == {(0,): 0, (1,): 1}
    assert check_monotone(le, F)
    assert le.describe()["operations"]["f"] == [["0", "0"], ["1", "1"]]
    # antitone F connective: top to bottom, bottom to top
    le = attach_operation(le, N, {(0,): 1, (1,): 0})
    assert check_monotone(le, N)
    assert le.operation(N.residual(1)) == {(0,): 1, (1,): 0}
    with raises(AlgebraError, match="No table for connective 'g'"):
        FiniteLE(chain).operation(G)


def test_attach_operation_02():
    """test attach_operation() errors"""
    chain = _chain(3)
    le = FiniteLE(chain)
    # f(bot) must be bot
    with raises(NormalityError, match="unit '0' not mapped to '0'"):
        attach_operation(le, F, {(0,): 1, (1,): 1, (2,): 2})
    # meet with a coatom of M3 preserves no joins
    m3 = _m3()
    with raises(NormalityError, match="not normal in coordinate 1 at"):
        attach_operation(FiniteLE(m3), F, tabulate(m3, 1, lambda x: m3.meet(x, 1)))
    with raises(AlgebraError, match="is not total"):
        attach_operation(le, F, {(0,): 0})
    with raises(AlgebraError, match="invalid value"):
        attach_operation(le, F, {(0,): 0, (1,): 7, (2,): 2})
    with raises(AlgebraError, match="computed, not attached"):
        attach_operation(le, F.residual(1), {(0,): 0, (1,): 1, (2,): 2})


@mark.parametrize(
    "text, assignment, expected",
    [
        ("mu X. X", {}, 0),
        ("nu X. X", {}, 1),
        ("mu X. (p \\/ f(X))", {Prop("p"): 1}, 1),
        ("nu X. (p /\\ g(X))", {Prop("p"): 0}, 0),
        ("f#1(j1)", {Nominal(1): 1}, 1),
    ],
)
def test_evaluate_01(text, assignment, expected):
    """test evaluate() on the 2-chain with identities"""
    le = _identities(_chain(2))
    assert evaluate(parse_term(text, SIG), le, assignment, strict=True) == expected


def test_evaluate_02():
    """test evaluate() errors"""
    le = _identities(_chain(2))
    with raises(AlgebraError, match="Unbound symbol 'p'"):
        evaluate(parse_term("f(p)", SIG), le, {})
    with raises(AlgebraError, match="No table for connective 'n'"):
        evaluate(parse_term("n(p)", SIG), le, {Prop("p"): 0})


def test_fixed_points_01():
    """test least_fixed_point() and greatest_fixed_point()"""
    chain = _chain(3)
    assert least_fixed_point(lambda x: max(x, 1), chain, strict=True) == 1
    assert greatest_fixed_point(lambda x: min(x, 1), chain, strict=True) == 1
    # not monotone: iteration stops above the meet of pre-fixed points
    table = {0: 2, 1: 0, 2: 2}
    assert least_fixed_point(table.get, chain) == 2
    with raises(AlgebraError, match="pre-fixed points"):
        least_fixed_point(table.get, chain, strict=True)
    with raises(AssertionError, match="exceeded"):
        least_fixed_point({0: 2, 1: 1, 2: 0}.get, chain)


def test_check_inequality_01():
    """test check_inequality()"""
    le = _identities(_chain(2))
    assert check_inequality(le, parse_inequality("p <= p", SIG))
    assert check_inequality(le, parse_inequality("f(p) <= g(p)", SIG))
    m3 = _m3()
    le = attach_operation(
        attach_operation(FiniteLE(m3), F, tabulate(m3, 1, lambda x: x)), G, _top_only(m3)
    )
    result = check_inequality(le, parse_inequality("f(p) <= g(p)", SIG))
    assert not result
    assert result.counterexample == {"p": "a"}
    # nominals stay free when quantifying over letters
    with raises(AlgebraError, match="Unbound symbol"):
        check_inequality(le, parse_inequality("j1 <= p", SIG), Quantify.LETTERS)


@mark.parametrize(
    "text, expected",
    [
        ("j1 <= m1 => f(j1) <= g(m1)", True),
        ("=> bot <= top", True),
        ("=> top <= bot", False),
        ("=> j1 <= m1", False),
    ],
)
def test_check_quasi_01(text, expected):
    """test check_quasi()"""
    le = _identities(_chain(2))
    result = check_quasi(le, parse_quasi(text, SIG))
    assert result.valid is expected
    assert (result.counterexample is None) is expected


def test_check_targeted_preservation_01():
    """test check_targeted_preservation()"""
    le = _identities(_chain(2))
    p, x = Prop("p"), FVar("X")
    profile = [(p, Variance.MONO), (x, Variance.MONO)]
    assert check_targeted_preservation(le, parse_term("p \\/ f(X)", SIG), profile)
    assert check_targeted_preservation(le, p, [(p, Variance.MONO)])
    m3 = _m3()
    le = attach_operation(FiniteLE(m3), G, _top_only(m3))
    assert not check_targeted_preservation(
        le, parse_term("g(p)", SIG), [(p, Variance.MONO)]
    )
    with raises(AlgebraError, match="outside the coordinate profile"):
        check_targeted_preservation(le, parse_term("g(q)", SIG), [(p, Variance.MONO)])


def test_helpers_01():
    """test symbols() and uses_only()"""
    q = parse_quasi("j2 <= p & p <= m1 => f(j1) <= q", SIG)
    assert [str(x) for x in symbols(q)] == ["p", "q", "j1", "j2", "m1"]
    le = _identities(_chain(2))
    assert uses_only(le, parse_term("f(g(p))", SIG))
    assert uses_only(le, parse_term("f#1(p)", SIG))
    assert not uses_only(le, parse_term("n(p)", SIG))
