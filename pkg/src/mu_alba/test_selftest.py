# type: ignore
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this file,
# You can obtain one at http://mozilla.org/MPL/2.0/.
from pytest import fixture

from .algebra import FiniteLE, attach_operation, build_lattice, tabulate
from .catalog import MAX_CATALOG_SIZE, enumerate_les
from .common import RuleError
from .grammar import parse_signature, parse_term
from .rules import Rule
from .selftest import (
    GOLDEN,
    SELFTEST_SIGNATURE,
    Selftest,
    SelftestSizes,
    SuiteResult,
    adjunction_holds,
    rekind,
    selftest,
)
from .syntax import BinderKind

SIG = parse_signature(SELFTEST_SIGNATURE)
SMALL = SelftestSizes(oracle=3, generated=3, classified=10, fixpoint_terms=3, round_trip=20)


@fixture(scope="module")
def small_corpus():
    return list(enumerate_les(3, SIG, 2, seed=0))


def test_rekind_01():
    """test rekind()"""
    t = parse_term("mu X. (p \\/ f(nu Y. g(Y)))", SIG)
    assert str(rekind(t, BinderKind.MU_STAR, BinderKind.NU_STAR)) == (
        "mu* X. (p \\/ f(nu* Y. g(Y)))"
    )
    assert rekind(parse_term("f(p)", SIG), BinderKind.MU2, BinderKind.NU2) == (
        parse_term("f(p)", SIG)
    )


def test_adjunction_holds_01():
    """test adjunction_holds()"""
    labels = ["0", "a", "1"]
    lattice = build_lattice(labels, [("0", "a"), ("a", "1")], "chain3")
    le = FiniteLE(lattice)
    for name in ("f", "g", "h", "k"):
        conn = SIG.lookup(name)
        op = lattice.meet if name == "h" else lattice.join
        table = (
            tabulate(lattice, 1, lambda x: x)
            if conn.arity == 1
            else tabulate(lattice, 2, op)
        )
        le = attach_operation(le, conn, table)
        for coordinate in range(1, conn.arity + 1):
            assert adjunction_holds(le, conn, coordinate)
    # tamper with a residual table
    conn = SIG.lookup("f")
    le.tables[conn.residual(1)] = {(0,): 0, (1,): 0, (2,): 2}
    assert not adjunction_holds(le, conn, 1)


def test_suite_result_01():
    """test SuiteResult"""
    result = SuiteResult("golden", checked=2, elapsed=0.12345)
    assert result.passed
    result.failures.append("bad")
    assert result.to_json() == {
        "suite": "golden",
        "passed": False,
        "checked": 2,
        "failures": ["bad"],
        "elapsed": 0.123,
    }


def test_selftest_golden_01(small_corpus):
    """test Selftest.golden() and Selftest.replay()"""
    test = Selftest(small_corpus, SMALL)
    result = SuiteResult("golden")
    test.golden(result)
    assert result.failures == []
    assert result.checked == len(GOLDEN)
    assert len(test.runs) == len(GOLDEN)
    # antitone coordinates and order-type d are covered
    assert str(test.runs[3].output[0]) == "j1 <= m1 => n(m1) <= o(j1)"
    assert test.runs[4].steps[-1].rule is Rule.ACKERMANN_LA
    result = SuiteResult("soundness")
    test.soundness(result)
    assert result.failures == []
    result = SuiteResult("replay")
    test.replay(result)
    assert result.failures == []
    assert result.checked == SMALL.round_trip + len(GOLDEN) + 1


def test_selftest_classifier_01(small_corpus):
    """test Selftest.classifier() and Selftest.semantics()"""
    test = Selftest(small_corpus, SMALL, seed=4)
    result = SuiteResult("classifier")
    test.classifier(result)
    assert result.failures == []
    assert result.checked == SMALL.classified + 1
    result = SuiteResult("semantics")
    test.semantics(result)
    assert result.failures == []
    assert result.checked > 0


def test_selftest_run_all_01(mocker, small_corpus):
    """test Selftest.run_all()"""
    test = Selftest(small_corpus, SMALL)
    mocker.patch.object(
        Selftest, "oracle", autospec=True, side_effect=RuleError("approx", "boom")
    )
    for name in ("golden", "soundness", "success", "classifier", "semantics", "replay"):
        mocker.patch.object(Selftest, name, autospec=True)
    results = test.run_all()
    assert [x.name for x in results] == [
        "golden derivations",
        "oracle equivalence",
        "rule soundness",
        "class generators",
        "classifier inclusions",
        "semantics cross-checks",
        "round trip and replay",
    ]
    assert [x.passed for x in results] == [True, False, True, True, True, True, True]
    assert results[1].failures == ["aborted: approx: boom"]


def test_selftest_01():
    """test selftest()"""
    results = selftest(max_size=2, budget=2, seed=0, sizes=SMALL)
    assert len(results) == 7
    assert all(x.checked > 0 for x in results)
    for result in results:
        assert result.passed, result.failures


def test_selftest_02(mocker):
    """test selftest() default corpus size"""
    les = mocker.patch("mu_alba.selftest.enumerate_les", autospec=True, return_value=[])
    mocker.patch.object(Selftest, "run_all", autospec=True, return_value=[])
    assert selftest(budget=2, seed=0) == []
    assert les.call_args[0][0] == MAX_CATALOG_SIZE
