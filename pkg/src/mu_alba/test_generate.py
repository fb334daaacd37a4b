# type: ignore
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this file,
# You can obtain one at http://mozilla.org/MPL/2.0/.
from logging import WARNING
from random import Random

import hypothesis.strategies as st
from hypothesis import given, settings
from pytest import mark

from .classifier import InequalityClass, classify_inequality
from .generate import InequalityGenerator, Kind, generate
from .grammar import parse_signature, parse_term, render
from .syntax import Language, Variance, in_language, letters

SIG = parse_signature(
    "connective f : F / 1 / (1)\n"
    "connective g : G / 1 / (1)\n"
    "connective h : F / 2 / (1,1)\n"
    "connective k : G / 2 / (1,d)\n"
)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**16), st.integers(1, 6))
def test_term_01(seed, depth):
    """test InequalityGenerator.term()"""
    t = InequalityGenerator(SIG, Random(seed)).term(depth)
    assert in_language(t, Language.L1)
    assert parse_term(render(t), SIG) == t


def test_inequality_01():
    """test InequalityGenerator.inequality() letters"""
    generator = InequalityGenerator(SIG, Random(3), letters=("a", "b"))
    for _ in range(20):
        assert set(letters(generator.inequality(4))) <= {"a", "b"}


@mark.parametrize(
    "kind, cls",
    [
        (Kind.RESTRICTED, InequalityClass.RESTRICTED),
        (Kind.TAME, InequalityClass.TAME),
    ],
)
def test_generate_01(kind, cls):
    """test generate() of class directed kinds"""
    found = list(generate(kind, 5, SIG, depth=3, seed=7))
    assert len(found) == 5
    assert all(classify_inequality(x).holds(cls) for x in found)
    # seeded
    assert list(generate(kind, 5, SIG, depth=3, seed=7)) == found


def test_generate_02():
    """test generate() of random inequalities"""
    found = list(generate(Kind.RANDOM, 10, SIG, depth=5, seed=1))
    assert len(found) == 10
    assert all(in_language(x, Language.L1) for x in found)
    assert found != list(generate(Kind.RANDOM, 10, SIG, depth=5, seed=2))


def test_generate_03(caplog, mocker):
    """test generate() gives up on rejected candidates"""
    report = mocker.patch("mu_alba.generate.classify_inequality", autospec=True)
    report.return_value.holds.return_value = False
    caplog.set_level(WARNING)
    assert not list(generate(Kind.TAME, 2, SIG, seed=0))
    assert report.call_count == 100
    assert "giving up after 101 attempts" in caplog.text


def test_generate_04():
    """test generate() with a signature lacking binary connectives"""
    sig = parse_signature("connective f : F / 1 / (1)\nconnective g : G / 1 / (1)")
    found = list(generate(Kind.RESTRICTED, 3, sig, depth=4, seed=5))
    assert len(found) == 3
    for ineq in found:
        assert {x.connective.name for x in _apps(ineq)} <= {"f", "g"}


def _apps(ineq):
    from .syntax import App, iter_subterms

    for side in (ineq.lhs, ineq.rhs):
        for _, sub in iter_subterms(side):
            if isinstance(sub, App):
                yield sub


def test_generate_05():
    """test generate() over antitone coordinates"""
    sig = parse_signature(
        "connective f : F / 1 / (1)\n"
        "connective g : G / 1 / (1)\n"
        "connective n : F / 1 / (d)\n"
        "connective o : G / 1 / (d)\n"
    )
    found = list(generate(Kind.RESTRICTED, 20, sig, depth=4, seed=3))
    assert len(found) == 20
    used = {x.connective.name for ineq in found for x in _apps(ineq)}
    assert used & {"n", "o"}
    reports = [classify_inequality(x) for x in found]
    assert all(x.holds(InequalityClass.RESTRICTED) for x in reports)
    # some restricted witness puts a letter at order-type d
    assert any(
        variance is Variance.ANTI
        for report in reports
        for witness in report.verdicts[InequalityClass.RESTRICTED].witnesses
        for _, variance in witness.epsilon
    )
