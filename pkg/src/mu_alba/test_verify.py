# type: ignore
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this file,
# You can obtain one at http://mozilla.org/MPL/2.0/.
from logging import DEBUG, WARNING

from .algebra import FiniteLE, attach_operation, build_lattice, tabulate
from .engine import run
from .grammar import parse_inequality, parse_quasi, parse_signature
from .rules import DerivationStep, Rule, System
from .syntax import QuasiInequality
from .verify import (
    check_equivalence,
    check_step_soundness,
    quasi_validity,
    verify_outcome,
)

SIG = parse_signature("connective f : F / 1 / (1)\nconnective g : G / 1 / (1)")


def _identities(size=2):
    labels = [str(x) for x in range(size)]
    lattice = build_lattice(labels, zip(labels, labels[1:]), f"chain{size}")
    le = FiniteLE(lattice)
    for conn in SIG.base:
        le = attach_operation(le, conn, tabulate(lattice, 1, lambda x: x))
    return le


def _disagreements(caplog):
    return [x.levelno for x in caplog.records if "disagree" in x.getMessage()]


def test_quasi_validity_01():
    """test quasi_validity()"""
    le = _identities()
    assert quasi_validity(le, [])
    quasis = [parse_quasi(x, SIG) for x in ("=> bot <= top", "=> j1 <= m1")]
    result = quasi_validity(le, quasis)
    assert not result
    assert result.counterexample == {"j1": "1", "m1": "0"}


def test_check_equivalence_01():
    """test check_equivalence()"""
    algebras = [_identities(2), _identities(3)]
    ineq = parse_inequality("f(p) <= g(p)", SIG)
    outcome = run(ineq)
    report = check_equivalence(ineq, outcome.output, algebras)
    assert report.equivalent
    assert report.checked == 2
    # dropping the antecedents breaks the equivalence
    corrupted = [QuasiInequality((), x.consequent) for x in outcome.output]
    report = check_equivalence(ineq, corrupted, algebras)
    assert not report.equivalent
    assert len(report.discrepancies) == 2
    found = report.discrepancies[0]
    assert found.algebra == "chain2"
    assert found.input_valid
    assert not found.output_valid
    assert found.counterexample == {"j1": "1", "m1": "0"}
    data = report.to_json()
    assert data["version"] == 1
    assert not data["equivalent"]
    assert data["discrepancies"][0]["step"] is None


def test_check_equivalence_02(caplog):
    """test check_equivalence() log level of discrepancies"""
    algebras = [_identities(2)]
    ineq = parse_inequality("f(p) <= g(p)", SIG)
    corrupted = [QuasiInequality((), x.consequent) for x in run(ineq).output]
    caplog.set_level(DEBUG)
    assert not check_equivalence(ineq, corrupted, algebras).equivalent
    assert _disagreements(caplog) == [WARNING]
    caplog.clear()
    report = check_equivalence(ineq, corrupted, algebras, expect_equivalent=False)
    assert not report.equivalent
    assert _disagreements(caplog) == [DEBUG]


def test_check_step_soundness_01():
    """test check_step_soundness()"""
    algebras = [_identities()]
    outcome = run(parse_inequality("mu X. (p \\/ f(X)) <= g(p)", SIG))
    assert check_step_soundness(outcome.steps, algebras).equivalent
    # p <= q does not follow from p <= p
    before = System((), parse_inequality("p <= q", SIG))
    after = System((), parse_inequality("p <= p", SIG))
    steps = [*outcome.steps, DerivationStep(Rule.RESIDUATE, {}, before, (after,))]
    report = check_step_soundness(steps, algebras)
    (found,) = report.discrepancies
    assert found.step == len(outcome.steps)
    assert not found.input_valid
    assert found.output_valid
    assert found.counterexample == {"p": "1", "q": "0"}


def test_verify_outcome_01():
    """test verify_outcome()"""
    algebras = [_identities(2), _identities(3)]
    outcome = run(parse_inequality("f(p) \\/ (nu X. g(X)) <= g(p)", SIG))
    report = verify_outcome(outcome, algebras, steps=True)
    assert report.equivalent
    assert report.checked == 2
