# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""Oracle checks of runs against finite algebras."""

from __future__ import annotations

from dataclasses import dataclass, field
from logging import DEBUG, WARNING, getLogger
from typing import TYPE_CHECKING, Any

from .algebra import Quantify, Validity, check_inequality, check_quasi

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from .algebra import FiniteLE
    from .engine import RunOutcome
    from .rules import DerivationStep
    from .syntax import Inequality, QuasiInequality

LOG = getLogger(__name__)
REPORT_VERSION = 1


@dataclass(frozen=True)
class Discrepancy:
    """Algebra on which two sides of an equivalence disagree."""

    algebra: str
    input_valid: bool
    output_valid: bool
    # falsifying assignment of the side that failed
    counterexample: dict[str, str] | None
    step: int | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "algebra": self.algebra,
            "input_valid": self.input_valid,
            "output_valid": self.output_valid,
            "counterexample": self.counterexample,
            "step": self.step,
        }


@dataclass
class EquivalenceReport:
    checked: int = 0
    discrepancies: list[Discrepancy] = field(default_factory=list)

    @property
    def equivalent(self) -> bool:
        return not self.discrepancies

    def to_json(self) -> dict[str, Any]:
        return {
            "version": REPORT_VERSION,
            "checked": self.checked,
            "equivalent": self.equivalent,
            "discrepancies": [x.to_json() for x in self.discrepancies],
        }


def quasi_validity(le: FiniteLE, quasis: Sequence[QuasiInequality]) -> Validity:
    """Validity of a conjunction of quasi-inequalities, first failure reported."""
    for quasi in quasis:
        result = check_quasi(le, quasi)
        if not result:
            return result
    return Validity(True)


def _compare(
    name: str, lhs: Validity, rhs: Validity, step: int | None = None
) -> Discrepancy | None:
    if bool(lhs) == bool(rhs):
        return None
    return Discrepancy(
        name,
        lhs.valid,
        rhs.valid,
        lhs.counterexample or rhs.counterexample,
        step,
    )


def check_equivalence(
    ineq: Inequality,
    output: Sequence[QuasiInequality],
    algebras: Iterable[FiniteLE],
    expect_equivalent: bool = True,
) -> EquivalenceReport:
    """Compare validity of ineq with validity of a run's output on each algebra.

    Args:
        ineq: Input inequality.
        output: Pure quasi-inequalities produced for ineq.
        algebras: Algebras to check.
        expect_equivalent: False when discrepancies are expected, they are then
            logged at DEBUG only.

    Returns:
        EquivalenceReport.
    """
    report = EquivalenceReport()
    for le in algebras:
        report.checked += 1
        found = _compare(
            le.name,
            check_inequality(le, ineq, Quantify.LETTERS),
            quasi_validity(le, output),
        )
        if found is not None:
            LOG.log(
                WARNING if expect_equivalent else DEBUG,
                "'%s' and its output disagree on '%s'",
                ineq,
                le.name,
            )
            report.discrepancies.append(found)
    LOG.info("checked %d algebra(s)", report.checked)
    return report


def check_step_soundness(
    steps: Sequence[DerivationStep], algebras: Iterable[FiniteLE]
) -> EquivalenceReport:
    """Every step must preserve validity in both directions.

    The system before a step is compared with the conjunction of the systems
    after it.

    Args:
        steps: Recorded steps of a run.
        algebras: Algebras to check.

    Returns:
        EquivalenceReport, discrepancies carry the step index.
    """
    report = EquivalenceReport()
    for le in algebras:
        report.checked += 1
        for index, step in enumerate(steps):
            if step.before is None:
                continue
            found = _compare(
                le.name,
                check_quasi(le, step.before.to_quasi()),
                quasi_validity(le, [x.to_quasi() for x in step.after]),
                index,
            )
            if found is not None:
                LOG.warning(
                    "%s (step %d) is unsound on '%s'", step.rule.value, index, le.name
                )
                report.discrepancies.append(found)
    return report


def verify_outcome(
    outcome: RunOutcome, algebras: Sequence[FiniteLE], steps: bool = False
) -> EquivalenceReport:
    """check_equivalence on a successful run, optionally with step soundness."""
    assert outcome.success
    report = check_equivalence(outcome.ineq, outcome.output, algebras)
    if steps:
        extra = check_step_soundness(outcome.steps, algebras)
        report.discrepancies.extend(extra.discrepancies)
    return report
