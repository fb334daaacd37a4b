# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""Reduction strategy, runs, traces and replay."""

from __future__ import annotations

from dataclasses import dataclass, field
from logging import getLogger
from typing import TYPE_CHECKING, Any

from .classifier import InequalityClass, Witness, classify_inequality, classify_node
from .common import RuleError, TermError
from .rules import (
    APPROXIMATION_RULES,
    DerivationStep,
    Mode,
    Rule,
    RunConfig,
    Side,
    System,
    ackermann_left,
    ackermann_right,
    approximate,
    approximation_rule,
    distribute,
    eliminate_monotone,
    frontier,
    goal_tree,
    has_letters,
    is_pure,
    preprocess,
    residuate_system,
    split_once,
    split_system,
    surface,
)
from .syntax import (
    Binder,
    Inequality,
    Language,
    Variance,
    binder_paths,
    in_language,
    letters,
    star_translation,
    subterm_at,
)

if TYPE_CHECKING:
    from .syntax import QuasiInequality
    from .trees import SignedNode

LOG = getLogger(__name__)
TRACE_VERSION = 1

WITNESS_PREFERENCE = {
    Mode.TAME: (
        InequalityClass.TAME,
        InequalityClass.RESTRICTED,
        InequalityClass.INDUCTIVE,
        InequalityClass.RECURSIVE,
    ),
    Mode.PROPER: (
        InequalityClass.RESTRICTED,
        InequalityClass.INDUCTIVE,
        InequalityClass.TAME,
        InequalityClass.RECURSIVE,
    ),
}


@dataclass
class SystemRun:
    """Stage 2 reduction of one preprocessed system."""

    initial: System
    steps: list[DerivationStep] = field(default_factory=list)
    final: System | None = None
    reason: str = ""
    stuck: System | None = None

    @property
    def success(self) -> bool:
        return self.final is not None

    def to_json(self) -> dict[str, Any]:
        outcome: dict[str, Any]
        if self.final is not None:
            outcome = {"success": True, "output": str(self.final)}
        else:
            outcome = {"success": False, "reason": self.reason, "stuck": str(self.stuck)}
        return {
            "initial": str(self.initial),
            "steps": [x.to_json() for x in self.steps],
            "outcome": outcome,
        }


@dataclass
class RunOutcome:
    ineq: Inequality
    config: RunConfig
    witness: Witness
    preprocessing: list[DerivationStep] = field(default_factory=list)
    runs: list[SystemRun] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return all(x.success for x in self.runs)

    @property
    def output(self) -> list[QuasiInequality]:
        """Pure quasi-inequalities, empty on failure."""
        if not self.success:
            return []
        return [x.final.to_quasi() for x in self.runs if x.final is not None]

    @property
    def reason(self) -> str:
        return next((x.reason for x in self.runs if not x.success), "")

    @property
    def stuck_systems(self) -> list[System]:
        return [x.stuck for x in self.runs if x.stuck is not None]

    @property
    def steps(self) -> list[DerivationStep]:
        found = list(self.preprocessing)
        for item in self.runs:
            found.extend(item.steps)
        return found

    def to_json(self) -> dict[str, Any]:
        return {
            "version": TRACE_VERSION,
            "input": str(self.ineq),
            "mode": self.config.mode.value,
            "pivotal": self.config.pivotal,
            "witness": self.witness.to_json(),
            "preprocessing": [x.to_json() for x in self.preprocessing],
            "preprocessed": [str(x.initial) for x in self.runs],
            "systems": [x.to_json() for x in self.runs],
            "success": self.success,
            "reason": self.reason,
            "output": [str(x) for x in self.output],
        }


def resolve_witness(ineq: Inequality, config: RunConfig) -> Witness:
    """Order-type and strict order steering the run.

    Explicit epsilon and omega in config win. Otherwise the classifier is
    asked for a witness of the class closest to the mode, falling back to all
    letters with order-type 1.

    Args:
        ineq: Input inequality.
        config: Run regime.

    Returns:
        Witness.
    """
    names = letters(ineq)
    if config.epsilon is not None:
        given = dict(config.epsilon)
        witness = Witness(tuple((x, given.get(x, Variance.MONO)) for x in names))
    else:
        report = classify_inequality(ineq)
        found = next(
            (
                report.witness(cls)
                for cls in WITNESS_PREFERENCE[config.mode]
                if report.holds(cls)
            ),
            None,
        )
        witness = found or Witness(tuple((x, Variance.MONO) for x in names))
    if config.omega is not None:
        witness = Witness(witness.epsilon, config.omega)
    LOG.debug("witness: %s", witness)
    return witness


def _next_extraction(sys: System, mode: Mode) -> tuple[Side, SignedNode] | None:
    for side in Side:
        for node in frontier(goal_tree(sys, side).root, mode):
            if has_letters(node.term):
                return side, node
    return None


def _approximate_all(
    sys: System, config: RunConfig, steps: list[DerivationStep]
) -> System:
    while True:
        found = _next_extraction(sys, config.mode)
        if found is None:
            return sys
        side, node = found
        rule = approximation_rule(side, node.sign)
        if isinstance(node.term, Binder) and classify_node(node).is_skeleton:
            if config.mode is Mode.TAME:
                raise RuleError(rule.value, "tame restriction violated")
            raise RuleError(rule.value, "targeted join condition not certified")
        after = approximate(sys, side, node.path, config)
        steps.append(
            DerivationStep(rule, {"side": side.value, "path": node.path}, sys, (after,))
        )
        sys = after


def _check_binders_covered(sys: System, steps: list[DerivationStep]) -> None:
    paths = [
        (x.position["side"], x.position["path"])
        for x in steps
        if x.rule in APPROXIMATION_RULES
    ]
    for side in Side:
        term = sys.goal.lhs if side is Side.LHS else sys.goal.rhs
        for path in binder_paths(term):
            if not has_letters(subterm_at(term, path)):
                continue
            if not any(
                name == side.value and len(found) > len(path) and found[: len(path)] == path
                for name, found in paths
            ):
                raise RuleError("approx", "binder not on an approximation branch")


def _eliminate(
    sys: System, witness: Witness, steps: list[DerivationStep]
) -> System:
    epsilon = witness.epsilon_map
    order = witness.omega.topological([x for x, _ in witness.epsilon])
    while True:
        remaining = [x for x in order if x in sys.letters]
        remaining.extend(x for x in sys.letters if x not in remaining)
        if not remaining:
            return sys
        errors: list[RuleError] = []
        for letter in remaining:
            preferred = epsilon.get(letter, Variance.MONO)
            for variance in (preferred, preferred.opposite):
                attempt: list[DerivationStep] = []
                try:
                    candidate = surface(sys, letter, variance, attempt)
                    if variance is Variance.MONO:
                        rule, after = Rule.ACKERMANN_RA, ackermann_right(candidate, letter)
                    else:
                        rule, after = Rule.ACKERMANN_LA, ackermann_left(candidate, letter)
                except RuleError as exc:
                    LOG.debug("'%s' with order-type %s: %s", letter, variance.value, exc)
                    errors.append(exc)
                    continue
                attempt.append(
                    DerivationStep(rule, {"letter": letter}, candidate, (after,))
                )
                steps.extend(attempt)
                sys = after
                break
            else:
                continue
            break
        else:
            raise errors[0]


def reduce_system(sys: System, config: RunConfig, witness: Witness) -> SystemRun:
    """Stage 2 on one system: approximation, then surfacing and Ackermann per letter.

    Args:
        sys: Preprocessed system.
        config: Run regime.
        witness: Order-type and strict order.

    Returns:
        SystemRun.
    """
    result = SystemRun(sys)
    current = sys
    try:
        current = _approximate_all(current, config, result.steps)
        if config.mode is Mode.PROPER:
            _check_binders_covered(sys, result.steps)
        current = _eliminate(current, witness, result.steps)
    except RuleError as exc:
        result.reason = str(exc)
        result.stuck = result.steps[-1].after[0] if result.steps else sys
        LOG.debug("stuck: %s", result.reason)
        return result
    assert is_pure(current)
    result.final = current
    return result


def run(ineq: Inequality, config: RunConfig | None = None) -> RunOutcome:
    """Preprocess ineq, reduce every system and collect the pure output.

    Args:
        ineq: Inequality with mu/nu binders over base connectives.
        config: Run regime, proper and pivotal by default.

    Returns:
        RunOutcome.
    """
    config = config or RunConfig()
    if not in_language(ineq, Language.L1):
        raise TermError("Reduction expects mu/nu binders over base connectives")
    witness = resolve_witness(ineq, config)
    outcome = RunOutcome(ineq, config, witness)
    systems = preprocess(ineq, outcome.preprocessing)
    LOG.debug("%d system(s) after preprocessing", len(systems))
    outcome.runs = [reduce_system(x, config, witness) for x in systems]
    return outcome


def apply_step(
    sys: System, step: DerivationStep, config: RunConfig | None = None
) -> tuple[System, ...]:
    """Re-execute a recorded rule instance on sys.

    Args:
        sys: System the step applies to.
        step: Recorded step.
        config: Run regime used by approximation side conditions.

    Returns:
        Resulting systems.
    """
    config = config or RunConfig()
    position = step.position
    side = Side(position["side"]) if "side" in position else None
    rule = step.rule
    if rule is Rule.ELIM_MONOTONE:
        return (System(sys.premises, eliminate_monotone(sys.goal)),)
    if rule is Rule.DISTRIBUTE:
        return (System(sys.premises, distribute(sys.goal)),)
    if rule is Rule.STAR:
        starred = star_translation(sys.goal)
        assert isinstance(starred, Inequality)
        return (System(sys.premises, starred),)
    if rule is Rule.SPLIT:
        if "premise" in position:
            return (split_system(sys, position["premise"], side),)
        parts = split_once(sys.goal)
        if parts is None:
            raise RuleError(rule.value, "goal cannot be split")
        return tuple(System(sys.premises, x) for x in parts)
    if rule in APPROXIMATION_RULES:
        assert side is not None
        return (approximate(sys, side, tuple(position["path"]), config),)
    if rule is Rule.RESIDUATE:
        return (
            residuate_system(sys, position["premise"], position["coordinate"], side),
        )
    if rule is Rule.ACKERMANN_RA:
        return (ackermann_right(sys, position["letter"]),)
    return (ackermann_left(sys, position["letter"]),)


def replay(outcome: RunOutcome) -> list[QuasiInequality]:
    """Re-execute the trace of outcome from its input.

    Args:
        outcome: Recorded run.

    Returns:
        Reproduced output, equal to outcome.output when the trace is faithful.
    """
    if preprocess(outcome.ineq) != [x.initial for x in outcome.runs]:
        raise RuleError("replay", "preprocessing diverged")
    for step in outcome.preprocessing:
        assert step.before is not None
        if apply_step(step.before, step, outcome.config) != step.after:
            raise RuleError("replay", f"{step.rule.value} diverged")
    output = []
    for item in outcome.runs:
        current = item.initial
        for step in item.steps:
            if step.before != current:
                raise RuleError("replay", f"{step.rule.value} applied to another system")
            (current,) = apply_step(current, step, outcome.config)
            if (current,) != step.after:
                raise RuleError("replay", f"{step.rule.value} diverged")
        if item.success:
            if current != item.final:
                raise RuleError("replay", "final system differs")
            output.append(current.to_quasi())
    return output if outcome.success else []
