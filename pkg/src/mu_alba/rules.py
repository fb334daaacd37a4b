# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""Rewrite rules of the reduction: preprocessing, the open/closed calculus,
approximation, residuation, splitting and Ackermann elimination."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from logging import getLogger
from typing import TYPE_CHECKING, Any

from .classifier import NodeFlag, StrictOrder, classify_node
from .common import RuleError, TermError
from .syntax import (
    App,
    Binder,
    Bottom,
    CoNominal,
    Family,
    FVar,
    Inequality,
    Join,
    Language,
    Meet,
    Nominal,
    Positivity,
    Prop,
    QuasiInequality,
    Sign,
    Top,
    Variance,
    conominals,
    in_language,
    is_sentence,
    iter_subterms,
    join_all,
    letters,
    meet_all,
    nominals,
    occurrence_signs,
    positivity,
    replace_at,
    star_translation,
    substitute,
)
from .trees import signed_tree

if TYPE_CHECKING:
    from .syntax import Path, Term
    from .trees import SignedNode, SignedTree

LOG = getLogger(__name__)


class Mode(Enum):
    TAME = "tame"
    PROPER = "proper"


class Side(Enum):
    LHS = "lhs"
    RHS = "rhs"

    @property
    def sign(self) -> Sign:
        """Root sign of this side in a signed generation tree."""
        return Sign.PLUS if self is Side.LHS else Sign.MINUS


class Rule(Enum):
    ELIM_MONOTONE = "elim_monotone"
    DISTRIBUTE = "distribute"
    SPLIT = "split"
    STAR = "star"
    APPROX_L_PLUS = "approx_L+"
    APPROX_L_MINUS = "approx_L-"
    APPROX_R_PLUS = "approx_R+"
    APPROX_R_MINUS = "approx_R-"
    RESIDUATE = "residuate"
    ACKERMANN_RA = "ackermann_RA"
    ACKERMANN_LA = "ackermann_LA"


APPROXIMATION_RULES = frozenset(
    {Rule.APPROX_L_PLUS, Rule.APPROX_L_MINUS, Rule.APPROX_R_PLUS, Rule.APPROX_R_MINUS}
)


@dataclass(frozen=True)
class RunConfig:
    """Run regime. epsilon and omega override the classifier witness."""

    mode: Mode = Mode.PROPER
    pivotal: bool = True
    epsilon: tuple[tuple[str, Variance], ...] | None = None
    omega: StrictOrder | None = None


@dataclass(frozen=True)
class System:
    """Premises and goal, standing for the quasi-inequality premises => goal."""

    premises: tuple[Inequality, ...]
    goal: Inequality

    def __post_init__(self) -> None:
        object.__setattr__(self, "premises", tuple(self.premises))

    def __str__(self) -> str:
        return str(self.to_quasi())

    def to_quasi(self) -> QuasiInequality:
        return QuasiInequality(self.premises, self.goal)

    @property
    def letters(self) -> tuple[str, ...]:
        return letters(self.to_quasi())


def is_pure(sys: System) -> bool:
    """True iff no proposition letter occurs in sys."""
    return not sys.letters


@dataclass(frozen=True)
class DerivationStep:
    """One rule instance. Splitting during preprocessing has several results."""

    rule: Rule
    position: dict[str, Any] = field(default_factory=dict)
    before: System | None = None
    after: tuple[System, ...] = ()

    def to_json(self) -> dict[str, Any]:
        position = {
            key: list(value) if isinstance(value, tuple) else value
            for key, value in self.position.items()
        }
        return {
            "rule": self.rule.value,
            "position": position,
            "before": str(self.before),
            "after": [str(x) for x in self.after],
        }


def _side(ineq: Inequality, side: Side) -> Term:
    return ineq.lhs if side is Side.LHS else ineq.rhs


def _with_side(ineq: Inequality, side: Side, t: Term) -> Inequality:
    return Inequality(t, ineq.rhs) if side is Side.LHS else Inequality(ineq.lhs, t)


def has_letters(t: Term) -> bool:
    return any(isinstance(sub, Prop) for _, sub in iter_subterms(t))


# Stage 1


def eliminate_monotone(ineq: Inequality) -> Inequality:
    """Substitute bottom (top) for letters in which ineq is positive (negative).

    Args:
        ineq: Inequality.

    Returns:
        Inequality with no monotone letter left.
    """
    changed = True
    while changed:
        changed = False
        for name in letters(ineq):
            atom = Prop(name)
            left = positivity(ineq.lhs, atom)
            right = positivity(ineq.rhs, atom)
            value: Term
            if left in (Positivity.NEGATIVE, Positivity.BOTH) and right in (
                Positivity.POSITIVE,
                Positivity.BOTH,
            ):
                value = Bottom()
            elif left in (Positivity.POSITIVE, Positivity.BOTH) and right in (
                Positivity.NEGATIVE,
                Positivity.BOTH,
            ):
                value = Top()
            else:
                continue
            LOG.debug("monotone letter '%s' := %s", name, value)
            ineq = Inequality(
                substitute(ineq.lhs, atom, value), substitute(ineq.rhs, atom, value)
            )
            changed = True
            break
    return ineq


def _distribute(t: Term) -> Term:
    if isinstance(t, Binder) or not t.children:
        return t
    t = t.rebuild(tuple(_distribute(x) for x in t.children))
    if not isinstance(t, App):
        return t
    is_f = t.connective.family is Family.F
    outer = Join if is_f else Meet
    for idx, (arg, variance) in enumerate(zip(t.args, t.connective.order_type)):
        target = Join if (variance is Variance.MONO) == is_f else Meet
        if isinstance(arg, target):
            left = App(t.connective, (*t.args[:idx], arg.left, *t.args[idx + 1 :]))
            right = App(t.connective, (*t.args[:idx], arg.right, *t.args[idx + 1 :]))
            return _distribute(outer(left, right))
    return t


def distribute(ineq: Inequality) -> Inequality:
    """Distribute F connectives over joins and G connectives over meets.

    Antitone coordinates turn meets (joins) into joins (meets). Binder bodies
    are left untouched.

    Args:
        ineq: Inequality.

    Returns:
        Rewritten inequality.
    """
    return Inequality(_distribute(ineq.lhs), _distribute(ineq.rhs))


def split_once(
    ineq: Inequality, side: Side | None = None
) -> tuple[Inequality, Inequality] | None:
    """One splitting rule instance at the top, right meet first."""
    if side in (None, Side.RHS) and isinstance(ineq.rhs, Meet):
        return Inequality(ineq.lhs, ineq.rhs.left), Inequality(ineq.lhs, ineq.rhs.right)
    if side in (None, Side.LHS) and isinstance(ineq.lhs, Join):
        return Inequality(ineq.lhs.left, ineq.rhs), Inequality(ineq.lhs.right, ineq.rhs)
    return None


def split(ineq: Inequality) -> list[Inequality]:
    """Exhaustive splitting at the top.

    Args:
        ineq: Inequality.

    Returns:
        Inequalities whose conjunction is equivalent to ineq.
    """
    parts = split_once(ineq)
    if parts is None:
        return [ineq]
    return [*split(parts[0]), *split(parts[1])]


def preprocess(
    ineq: Inequality, trace: list[DerivationStep] | None = None
) -> list[System]:
    """Stage 1: monotone elimination, distribution, splitting, star translation.

    Args:
        ineq: Inequality of L1.
        trace: Receives the rule instances, when given.

    Returns:
        One System without premises per resulting inequality.
    """
    steps = [] if trace is None else trace
    systems: list[System] = []

    def record(rule: Rule, before: Inequality, *after: Inequality) -> None:
        LOG.debug("%s: %s", rule.value, before)
        steps.append(
            DerivationStep(
                rule, {}, System((), before), tuple(System((), x) for x in after)
            )
        )

    def process(current: Inequality) -> None:
        while True:
            reduced = eliminate_monotone(current)
            if reduced != current:
                record(Rule.ELIM_MONOTONE, current, reduced)
                current = reduced
            distributed = distribute(current)
            if distributed == current:
                break
            record(Rule.DISTRIBUTE, current, distributed)
            current = distributed
        parts = split_once(current)
        if parts is not None:
            record(Rule.SPLIT, current, *parts)
            for part in parts:
                process(part)
            return
        starred = star_translation(current)
        assert isinstance(starred, Inequality)
        if starred != current:
            record(Rule.STAR, current, starred)
        systems.append(System((), starred))

    process(ineq)
    return systems


# syntactically open and closed terms


@dataclass(frozen=True)
class SyntacticShape:
    open: bool = False
    closed: bool = False
    almost_open: bool = False
    almost_closed: bool = False

    @property
    def flags(self) -> frozenset[str]:
        return frozenset(
            name
            for name in ("open", "closed", "almost_open", "almost_closed")
            if getattr(self, name)
        )


def _shape(t: Term, want_open: bool, almost: bool) -> bool:
    if isinstance(t, (Bottom, Top, Prop, FVar)):
        return True
    if isinstance(t, Nominal):
        return not want_open
    if isinstance(t, CoNominal):
        return want_open
    if isinstance(t, (Meet, Join)):
        return all(_shape(x, want_open, almost) for x in t.children)
    if isinstance(t, App):
        conn = t.connective
        if conn.is_residual and (conn.family is Family.G) != want_open:
            return False
        return all(
            _shape(arg, want_open if variance is Variance.MONO else not want_open, almost)
            for arg, variance in zip(t.args, conn.order_type)
        )
    if isinstance(t, Binder):
        # open admits nu*, closed admits mu*, the almost variants admit both
        if t.kind.least != want_open:
            return _shape(t.body, want_open, almost)
        return almost and _shape(t.body, want_open, almost)
    raise TypeError(f"Unexpected term {t!r}")


def syntactic_shape(t: Term) -> SyntacticShape:
    """Open, closed, almost open and almost closed membership of t.

    Args:
        t: Term of L* with nominals, co-nominals and residuals allowed.

    Returns:
        SyntacticShape.
    """
    if not in_language(t, Language.LSTAR_PLUS):
        raise TermError(f"'{t}' has binders other than mu*/nu*")
    return SyntacticShape(
        open=_shape(t, True, False),
        closed=_shape(t, False, False),
        almost_open=_shape(t, True, True),
        almost_closed=_shape(t, False, True),
    )


# approximation


def goal_tree(sys: System, side: Side) -> SignedTree:
    return signed_tree(_side(sys.goal, side), side.sign)


def crossable(node: SignedNode, mode: Mode) -> bool:
    """Can an approximation path pass through the skeleton binder at node?

    Tame runs never cross binders. Proper runs cross when every path from the
    binder down to a letter-carrying frontier node is inner skeleton, every
    binary SLR node on those paths has a single child carrying letters, and
    the frontier nodes carrying letters are sentences.
    """
    if mode is Mode.TAME:
        return False
    live = [
        x
        for child in node.children
        for x in frontier(child, mode)
        if has_letters(x.term)
    ]
    for low in live:
        if not is_sentence(low.term):
            return False
        for ancestor in low.ancestors():
            cls = classify_node(ancestor)
            if not cls.is_inner_skeleton:
                return False
            if NodeFlag.SLR_INNER in cls.flags and (
                sum(has_letters(x.term) for x in ancestor.children) > 1
            ):
                return False
            if ancestor is node:
                break
    return True


def frontier(node: SignedNode, mode: Mode) -> list[SignedNode]:
    """Lowest nodes reachable from node through skeleton nodes.

    Args:
        node: Start node.
        mode: Decides which skeleton binders block.

    Returns:
        Leaves, non-skeleton nodes and blocked binders, left to right.
    """
    if (
        node.is_leaf
        or not classify_node(node).is_skeleton
        or (isinstance(node.term, Binder) and not crossable(node, mode))
    ):
        return [node]
    return [x for child in node.children for x in frontier(child, mode)]


def approximation_rule(side: Side, sign: Sign) -> Rule:
    if side is Side.LHS:
        return Rule.APPROX_L_PLUS if sign is Sign.PLUS else Rule.APPROX_L_MINUS
    return Rule.APPROX_R_PLUS if sign is Sign.PLUS else Rule.APPROX_R_MINUS


def _first_free(used: frozenset[int]) -> int:
    index = 1
    while index in used:
        index += 1
    return index


def next_nominal(sys: System) -> Nominal:
    """Nominal with the smallest index not occurring in sys."""
    return Nominal(_first_free(nominals(sys.to_quasi())))


def next_conominal(sys: System) -> CoNominal:
    """Co-nominal with the smallest index not occurring in sys."""
    return CoNominal(_first_free(conominals(sys.to_quasi())))


def approximate(sys: System, side: Side, path: Path, config: RunConfig) -> System:
    """Extract the goal subterm at (side, path) with a fresh nominal or co-nominal.

    Args:
        sys: System.
        side: Side of the goal holding the subterm.
        path: Position of the subterm on that side.
        config: Run regime.

    Returns:
        System with the approximant added to the premises.
    """
    tree = goal_tree(sys, side)
    try:
        node = tree.node_at(path)
    except IndexError:
        raise RuleError("approx", f"invalid position {side.value} {path}") from None
    rule = approximation_rule(side, node.sign)
    gamma = node.term
    if not in_language(gamma, Language.LSTAR) or not is_sentence(gamma):
        raise RuleError(rule.value, "extracted subterm is not a sentence of L*")
    context = _side(sys.goal, side)
    if any(
        isinstance(sub, App) and sub.connective.is_residual
        for _, sub in iter_subterms(context)
    ):
        raise RuleError(rule.value, "context contains residual connectives")
    for ancestor in node.ancestors():
        if not classify_node(ancestor).is_skeleton:
            raise RuleError(rule.value, "branch contains a non-skeleton node")
        if isinstance(ancestor.term, Binder):
            if config.mode is Mode.TAME:
                raise RuleError(rule.value, "tame restriction violated")
            if not crossable(ancestor, config.mode):
                raise RuleError(rule.value, "targeted join condition not certified")
            LOG.warning(
                "crossing %s%s: side condition assumed syntactically",
                ancestor.sign.value,
                ancestor.constructor,
            )
    if config.pivotal and frontier(node, config.mode) != [node]:
        raise RuleError(rule.value, "pivotal restriction violated")
    fresh: Term
    if rule in (Rule.APPROX_L_PLUS, Rule.APPROX_R_PLUS):
        fresh = next_nominal(sys)
        extracted = Inequality(fresh, gamma)
    else:
        fresh = next_conominal(sys)
        extracted = Inequality(gamma, fresh)
    LOG.debug("%s at %s %s: %s", rule.value, side.value, path, extracted)
    goal = _with_side(sys.goal, side, replace_at(context, path, fresh))
    return System((*sys.premises, extracted), goal)


# residuation and splitting


def residuate(
    ineq: Inequality, coordinate: int, side: Side | None = None
) -> Inequality:
    """Residuate the F application on the left or the G application on the right.

    Args:
        ineq: f(..) <= psi or psi <= g(..).
        coordinate: 1-based coordinate to solve for.
        side: Side holding the application. Defaults to the left side when it
            is an F application.

    Returns:
        Residuated inequality.
    """
    name = Rule.RESIDUATE.value
    if side is None:
        lhs = ineq.lhs
        side = (
            Side.LHS
            if isinstance(lhs, App) and lhs.connective.family is Family.F
            else Side.RHS
        )
    term = _side(ineq, side)
    family = Family.F if side is Side.LHS else Family.G
    if not isinstance(term, App) or term.connective.family is not family:
        raise RuleError(
            name, f"{side.value} is not an application of a {family.value} connective"
        )
    conn = term.connective
    if conn.is_residual:
        raise RuleError(name, f"'{conn.name}' is a residual and has no residual")
    if not 1 <= coordinate <= conn.arity:
        raise RuleError(name, f"coordinate {coordinate} out of range for '{conn.name}'")
    pos = coordinate - 1
    other = ineq.rhs if side is Side.LHS else ineq.lhs
    phi = term.args[pos]
    resid = App(conn.residual(coordinate), (*term.args[:pos], other, *term.args[pos + 1 :]))
    mono = conn.order_type[pos] is Variance.MONO
    if side is Side.LHS:
        return Inequality(phi, resid) if mono else Inequality(resid, phi)
    return Inequality(resid, phi) if mono else Inequality(phi, resid)


def unresiduate(ineq: Inequality) -> Inequality:
    """Read a residuation display backwards, restoring the base application.

    Args:
        ineq: Inequality with a residual application on one side.

    Returns:
        The inequality residuate was applied to.
    """
    for side in (Side.RHS, Side.LHS):
        term = _side(ineq, side)
        if isinstance(term, App) and term.connective.is_residual:
            break
    else:
        raise RuleError(Rule.RESIDUATE.value, "no residual application")
    conn = term.connective
    base = conn.origin()
    assert conn.coordinate is not None
    pos = conn.coordinate - 1
    mono = conn.order_type[pos] is Variance.MONO
    # side the residual is displayed on, per family and variance
    expected = Side.RHS if (base.family is Family.F) == mono else Side.LHS
    if side is not expected:
        raise RuleError(Rule.RESIDUATE.value, f"'{conn.name}' on the wrong side")
    phi = ineq.lhs if side is Side.RHS else ineq.rhs
    psi = term.args[pos]
    restored = App(base, (*term.args[:pos], phi, *term.args[pos + 1 :]))
    if base.family is Family.F:
        return Inequality(restored, psi)
    return Inequality(psi, restored)


def _premise(sys: System, index: int, rule: Rule) -> Inequality:
    if not 0 <= index < len(sys.premises):
        raise RuleError(rule.value, f"no premise {index}")
    return sys.premises[index]


def residuate_system(
    sys: System, index: int, coordinate: int, side: Side | None = None
) -> System:
    """Residuate the index-th premise."""
    premise = residuate(_premise(sys, index, Rule.RESIDUATE), coordinate, side)
    premises = list(sys.premises)
    premises[index] = premise
    return System(premises, sys.goal)


def split_system(sys: System, index: int, side: Side | None = None) -> System:
    """Split the index-th premise, keeping the parts in its place."""
    parts = split_once(_premise(sys, index, Rule.SPLIT), side)
    if parts is None:
        raise RuleError(Rule.SPLIT.value, f"premise {index} cannot be split")
    return System(
        (*sys.premises[:index], *parts, *sys.premises[index + 1 :]), sys.goal
    )


def _has_target(t: Term, atom: Prop, sign: Sign, target: Sign) -> bool:
    return any(x is target for x in occurrence_signs(t, atom, sign))


def surface(
    sys: System, letter: str, variance: Variance, trace: list[DerivationStep]
) -> System:
    """Residuate and split premises until every occurrence of letter to be
    solved for stands alone on its side.

    Occurrences to be solved for are those signed - (for variance 1) or +
    (for variance d) with premise left sides signed + and right sides -.

    Args:
        sys: System after approximation.
        letter: Proposition letter.
        variance: Order-type entry of the letter.
        trace: Receives the rule instances.

    Returns:
        System ready for Ackermann elimination of letter.
    """
    atom = Prop(letter)
    target = Sign.MINUS if variance is Variance.MONO else Sign.PLUS
    progress = True
    while progress:
        progress = False
        for index, premise in enumerate(sys.premises):
            found = [
                side
                for side in Side
                if _has_target(_side(premise, side), atom, side.sign, target)
            ]
            if not found:
                continue
            if len(found) > 1:
                raise RuleError(
                    Rule.RESIDUATE.value,
                    f"'{letter}' to be solved for on both sides of {premise}",
                )
            side = found[0]
            term = _side(premise, side)
            if term == atom:
                continue
            position: dict[str, Any] = {"premise": index, "side": side.value}
            if isinstance(term, Join if side is Side.LHS else Meet):
                after = split_system(sys, index, side)
                trace.append(DerivationStep(Rule.SPLIT, position, sys, (after,)))
            elif (
                isinstance(term, App)
                and term.connective.family is (Family.F if side is Side.LHS else Family.G)
                and not term.connective.is_residual
            ):
                coordinate = next(
                    idx
                    for idx, (arg, v) in enumerate(
                        zip(term.args, term.connective.order_type), start=1
                    )
                    if _has_target(arg, atom, side.sign.apply(v), target)
                )
                position["coordinate"] = coordinate
                after = residuate_system(sys, index, coordinate, side)
                trace.append(DerivationStep(Rule.RESIDUATE, position, sys, (after,)))
            else:
                raise RuleError(
                    Rule.RESIDUATE.value, f"cannot surface '{letter}' in {premise}"
                )
            LOG.debug("surfacing '%s': %s", letter, after)
            sys = after
            progress = True
            break
    return sys


# Ackermann


def _check_member(ineq: Inequality, atom: Prop, right: bool, rule: Rule) -> None:
    wanted_left = Positivity.POSITIVE if right else Positivity.NEGATIVE
    wanted_right = Positivity.NEGATIVE if right else Positivity.POSITIVE
    if positivity(ineq.lhs, atom) not in (wanted_left, Positivity.BOTH):
        raise RuleError(
            rule.value, f"{ineq}: left side not {wanted_left.value} in '{atom.name}'"
        )
    if positivity(ineq.rhs, atom) not in (wanted_right, Positivity.BOTH):
        raise RuleError(
            rule.value, f"{ineq}: right side not {wanted_right.value} in '{atom.name}'"
        )
    if not syntactic_shape(ineq.lhs).closed:
        raise RuleError(rule.value, f"{ineq}: left side not syntactically closed")
    if not syntactic_shape(ineq.rhs).open:
        raise RuleError(rule.value, f"{ineq}: right side not syntactically open")


def _ackermann(sys: System, letter: str, right: bool) -> System:
    rule = Rule.ACKERMANN_RA if right else Rule.ACKERMANN_LA
    atom = Prop(letter)
    if letter not in sys.letters:
        raise RuleError(rule.value, f"'{letter}' does not occur")
    alphas: list[Term] = []
    kept: list[tuple[Inequality, bool]] = []
    for ineq in sys.premises:
        if letter not in letters(ineq):
            kept.append((ineq, False))
            continue
        bare, other = (ineq.rhs, ineq.lhs) if right else (ineq.lhs, ineq.rhs)
        if bare == atom and letter not in letters(other):
            shape = syntactic_shape(other)
            if right and not shape.closed:
                raise RuleError(rule.value, f"alpha {other} not syntactically closed")
            if not right and not shape.open:
                raise RuleError(rule.value, f"alpha {other} not syntactically open")
            alphas.append(other)
            continue
        _check_member(ineq, atom, right, rule)
        kept.append((ineq, True))
    if letter in letters(sys.goal):
        raise RuleError(rule.value, f"goal '{sys.goal}' still contains '{letter}'")
    alpha = join_all(alphas) if right else meet_all(alphas)

    def apply(ineq: Inequality) -> Inequality:
        return Inequality(
            substitute(ineq.lhs, atom, alpha), substitute(ineq.rhs, atom, alpha)
        )

    LOG.debug("%s '%s' := %s", rule.value, letter, alpha)
    return System(tuple(apply(x) if member else x for x, member in kept), sys.goal)


def ackermann_right(sys: System, letter: str) -> System:
    """Eliminate letter from premises alpha <= letter (alpha closed) and members
    beta <= gamma with beta positive and closed, gamma negative and open.

    The goal must already be free of letter.

    Args:
        sys: System.
        letter: Proposition letter.

    Returns:
        System without letter; the empty join of alphas is bottom.
    """
    return _ackermann(sys, letter, right=True)


def ackermann_left(sys: System, letter: str) -> System:
    """Order dual of ackermann_right, substituting the meet of the alphas."""
    return _ackermann(sys, letter, right=False)
