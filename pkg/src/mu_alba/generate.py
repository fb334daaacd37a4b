# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""Random terms and inequalities, plain or built from the class grammars."""

from __future__ import annotations

from enum import Enum
from logging import getLogger
from random import Random
from typing import TYPE_CHECKING, Callable

from .classifier import InequalityClass, classify_inequality
from .syntax import (
    App,
    Binder,
    BinderKind,
    Bottom,
    Family,
    FVar,
    Inequality,
    Join,
    Meet,
    Prop,
    Sign,
    Top,
    Variance,
)

if TYPE_CHECKING:
    from collections.abc import Iterator, Sequence

    from .syntax import Connective, Signature, Term

LOG = getLogger(__name__)
DEFAULT_LETTERS = ("p", "q", "r")
FIXPOINT_NAMES = ("X", "Y", "Z", "W", "V", "U")


class Kind(Enum):
    RANDOM = "random"
    RESTRICTED = "restricted"
    TAME = "tame"


class InequalityGenerator:
    """Random generation over a signature.

    Class directed generation draws an order-type over the letters when the
    signature has antitone coordinates (all 1 otherwise). Critical letters
    sit on the left, under PIA nodes, under skeleton nodes. The right side
    only carries non-critical occurrences.
    """

    __slots__ = ("_epsilon", "_monotone", "_pools", "letters", "rng", "sig")

    def __init__(
        self, sig: Signature, rng: Random, letters: Sequence[str] = DEFAULT_LETTERS
    ) -> None:
        self.sig = sig
        self.rng = rng
        self.letters = tuple(letters)
        self._epsilon: dict[str, Variance] = {}
        self._pools: dict[tuple[Family, int], list[Connective]] = {}
        self._monotone: dict[tuple[Family, int], list[Connective]] = {}
        for conn in sig.base:
            if conn.arity not in (1, 2):
                continue
            self._pools.setdefault((conn.family, conn.arity), []).append(conn)
            if all(x is Variance.MONO for x in conn.order_type):
                self._monotone.setdefault((conn.family, conn.arity), []).append(conn)

    def _pick(
        self, family: Family, arity: int, monotone: bool = False
    ) -> Connective | None:
        pool = (self._monotone if monotone else self._pools).get((family, arity))
        return self.rng.choice(pool) if pool else None

    def _letter(self) -> Term:
        return Prop(self.rng.choice(self.letters))

    # plain random terms

    def term(
        self, depth: int, sign: Sign = Sign.PLUS, bound: dict[str, Sign] | None = None
    ) -> Term:
        """Random term with positive binder bodies.

        Args:
            depth: Maximum depth.
            sign: Sign of the generated node relative to the root.
            bound: Fixed point variables in scope with the sign of their binder.

        Returns:
            Term.
        """
        bound = bound or {}
        rng = self.rng
        if depth <= 1 or rng.random() < 0.2:
            usable = [FVar(x) for x, s in bound.items() if s is sign]
            pool: list[Term] = [Prop(x) for x in self.letters] + usable
            if rng.random() < 0.1:
                return rng.choice((Bottom(), Top()))
            return rng.choice(pool)
        choice = rng.random()
        if choice < 0.2:
            return Meet(self.term(depth - 1, sign, bound), self.term(depth - 1, sign, bound))
        if choice < 0.4:
            return Join(self.term(depth - 1, sign, bound), self.term(depth - 1, sign, bound))
        if choice < 0.8 and self.sig.base:
            conn = rng.choice(self.sig.base)
            return App(
                conn,
                tuple(
                    self.term(depth - 1, sign.apply(v), bound) for v in conn.order_type
                ),
            )
        if len(bound) >= len(FIXPOINT_NAMES):
            return self._letter()
        var = FIXPOINT_NAMES[len(bound)]
        kind = rng.choice((BinderKind.MU, BinderKind.NU))
        return Binder(kind, var, self.term(depth - 1, sign, {**bound, var: sign}))

    def inequality(self, depth: int) -> Inequality:
        return Inequality(self.term(depth), self.term(depth, Sign.MINUS))

    # class grammars

    def _draw_epsilon(self) -> None:
        mixed = any(
            x is Variance.ANTI for conn in self.sig.base for x in conn.order_type
        )
        choices = (Variance.MONO, Variance.ANTI) if mixed else (Variance.MONO,)
        self._epsilon = {x: self.rng.choice(choices) for x in self.letters}

    def _leaf(self, sign: Sign, critical: bool) -> Term:
        """Letter whose occurrence at sign is critical (or not) for the drawn
        order-type, any letter when none qualifies."""
        plus = sign is Sign.PLUS
        wanted = [
            x
            for x in self.letters
            if ((self._epsilon.get(x, Variance.MONO) is Variance.MONO) == plus)
            == critical
        ]
        return Prop(self.rng.choice(wanted or self.letters))

    def _with_constants(
        self, conn: Connective, sign: Sign, child: Callable[[Sign], Term]
    ) -> Term:
        """conn applied to one generated argument, constants elsewhere."""
        pos = self.rng.randrange(conn.arity)
        return App(
            conn,
            tuple(
                child(sign.apply(v)) if idx == pos else self._constant()
                for idx, v in enumerate(conn.order_type)
            ),
        )

    def _constant(self) -> Term:
        """Letter-free, binder-free sentence."""
        leaf = self.rng.choice((Bottom(), Top()))
        conn = self._pick(self.rng.choice((Family.F, Family.G)), 1)
        if conn is not None and self.rng.random() < 0.4:
            return App(conn, (leaf,))
        return leaf

    def _pia(self, depth: int, sign: Sign) -> Term:
        rng = self.rng
        if depth <= 1 or rng.random() < 0.35:
            return self._leaf(sign, critical=True)
        plus = sign is Sign.PLUS
        family = Family.G if plus else Family.F
        choice = rng.random()
        if choice < 0.3:
            left = self._pia(depth - 1, sign)
            right = self._pia(depth - 1, sign)
            return Meet(left, right) if plus else Join(left, right)
        if choice < 0.75 and (conn := self._pick(family, 1)) is not None:
            return App(conn, (self._pia(depth - 1, sign.apply(conn.order_type[0])),))
        if (conn := self._pick(family, 2)) is not None:
            return self._with_constants(conn, sign, lambda s: self._pia(depth - 1, s))
        return self._leaf(sign, critical=True)

    def _skeleton(self, depth: int, sign: Sign, binders: bool) -> Term:
        rng = self.rng
        if depth <= 1 or rng.random() < 0.25:
            return self._pia(depth, sign)
        plus = sign is Sign.PLUS
        family = Family.F if plus else Family.G
        choice = rng.random()
        if choice < 0.25:
            left = self._skeleton(depth - 1, sign, binders)
            right = self._skeleton(depth - 1, sign, binders)
            return Join(left, right) if plus else Meet(left, right)
        if choice < 0.5 and (conn := self._pick(family, 1)) is not None:
            child = self._skeleton(depth - 1, sign.apply(conn.order_type[0]), binders)
            return App(conn, (child,))
        if choice < 0.7 and (conn := self._pick(family, 2)) is not None:
            return self._with_constants(
                conn, sign, lambda s: self._skeleton(depth - 1, s, binders)
            )
        if binders and plus:
            # least fixed point of S \/ f(X) on the critical branch
            body: Term = FVar("X")
            if (conn := self._pick(Family.F, 1, monotone=True)) is not None:
                body = App(conn, (body,))
            return Binder(
                BinderKind.MU,
                "X",
                Join(self._skeleton(depth - 1, sign, binders=False), body),
            )
        return self._pia(depth, sign)

    def _outer(self, depth: int, sign: Sign) -> Term:
        """Skeleton shaped term over non-critical occurrences."""
        rng = self.rng
        if depth <= 1 or rng.random() < 0.3:
            return self._leaf(sign, critical=False)
        plus = sign is Sign.PLUS
        family = Family.F if plus else Family.G
        choice = rng.random()
        if choice < 0.3:
            left = self._outer(depth - 1, sign)
            right = self._outer(depth - 1, sign)
            return Join(left, right) if plus else Meet(left, right)
        if choice < 0.7 and (conn := self._pick(family, 1)) is not None:
            return App(conn, (self._outer(depth - 1, sign.apply(conn.order_type[0])),))
        if (conn := self._pick(family, 2)) is not None:
            return App(
                conn,
                tuple(self._outer(depth - 1, sign.apply(v)) for v in conn.order_type),
            )
        return self._leaf(sign, critical=False)

    def restricted(self, depth: int) -> Inequality:
        """Candidate restricted inductive inequality for a drawn order-type."""
        self._draw_epsilon()
        return Inequality(
            self._skeleton(depth, Sign.PLUS, binders=True),
            self._outer(depth, Sign.MINUS),
        )

    def tame(self, depth: int) -> Inequality:
        """Candidate tame inductive inequality with letter-free +nu/-mu binders."""
        self._draw_epsilon()
        lhs = self._skeleton(depth, Sign.PLUS, binders=False)
        rhs = self._outer(depth, Sign.MINUS)
        if self.rng.random() < 0.5:
            body: Term = FVar("X")
            if (conn := self._pick(Family.G, 1, monotone=True)) is not None:
                body = App(conn, (body,))
            lhs = Join(lhs, Binder(BinderKind.NU, "X", Meet(self._constant(), body)))
        if self.rng.random() < 0.5:
            body = FVar("X")
            if (conn := self._pick(Family.F, 1, monotone=True)) is not None:
                body = App(conn, (body,))
            rhs = Meet(rhs, Binder(BinderKind.MU, "X", Join(self._constant(), body)))
        return Inequality(lhs, rhs)


def generate(
    kind: Kind,
    count: int,
    sig: Signature,
    depth: int = 4,
    seed: int = 0,
    letters: Sequence[str] = DEFAULT_LETTERS,
) -> Iterator[Inequality]:
    """Stream of generated inequalities.

    Class directed kinds are filtered by the classifier, candidates it rejects
    are logged and skipped.

    Args:
        kind: Generator to use.
        count: Number of inequalities to yield.
        sig: Signature.
        depth: Maximum term depth.
        seed: Random seed.
        letters: Proposition letters to use.

    Yields:
        Inequalities.
    """
    generator = InequalityGenerator(sig, Random(seed), letters)
    wanted = {
        Kind.RESTRICTED: InequalityClass.RESTRICTED,
        Kind.TAME: InequalityClass.TAME,
    }.get(kind)
    produced = 0
    attempts = 0
    while produced < count:
        attempts += 1
        if attempts > count * 50:
            LOG.warning("giving up after %d attempts (%d generated)", attempts, produced)
            return
        if kind is Kind.RANDOM:
            ineq = generator.inequality(depth)
        elif kind is Kind.RESTRICTED:
            ineq = generator.restricted(depth)
        else:
            ineq = generator.tame(depth)
        if wanted is not None and not classify_inequality(ineq).holds(wanted):
            LOG.warning("generated %s is not %s, skipped", ineq, wanted.value)
            continue
        produced += 1
        yield ineq
