# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""Finite normal lattice expansions used as a brute force semantic oracle.

A finite lattice is its own canonical extension, so nominals and co-nominals
range over every element and all fixed point binders (mu, mu2, mu*) agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations, product
from logging import getLogger
from typing import TYPE_CHECKING, Callable

from .common import AlgebraError, NormalityError
from .syntax import (
    App,
    Binder,
    Bottom,
    CoNominal,
    Family,
    FVar,
    Meet,
    Join,
    Nominal,
    Prop,
    Top,
    Variance,
    conominals,
    free_fixpoint_variables,
    iter_subterms,
    letters,
    nominals,
)

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping, Sequence

    from .syntax import Connective, Inequality, QuasiInequality, Syntax, Term

LOG = getLogger(__name__)

Table = dict[tuple[int, ...], int]
Env = dict["Term", int]


class FiniteLattice:
    """Finite bounded lattice over the elements 0..size-1."""

    __slots__ = ("bot", "join_table", "labels", "leq", "meet_table", "name", "top")

    def __init__(
        self, labels: Sequence[str], leq: Sequence[Sequence[bool]], name: str = ""
    ) -> None:
        size = len(labels)
        if not size:
            raise AlgebraError("Lattice has no bounds (no elements)")
        self.labels = tuple(labels)
        self.leq = tuple(tuple(row) for row in leq)
        self.name = name
        meet = [[0] * size for _ in range(size)]
        join = [[0] * size for _ in range(size)]
        for a, b in product(range(size), repeat=2):
            meet[a][b] = self._bound(a, b, lower=True)
            join[a][b] = self._bound(a, b, lower=False)
        self.meet_table = tuple(tuple(row) for row in meet)
        self.join_table = tuple(tuple(row) for row in join)
        bot = [x for x in range(size) if all(self.leq[x])]
        top = [x for x in range(size) if all(self.leq[y][x] for y in range(size))]
        if not bot or not top:
            raise AlgebraError("Lattice has no bounds")
        self.bot = bot[0]
        self.top = top[0]

    def _bound(self, a: int, b: int, lower: bool) -> int:
        size = len(self.labels)
        if lower:
            bounds = [x for x in range(size) if self.leq[x][a] and self.leq[x][b]]
            best = [x for x in bounds if all(self.leq[y][x] for y in bounds)]
        else:
            bounds = [x for x in range(size) if self.leq[a][x] and self.leq[b][x]]
            best = [x for x in bounds if all(self.leq[x][y] for y in bounds)]
        if not best:
            kind = "meet" if lower else "join"
            raise AlgebraError(
                f"Not a lattice: {kind} of '{self.labels[a]}' and "
                f"'{self.labels[b]}' missing"
            )
        return best[0]

    def __repr__(self) -> str:
        return f"FiniteLattice({self.name!r}, size={self.size})"

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def elements(self) -> range:
        return range(len(self.labels))

    def le(self, a: int, b: int) -> bool:
        return self.leq[a][b]

    def meet(self, a: int, b: int) -> int:
        return self.meet_table[a][b]

    def join(self, a: int, b: int) -> int:
        return self.join_table[a][b]

    def join_all(self, items: Iterable[int]) -> int:
        result = self.bot
        for item in items:
            result = self.join_table[result][item]
        return result

    def meet_all(self, items: Iterable[int]) -> int:
        result = self.top
        for item in items:
            result = self.meet_table[result][item]
        return result

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise AlgebraError(f"Unknown element '{label}'") from None

    def _covers(self, a: int, below: bool) -> list[int]:
        if below:
            strict = [x for x in self.elements if x != a and self.leq[x][a]]
            return [
                x
                for x in strict
                if not any(y != x and self.leq[x][y] for y in strict)
            ]
        strict = [x for x in self.elements if x != a and self.leq[a][x]]
        return [x for x in strict if not any(y != x and self.leq[y][x] for y in strict)]

    def join_irreducibles(self) -> list[int]:
        """Elements with exactly one lower cover."""
        return [x for x in self.elements if len(self._covers(x, below=True)) == 1]

    def meet_irreducibles(self) -> list[int]:
        """Elements with exactly one upper cover."""
        return [x for x in self.elements if len(self._covers(x, below=False)) == 1]

    @property
    def is_distributive(self) -> bool:
        return all(
            self.meet(a, self.join(b, c)) == self.join(self.meet(a, b), self.meet(a, c))
            for a, b, c in product(self.elements, repeat=3)
        )


def build_lattice(
    elements: Sequence[str], order: Iterable[tuple[str, str]], name: str = ""
) -> FiniteLattice:
    """Build a lattice from cover pairs or any generating order pairs.

    Args:
        elements: Element labels.
        order: Pairs (a, b) meaning a <= b.
        name: Lattice name.

    Returns:
        FiniteLattice.
    """
    labels = [str(x) for x in elements]
    if len(set(labels)) != len(labels):
        raise AlgebraError("Duplicate element labels")
    index = {label: idx for idx, label in enumerate(labels)}
    size = len(labels)
    leq = [[a == b for b in range(size)] for a in range(size)]
    for low, high in order:
        try:
            leq[index[str(low)]][index[str(high)]] = True
        except KeyError as exc:
            raise AlgebraError(f"Unknown element {exc}") from None
    for k, i, j in product(range(size), repeat=3):
        if leq[i][k] and leq[k][j]:
            leq[i][j] = True
    for a, b in combinations(range(size), 2):
        if leq[a][b] and leq[b][a]:
            raise AlgebraError(
                f"Order relation has a cycle through '{labels[a]}' and '{labels[b]}'"
            )
    return FiniteLattice(labels, leq, name)


class FiniteLE:
    """Finite lattice with normal operation tables and their residual tables."""

    __slots__ = ("lattice", "name", "tables")

    def __init__(
        self,
        lattice: FiniteLattice,
        tables: Mapping[Connective, Table] | None = None,
        name: str = "",
    ) -> None:
        self.lattice = lattice
        self.name = name or lattice.name
        self.tables: dict[Connective, Table] = dict(tables or {})

    def __repr__(self) -> str:
        return f"FiniteLE({self.name!r})"

    @property
    def connectives(self) -> tuple[Connective, ...]:
        return tuple(x for x in self.tables if not x.is_residual)

    def operation(self, conn: Connective) -> Table:
        try:
            return self.tables[conn]
        except KeyError:
            raise AlgebraError(f"No table for connective '{conn.name}'") from None

    def describe(self) -> dict[str, object]:
        labels = self.lattice.labels
        return {
            "name": self.name,
            "lattice": self.lattice.name,
            "operations": {
                conn.name: [
                    [*(labels[x] for x in args), labels[value]]
                    for args, value in sorted(self.tables[conn].items())
                ]
                for conn in self.connectives
            },
        }


def check_normality(lattice: FiniteLattice, conn: Connective, table: Table) -> None:
    """Raise NormalityError unless table is normal for the family and order-type.

    F tables preserve finite joins (including the empty join) in every
    coordinate, turned into meets at antitone coordinates. G tables dually.

    Args:
        lattice: Carrier.
        conn: Connective.
        table: Total table.

    Returns:
        None
    """
    is_f = conn.family is Family.F
    out_unit = lattice.bot if is_f else lattice.top
    out_op = lattice.join if is_f else lattice.meet
    for idx, variance in enumerate(conn.order_type):
        joinlike = (variance is Variance.MONO) == is_f
        in_unit = lattice.bot if joinlike else lattice.top
        in_op = lattice.join if joinlike else lattice.meet
        for rest in product(lattice.elements, repeat=conn.arity - 1):

            def at(x: int, rest: tuple[int, ...] = rest, idx: int = idx) -> int:
                return table[(*rest[:idx], x, *rest[idx:])]

            where = ", ".join(lattice.labels[x] for x in rest)
            if at(in_unit) != out_unit:
                raise NormalityError(
                    f"'{conn.name}' is not normal in coordinate {idx + 1}: unit "
                    f"'{lattice.labels[in_unit]}' not mapped to "
                    f"'{lattice.labels[out_unit]}' (other arguments: {where or '-'})"
                )
            for a, b in combinations(lattice.elements, 2):
                if at(in_op(a, b)) != out_op(at(a), at(b)):
                    raise NormalityError(
                        f"'{conn.name}' is not normal in coordinate {idx + 1} at "
                        f"({lattice.labels[a]}, {lattice.labels[b]}) "
                        f"(other arguments: {where or '-'})"
                    )


def residual_table(
    lattice: FiniteLattice, conn: Connective, table: Table, coordinate: int
) -> Table:
    """Table of the residual of conn in one coordinate, by exhaustive adjunction.

    Args:
        lattice: Carrier.
        conn: Base connective.
        table: Normal table of conn.
        coordinate: 1-based coordinate.

    Returns:
        Table of conn.residual(coordinate).
    """
    pos = coordinate - 1
    variance = conn.order_type[pos]
    is_f = conn.family is Family.F
    result: Table = {}
    for args in product(lattice.elements, repeat=conn.arity):
        bound = args[pos]
        images = {c: table[(*args[:pos], c, *args[pos + 1 :])] for c in lattice.elements}
        if is_f:
            cands = [c for c, img in images.items() if lattice.le(img, bound)]
            value = (
                lattice.join_all(cands)
                if variance is Variance.MONO
                else lattice.meet_all(cands)
            )
        else:
            cands = [c for c, img in images.items() if lattice.le(bound, img)]
            value = (
                lattice.meet_all(cands)
                if variance is Variance.MONO
                else lattice.join_all(cands)
            )
        # adjunction holds for normal tables
        for c, img in images.items():
            if is_f:
                lhs = lattice.le(img, bound)
                rhs = (
                    lattice.le(c, value)
                    if variance is Variance.MONO
                    else lattice.le(value, c)
                )
            else:
                lhs = lattice.le(bound, img)
                rhs = (
                    lattice.le(value, c)
                    if variance is Variance.MONO
                    else lattice.le(c, value)
                )
            assert lhs == rhs, f"residual of '{conn.name}' undefined"
        result[args] = value
    return result


def attach_operation(le: FiniteLE, conn: Connective, table: Mapping[tuple[int, ...], int]) -> FiniteLE:
    """New FiniteLE with a normal table for conn and its residual tables.

    Args:
        le: Algebra to extend.
        conn: Base connective.
        table: Total table keyed by argument tuples.

    Returns:
        Extended FiniteLE.
    """
    if conn.is_residual:
        raise AlgebraError(f"Residual '{conn.name}' tables are computed, not attached")
    lattice = le.lattice
    full: Table = {}
    for args in product(lattice.elements, repeat=conn.arity):
        if args not in table:
            raise AlgebraError(f"Table of '{conn.name}' is not total")
        if table[args] not in lattice.elements:
            raise AlgebraError(f"Table of '{conn.name}' has an invalid value")
        full[args] = table[args]
    check_normality(lattice, conn, full)
    tables = {**le.tables, conn: full}
    for coordinate in range(1, conn.arity + 1):
        tables[conn.residual(coordinate)] = residual_table(
            lattice, conn, full, coordinate
        )
    return FiniteLE(lattice, tables, le.name)


def tabulate(lattice: FiniteLattice, arity: int, fn: Callable[..., int]) -> Table:
    """Table of a function over the lattice elements."""
    return {args: fn(*args) for args in product(lattice.elements, repeat=arity)}


def least_fixed_point(
    fn: Callable[[int], int], lattice: FiniteLattice, strict: bool = False
) -> int:
    """Kleene iteration from bottom, bounded by the number of elements.

    Args:
        fn: Monotone endofunction.
        lattice: Carrier.
        strict: Cross-check against the meet of all pre-fixed points.

    Returns:
        Least fixed point.
    """
    value = lattice.bot
    for _ in range(lattice.size + 1):
        nxt = fn(value)
        if nxt == value:
            break
        value = nxt
    else:
        raise AssertionError("fixed point iteration exceeded the element count")
    if strict:
        prefixed = lattice.meet_all(x for x in lattice.elements if lattice.le(fn(x), x))
        if prefixed != value:
            raise AlgebraError("Iteration disagrees with the meet of pre-fixed points")
    return value


def greatest_fixed_point(
    fn: Callable[[int], int], lattice: FiniteLattice, strict: bool = False
) -> int:
    """Dual of least_fixed_point, iterating down from top."""
    value = lattice.top
    for _ in range(lattice.size + 1):
        nxt = fn(value)
        if nxt == value:
            break
        value = nxt
    else:
        raise AssertionError("fixed point iteration exceeded the element count")
    if strict:
        postfixed = lattice.join_all(x for x in lattice.elements if lattice.le(x, fn(x)))
        if postfixed != value:
            raise AlgebraError("Iteration disagrees with the join of post-fixed points")
    return value


_MISSING = object()


def compile_term(t: Term, le: FiniteLE, strict: bool = False) -> Callable[[Env], int]:
    """Compile t into a function of an environment.

    Args:
        t: Term over the algebra's signature, residuals allowed.
        le: Algebra.
        strict: Cross-check every fixed point against pre/post-fixed points.

    Returns:
        Evaluation function. The environment maps atoms (Prop, Nominal,
        CoNominal, FVar) to elements; it is used as scratch space for bound
        variables and restored afterwards.
    """
    lattice = le.lattice
    if isinstance(t, Bottom):
        return lambda env: lattice.bot
    if isinstance(t, Top):
        return lambda env: lattice.top
    if isinstance(t, (Prop, Nominal, CoNominal, FVar)):
        key = t

        def lookup(env: Env) -> int:
            try:
                return env[key]
            except KeyError:
                raise AlgebraError(f"Unbound symbol '{key}'") from None

        return lookup
    if isinstance(t, (Meet, Join)):
        left = compile_term(t.left, le, strict)
        right = compile_term(t.right, le, strict)
        op = lattice.meet_table if isinstance(t, Meet) else lattice.join_table
        return lambda env: op[left(env)][right(env)]
    if isinstance(t, App):
        table = le.operation(t.connective)
        args = tuple(compile_term(x, le, strict) for x in t.args)
        return lambda env: table[tuple(arg(env) for arg in args)]
    if isinstance(t, Binder):
        body = compile_term(t.body, le, strict)
        var = FVar(t.var)
        solve = least_fixed_point if t.kind.least else greatest_fixed_point

        def fixed_point(env: Env) -> int:
            saved = env.get(var, _MISSING)

            def step(value: int) -> int:
                env[var] = value
                return body(env)

            try:
                return solve(step, lattice, strict)
            finally:
                if saved is _MISSING:
                    env.pop(var, None)
                else:
                    env[var] = saved  # type: ignore[assignment]

        return fixed_point
    raise TypeError(f"Cannot evaluate {t!r}")


def evaluate(
    t: Term, le: FiniteLE, v: Mapping[Term, int], strict: bool = False
) -> int:
    """Value of t under assignment v."""
    return compile_term(t, le, strict)(dict(v))


class Quantify(Enum):
    LETTERS = "letters"
    ALL = "all"


@dataclass(frozen=True)
class Validity:
    """Outcome of a validity check, with the first counterexample found."""

    valid: bool
    counterexample: dict[str, str] | None = None

    def __bool__(self) -> bool:
        return self.valid


def symbols(obj: Syntax) -> tuple[Term, ...]:
    """Free atoms of obj: letters, then nominals, then co-nominals."""
    found: list[Term] = [Prop(x) for x in letters(obj)]
    found.extend(Nominal(x) for x in sorted(nominals(obj)))
    found.extend(CoNominal(x) for x in sorted(conominals(obj)))
    return tuple(found)


def _assignments(lattice: FiniteLattice, atoms: Sequence[Term]):  # type: ignore[no-untyped-def]
    for values in product(lattice.elements, repeat=len(atoms)):
        yield dict(zip(atoms, values))


def _describe(lattice: FiniteLattice, env: Env) -> dict[str, str]:
    from .grammar import render  # pylint: disable=import-outside-toplevel

    return {render(key): lattice.labels[value] for key, value in env.items()}


def check_inequality(
    le: FiniteLE, ineq: Inequality, quantify: Quantify = Quantify.ALL
) -> Validity:
    """Exhaustive validity check of an inequality.

    Args:
        le: Algebra.
        ineq: Inequality.
        quantify: Quantify over letters only, or also over nominals and
            co-nominals.

    Returns:
        Validity with the first counterexample on failure.
    """
    atoms = symbols(ineq)
    if quantify is Quantify.LETTERS:
        atoms = tuple(x for x in atoms if isinstance(x, Prop))
    lhs = compile_term(ineq.lhs, le)
    rhs = compile_term(ineq.rhs, le)
    lattice = le.lattice
    for env in _assignments(lattice, atoms):
        if not lattice.le(lhs(env), rhs(env)):
            return Validity(False, _describe(lattice, env))
    return Validity(True)


def check_quasi(le: FiniteLE, q: QuasiInequality) -> Validity:
    """Exhaustive validity check of a quasi-inequality.

    Args:
        le: Algebra.
        q: Quasi-inequality.

    Returns:
        Validity with the first counterexample on failure.
    """
    lattice = le.lattice
    antecedents = [
        (compile_term(x.lhs, le), compile_term(x.rhs, le)) for x in q.antecedents
    ]
    lhs = compile_term(q.consequent.lhs, le)
    rhs = compile_term(q.consequent.rhs, le)
    for env in _assignments(lattice, symbols(q)):
        if all(lattice.le(a(env), b(env)) for a, b in antecedents) and not lattice.le(
            lhs(env), rhs(env)
        ):
            return Validity(False, _describe(lattice, env))
    return Validity(True)


def check_targeted_preservation(
    le: FiniteLE, body: Term, profile: Sequence[tuple[Term, Variance]]
) -> bool:
    """Does the term function of body preserve joins in the profiled coordinates?

    On a finite algebra every join is targeted, so the empty join and every
    binary join of argument tuples are tested jointly. Antitone coordinates
    use meets.

    Args:
        le: Algebra.
        body: Term whose free atoms are all profiled.
        profile: Coordinates (atom and variance).

    Returns:
        True if joins are preserved.
    """
    atoms = tuple(atom for atom, _ in profile)
    free = set(symbols(body)) | {FVar(x) for x in free_fixpoint_variables(body)}
    if not free <= set(atoms):
        raise AlgebraError("Body has free symbols outside the coordinate profile")
    lattice = le.lattice
    fn = compile_term(body, le)

    def value(args: tuple[int, ...]) -> int:
        return fn(dict(zip(atoms, args)))

    def combine(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(
            lattice.join(x, y) if variance is Variance.MONO else lattice.meet(x, y)
            for (x, y, (_, variance)) in zip(a, b, profile)
        )

    empty = tuple(
        lattice.bot if variance is Variance.MONO else lattice.top
        for _, variance in profile
    )
    if value(empty) != lattice.bot:
        return False
    tuples = list(product(lattice.elements, repeat=len(atoms)))
    return all(
        value(combine(a, b)) == lattice.join(value(a), value(b))
        for a, b in combinations(tuples, 2)
    )


def check_monotone(le: FiniteLE, conn: Connective) -> bool:
    """Order-preserving at monotone coordinates, order-reversing at antitone ones."""
    lattice = le.lattice
    table = le.operation(conn)
    for args in product(lattice.elements, repeat=conn.arity):
        for idx, variance in enumerate(conn.order_type):
            for bigger in lattice.elements:
                if not lattice.le(args[idx], bigger):
                    continue
                other = table[(*args[:idx], bigger, *args[idx + 1 :])]
                if variance is Variance.MONO and not lattice.le(table[args], other):
                    return False
                if variance is Variance.ANTI and not lattice.le(other, table[args]):
                    return False
    return True


def uses_only(le: FiniteLE, t: Term) -> bool:
    """True if every connective in t has a table in le."""
    return all(
        sub.connective in le.tables
        for _, sub in iter_subterms(t)
        if isinstance(sub, App)
    )


def is_distributive(lattice: FiniteLattice) -> bool:
    return lattice.is_distributive
