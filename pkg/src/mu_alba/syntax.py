# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""Signatures, terms and the operations shared by every other module."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import count
from logging import getLogger
from re import match
from typing import TYPE_CHECKING, Union

from .common import SignatureError, TermError

if TYPE_CHECKING:
    from collections.abc import Collection, Iterable, Iterator

LOG = getLogger(__name__)

Path = tuple[int, ...]


class Variance(Enum):
    """Coordinate variance of an order-type entry."""

    MONO = "1"
    ANTI = "d"

    @property
    def opposite(self) -> Variance:
        return Variance.ANTI if self is Variance.MONO else Variance.MONO

    def compose(self, other: Variance) -> Variance:
        return Variance.MONO if self is other else Variance.ANTI


class Sign(Enum):
    """Node sign in a signed generation tree."""

    PLUS = "+"
    MINUS = "-"

    def flip(self) -> Sign:
        return Sign.MINUS if self is Sign.PLUS else Sign.PLUS

    def apply(self, variance: Variance) -> Sign:
        return self if variance is Variance.MONO else self.flip()


class Family(Enum):
    """Connective families."""

    F = "F"
    G = "G"


class Positivity(Enum):
    """Polarity of a variable in a term."""

    POSITIVE = "positive"
    NEGATIVE = "negative"
    BOTH = "both"
    NEITHER = "neither"


class BinderKind(Enum):
    """Fixed point binders."""

    MU = "mu"
    NU = "nu"
    MU2 = "mu2"
    NU2 = "nu2"
    MU_STAR = "mu*"
    NU_STAR = "nu*"

    @property
    def least(self) -> bool:
        return self in (BinderKind.MU, BinderKind.MU2, BinderKind.MU_STAR)

    @property
    def starred(self) -> BinderKind:
        return BinderKind.MU_STAR if self.least else BinderKind.NU_STAR


@dataclass(frozen=True)
class OrderType:
    """Sequence of coordinate variances."""

    entries: tuple[Variance, ...] = ()

    @classmethod
    def parse(cls, text: str) -> OrderType:
        """Parse an order-type such as '(1,d)', '1d' or '()'.

        Args:
            text: Order-type text.

        Returns:
            OrderType.
        """
        cleaned = text.strip().strip("()").replace(",", "").replace(" ", "")
        cleaned = cleaned.replace("∂", "d")
        if not match(r"^[1d]*$", cleaned):
            raise SignatureError(f"Invalid order-type '{text}'")
        return cls(tuple(Variance(x) for x in cleaned))

    def opposite(self) -> OrderType:
        return OrderType(tuple(x.opposite for x in self.entries))

    def __getitem__(self, index: int) -> Variance:
        return self.entries[index]

    def __iter__(self) -> Iterator[Variance]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __str__(self) -> str:
        return f"({','.join(x.value for x in self.entries)})"


@dataclass(frozen=True)
class Connective:
    """Connective of a signature. Residuals record their parent and coordinate."""

    name: str
    family: Family
    order_type: OrderType
    parent: str | None = None
    coordinate: int | None = None

    @property
    def arity(self) -> int:
        return len(self.order_type)

    @property
    def is_residual(self) -> bool:
        return self.parent is not None

    def residual(self, coordinate: int) -> Connective:
        """Residual (or Galois adjoint) of a base connective in one coordinate.

        Args:
            coordinate: 1-based coordinate.

        Returns:
            The residual connective.
        """
        if self.is_residual:
            raise SignatureError(f"'{self.name}' is already a residual")
        if not 1 <= coordinate <= self.arity:
            raise SignatureError(
                f"'{self.name}' has no coordinate {coordinate} (arity {self.arity})"
            )
        variance = self.order_type[coordinate - 1]
        entries = tuple(
            variance
            if idx == coordinate - 1
            else (entry.opposite if variance is Variance.MONO else entry)
            for idx, entry in enumerate(self.order_type)
        )
        if self.family is Family.F:
            name = f"{self.name}#{coordinate}"
            family = Family.G if variance is Variance.MONO else Family.F
        else:
            name = f"{self.name}b{coordinate}"
            family = Family.F if variance is Variance.MONO else Family.G
        return Connective(name, family, OrderType(entries), self.name, coordinate)

    def origin(self) -> Connective:
        """Base connective a residual was computed from."""
        if self.parent is None or self.coordinate is None:
            raise SignatureError(f"'{self.name}' is not a residual")
        variance = self.order_type[self.coordinate - 1]
        entries = tuple(
            variance
            if idx == self.coordinate - 1
            else (entry.opposite if variance is Variance.MONO else entry)
            for idx, entry in enumerate(self.order_type)
        )
        family = Family.F if self.name[len(self.parent)] == "#" else Family.G
        return Connective(self.parent, family, OrderType(entries))


@dataclass(frozen=True)
class Signature:
    """Base connectives, plus their residuals once tense expanded."""

    base_f: tuple[Connective, ...] = ()
    base_g: tuple[Connective, ...] = ()
    residuals: tuple[Connective, ...] = ()
    tense: bool = False

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for conn in self.connectives:
            if conn.name in seen:
                raise SignatureError(f"Duplicate connective name '{conn.name}'")
            seen.add(conn.name)

    @property
    def base(self) -> tuple[Connective, ...]:
        return self.base_f + self.base_g

    @property
    def connectives(self) -> tuple[Connective, ...]:
        return self.base_f + self.base_g + self.residuals

    def lookup(self, name: str) -> Connective:
        """Find a connective by name. Residual names resolve even before expansion.

        Args:
            name: Connective name, e.g. 'f', 'f#1' or 'gb2'.

        Returns:
            Connective.
        """
        for conn in self.connectives:
            if conn.name == name:
                return conn
        found = match(r"^(?P<parent>.+?)(?P<kind>#|b)(?P<idx>[0-9]+)$", name)
        if found:
            family = Family.F if found.group("kind") == "#" else Family.G
            for conn in self.base:
                if conn.name == found.group("parent") and conn.family is family:
                    return conn.residual(int(found.group("idx")))
        raise SignatureError(f"Unknown connective '{name}'")


def declare_signature(
    declarations: Iterable[tuple[str, Family | str, int, OrderType | str]],
) -> Signature:
    """Build a Signature from (name, family, arity, order_type) declarations.

    Args:
        declarations: Connective declarations.

    Returns:
        Signature containing base connectives only.
    """
    base_f: list[Connective] = []
    base_g: list[Connective] = []
    for name, family, arity, order_type in declarations:
        if not match(r"^[a-z][A-Za-z0-9_]*$", name):
            raise SignatureError(f"Invalid connective name '{name}'")
        if isinstance(order_type, str):
            order_type = OrderType.parse(order_type)
        if len(order_type) != arity:
            raise SignatureError(
                f"Order-type {order_type} of '{name}' does not match arity {arity}"
            )
        conn = Connective(name, Family(family), order_type)
        (base_f if conn.family is Family.F else base_g).append(conn)
    return Signature(tuple(base_f), tuple(base_g))


def default_signature() -> Signature:
    """Unary f in F and unary g in G, both monotone."""
    return declare_signature([("f", Family.F, 1, "1"), ("g", Family.G, 1, "1")])


def expand_tense(sig: Signature) -> Signature:
    """Add one residual per coordinate of every base connective.

    Args:
        sig: Signature without residuals.

    Returns:
        Tense expanded Signature.
    """
    if sig.tense or sig.residuals:
        raise SignatureError("Signature is already tense expanded")
    residuals = tuple(
        conn.residual(idx) for conn in sig.base for idx in range(1, conn.arity + 1)
    )
    LOG.debug("tense expansion added %d residual(s)", len(residuals))
    return Signature(sig.base_f, sig.base_g, residuals, tense=True)


class Term:
    """Base class of terms."""

    @property
    def children(self) -> tuple[Term, ...]:
        return ()

    def rebuild(self, children: tuple[Term, ...]) -> Term:
        assert not children
        return self

    def __str__(self) -> str:
        from .grammar import render  # pylint: disable=import-outside-toplevel

        return render(self)


@dataclass(frozen=True)
class Bottom(Term):
    pass


@dataclass(frozen=True)
class Top(Term):
    pass


@dataclass(frozen=True)
class Prop(Term):
    name: str


@dataclass(frozen=True)
class FVar(Term):
    name: str


@dataclass(frozen=True)
class Nominal(Term):
    index: int


@dataclass(frozen=True)
class CoNominal(Term):
    index: int


@dataclass(frozen=True)
class Meet(Term):
    left: Term
    right: Term

    @property
    def children(self) -> tuple[Term, ...]:
        return (self.left, self.right)

    def rebuild(self, children: tuple[Term, ...]) -> Term:
        return Meet(*children)


@dataclass(frozen=True)
class Join(Term):
    left: Term
    right: Term

    @property
    def children(self) -> tuple[Term, ...]:
        return (self.left, self.right)

    def rebuild(self, children: tuple[Term, ...]) -> Term:
        return Join(*children)


@dataclass(frozen=True)
class App(Term):
    connective: Connective
    args: tuple[Term, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) != self.connective.arity:
            raise TermError(
                f"'{self.connective.name}' expects {self.connective.arity} "
                f"argument(s), got {len(self.args)}"
            )

    @property
    def children(self) -> tuple[Term, ...]:
        return self.args

    def rebuild(self, children: tuple[Term, ...]) -> Term:
        return App(self.connective, children)


@dataclass(frozen=True)
class Binder(Term):
    kind: BinderKind
    var: str
    body: Term

    def __post_init__(self) -> None:
        if positivity(self.body, FVar(self.var)) not in (
            Positivity.POSITIVE,
            Positivity.BOTH,
        ):
            raise TermError(
                f"Body of '{self.kind.value} {self.var}' is not positive in {self.var}"
            )

    @property
    def children(self) -> tuple[Term, ...]:
        return (self.body,)

    def rebuild(self, children: tuple[Term, ...]) -> Term:
        return Binder(self.kind, self.var, children[0])


@dataclass(frozen=True)
class Inequality:
    lhs: Term
    rhs: Term

    @property
    def sides(self) -> tuple[Term, Term]:
        return (self.lhs, self.rhs)

    def __str__(self) -> str:
        from .grammar import render  # pylint: disable=import-outside-toplevel

        return render(self)


@dataclass(frozen=True)
class QuasiInequality:
    antecedents: tuple[Inequality, ...]
    consequent: Inequality

    def __post_init__(self) -> None:
        object.__setattr__(self, "antecedents", tuple(self.antecedents))

    def __str__(self) -> str:
        from .grammar import render  # pylint: disable=import-outside-toplevel

        return render(self)


Syntax = Union[Term, Inequality, QuasiInequality]


class Language(Enum):
    """Term languages."""

    L = "L"
    L1 = "L1"
    L2 = "L2"
    LSTAR = "L*"
    L_PLUS = "L+"
    L1_PLUS = "L1+"
    L2_PLUS = "L2+"
    LSTAR_PLUS = "L*+"


_LANGUAGE_BINDERS = {
    "L": frozenset(),
    "L1": frozenset({BinderKind.MU, BinderKind.NU}),
    "L2": frozenset({BinderKind.MU2, BinderKind.NU2}),
    "L*": frozenset({BinderKind.MU_STAR, BinderKind.NU_STAR}),
}


def terms_of(obj: Syntax) -> tuple[Term, ...]:
    """Top level terms of a term, inequality or quasi-inequality in print order."""
    if isinstance(obj, Term):
        return (obj,)
    if isinstance(obj, Inequality):
        return obj.sides
    parts: list[Term] = []
    for ineq in (*obj.antecedents, obj.consequent):
        parts.extend(ineq.sides)
    return tuple(parts)


def iter_subterms(t: Term, path: Path = ()) -> Iterator[tuple[Path, Term]]:
    """Pre-order walk yielding (path, subterm) pairs.

    Args:
        t: Term to walk.
        path: Path of t.

    Yields:
        Positions and subterms, left to right.
    """
    yield path, t
    for idx, child in enumerate(t.children):
        yield from iter_subterms(child, (*path, idx))


def subterm_at(t: Term, path: Path) -> Term:
    for idx in path:
        children = t.children
        if not 0 <= idx < len(children):
            raise TermError(f"Invalid position {path}")
        t = children[idx]
    return t


def replace_at(t: Term, path: Path, s: Term) -> Term:
    if not path:
        return s
    children = list(t.children)
    if not 0 <= path[0] < len(children):
        raise TermError(f"Invalid position {path}")
    children[path[0]] = replace_at(children[path[0]], path[1:], s)
    return t.rebuild(tuple(children))


def child_signs(t: Term, sign: Sign) -> tuple[Sign, ...]:
    """Signs assigned to the children of t when t is signed 'sign'."""
    if isinstance(t, App):
        return tuple(sign.apply(x) for x in t.connective.order_type)
    return tuple(sign for _ in t.children)


def occurrence_signs(t: Term, atom: Term, sign: Sign = Sign.PLUS) -> Iterator[Sign]:
    """Signs of the free occurrences of atom in the signed tree of t.

    Args:
        t: Term to search.
        atom: Prop, FVar, Nominal or CoNominal.
        sign: Sign of the root of t.

    Yields:
        Sign of every free occurrence.
    """
    if t == atom:
        yield sign
        return
    if isinstance(t, Binder) and isinstance(atom, FVar) and t.var == atom.name:
        return
    for child, child_sign in zip(t.children, child_signs(t, sign)):
        yield from occurrence_signs(child, atom, child_sign)


def positivity(t: Term, v: Term) -> Positivity:
    """Polarity of v in t.

    Args:
        t: Term.
        v: Variable (Prop or FVar) or other atom.

    Returns:
        BOTH if v does not occur, POSITIVE (NEGATIVE) if every occurrence is
        signed + (-) in +t, NEITHER otherwise.
    """
    signs = set(occurrence_signs(t, v))
    if not signs:
        return Positivity.BOTH
    if signs == {Sign.PLUS}:
        return Positivity.POSITIVE
    if signs == {Sign.MINUS}:
        return Positivity.NEGATIVE
    return Positivity.NEITHER


def letters(obj: Syntax) -> tuple[str, ...]:
    """Proposition letters in order of first occurrence in print form."""
    found: dict[str, None] = {}
    for part in terms_of(obj):
        for _, sub in iter_subterms(part):
            if isinstance(sub, Prop):
                found.setdefault(sub.name)
    return tuple(found)


def nominals(obj: Syntax) -> frozenset[int]:
    return frozenset(
        sub.index
        for part in terms_of(obj)
        for _, sub in iter_subterms(part)
        if isinstance(sub, Nominal)
    )


def conominals(obj: Syntax) -> frozenset[int]:
    return frozenset(
        sub.index
        for part in terms_of(obj)
        for _, sub in iter_subterms(part)
        if isinstance(sub, CoNominal)
    )


def free_fixpoint_variables(t: Term) -> frozenset[str]:
    if isinstance(t, FVar):
        return frozenset((t.name,))
    if isinstance(t, Binder):
        return free_fixpoint_variables(t.body) - {t.var}
    found: frozenset[str] = frozenset()
    for child in t.children:
        found |= free_fixpoint_variables(child)
    return found


def fixpoint_names(t: Term) -> frozenset[str]:
    """All fixed point variable names, free or bound."""
    return frozenset(
        sub.var if isinstance(sub, Binder) else sub.name
        for _, sub in iter_subterms(t)
        if isinstance(sub, (Binder, FVar))
    )


def binder_paths(t: Term) -> tuple[Path, ...]:
    return tuple(path for path, sub in iter_subterms(t) if isinstance(sub, Binder))


def is_sentence(t: Term) -> bool:
    """True iff every fixed point variable occurrence is bound."""
    return not free_fixpoint_variables(t)


def term_depth(t: Term) -> int:
    return 1 + max((term_depth(x) for x in t.children), default=0)


def in_language(obj: Syntax, language: Language) -> bool:
    """Language membership.

    Args:
        obj: Term, inequality or quasi-inequality.
        language: Language to test.

    Returns:
        True if every term of obj belongs to the language.
    """
    extended = language.value.endswith("+")
    allowed = _LANGUAGE_BINDERS[language.value.rstrip("+")]
    for part in terms_of(obj):
        for _, sub in iter_subterms(part):
            if isinstance(sub, Binder) and sub.kind not in allowed:
                return False
            if not extended:
                if isinstance(sub, (Nominal, CoNominal)):
                    return False
                if isinstance(sub, App) and sub.connective.is_residual:
                    return False
    return True


class FreshNames:
    """Per-derivation counter for fresh fixed point variable names."""

    __slots__ = ("_counter", "prefix")

    def __init__(self, prefix: str = "X") -> None:
        self._counter = count(1)
        self.prefix = prefix

    def fresh(self, avoid: Collection[str]) -> str:
        """Next name with this prefix not in avoid.

        Args:
            avoid: Names that are in use.

        Returns:
            Fresh name.
        """
        for idx in self._counter:
            name = f"{self.prefix}{idx}"
            if name not in avoid:
                LOG.debug("fresh fixed point variable '%s'", name)
                return name
        raise AssertionError("unreachable")  # pragma: no cover


def _occurs_free(t: Term, v: Term) -> bool:
    if isinstance(v, FVar):
        return v.name in free_fixpoint_variables(t)
    return any(sub == v for _, sub in iter_subterms(t))


def substitute(
    t: Term, v: Term, s: Term, fresh: FreshNames | None = None
) -> Term:
    """Capture-avoiding replacement of the free occurrences of v by s.

    Args:
        t: Term to rewrite.
        v: Variable or atom to replace.
        s: Replacement.
        fresh: Name source used when a bound variable must be renamed.

    Returns:
        Rewritten term.
    """
    if not _occurs_free(t, v):
        return t
    names = fresh or FreshNames()
    s_free = free_fixpoint_variables(s)

    def walk(node: Term) -> Term:
        if node == v:
            return s
        if not _occurs_free(node, v):
            return node
        if isinstance(node, Binder):
            if node.var in s_free:
                new_var = names.fresh(
                    s_free | fixpoint_names(node.body) | fixpoint_names(s)
                )
                renamed = substitute(node.body, FVar(node.var), FVar(new_var))
                return Binder(node.kind, new_var, walk(renamed))
            return Binder(node.kind, node.var, walk(node.body))
        return node.rebuild(tuple(walk(child) for child in node.children))

    return walk(t)


def star_translation(obj: Syntax) -> Syntax:
    """Replace every mu (nu) binder, including mu2 (nu2), by mu* (nu*).

    Args:
        obj: Term, inequality or quasi-inequality.

    Returns:
        Translated object of the same kind.
    """
    if isinstance(obj, Inequality):
        return Inequality(_star(obj.lhs), _star(obj.rhs))
    if isinstance(obj, QuasiInequality):
        return QuasiInequality(
            tuple(Inequality(_star(x.lhs), _star(x.rhs)) for x in obj.antecedents),
            Inequality(_star(obj.consequent.lhs), _star(obj.consequent.rhs)),
        )
    return _star(obj)


def _star(t: Term) -> Term:
    if isinstance(t, Binder):
        return Binder(t.kind.starred, t.var, _star(t.body))
    if not t.children:
        return t
    return t.rebuild(tuple(_star(x) for x in t.children))


def join_all(terms: Iterable[Term]) -> Term:
    """Left folded join, bottom when empty."""
    result: Term | None = None
    for t in terms:
        result = t if result is None else Join(result, t)
    return Bottom() if result is None else result


def meet_all(terms: Iterable[Term]) -> Term:
    """Left folded meet, top when empty."""
    result: Term | None = None
    for t in terms:
        result = t if result is None else Meet(result, t)
    return Top() if result is None else result
