# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""Concrete syntax: parsing and printing of terms, inequalities and signatures."""

from __future__ import annotations

from logging import getLogger
from re import match
from typing import TYPE_CHECKING

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from .common import AlbaError, ParseError, SignatureError
from .syntax import (
    App,
    Binder,
    BinderKind,
    Bottom,
    CoNominal,
    FVar,
    Inequality,
    Join,
    Meet,
    Nominal,
    Prop,
    QuasiInequality,
    Term,
    Top,
    declare_signature,
)

if TYPE_CHECKING:
    from pathlib import Path

    from .syntax import Signature, Syntax

LOG = getLogger(__name__)

GRAMMAR = r"""
    ?any:       quasi | ineq | term
    quasi:      "=>" ineq
              | ineq ("&" ineq)* "=>" ineq
    ineq:       term "<=" term
    ?term:      binder | join
    binder:     KIND FPVAR "." term
    ?join:      meet | join "\\/" meet
    ?meet:      atom | meet "/\\" atom
    ?atom:      "bot"                           -> bottom
              | "top"                           -> top
              | NOMINAL                         -> nominal
              | CONOMINAL                       -> conominal
              | FPVAR                           -> fpvar
              | NAME                            -> prop
              | NAME "(" ")"                    -> app
              | NAME "(" term ("," term)* ")"   -> app
              | "(" term ")"

    KIND:       /(mu|nu)(\*|2)?(?![A-Za-z0-9_#])/
    NOMINAL:    /j[0-9]+(?![A-Za-z0-9_#])/
    CONOMINAL:  /m[0-9]+(?![A-Za-z0-9_#])/
    NAME:       /(?!(mu|nu)(\*|2)?(?![A-Za-z0-9_#]))(?![jm][0-9]+(?![A-Za-z0-9_#]))(?!(bot|top)(?![A-Za-z0-9_#]))[a-z][A-Za-z0-9_]*(#[0-9]+)?/
    FPVAR:      /[A-Z][A-Za-z0-9_]*/

    %import common.WS
    %ignore WS
"""

PARSER = Lark(GRAMMAR, parser="lalr", start=["any", "term", "ineq", "quasi"])
SIGNATURE_LINE = (
    r"^connective\s+(?P<name>[a-z][A-Za-z0-9_]*)\s*:\s*(?P<family>[FG])\s*/"
    r"\s*(?P<arity>[0-9]+)\s*/\s*(?P<order>\([1d,\s]*\))\s*;?$"
)


class _Builder(Transformer):  # type: ignore[type-arg]
    """Build terms over a signature from a parse tree."""

    def __init__(self, sig: Signature) -> None:
        super().__init__()
        self._sig = sig

    def bottom(self, _: list[Token]) -> Term:
        return Bottom()

    def top(self, _: list[Token]) -> Term:
        return Top()

    @v_args(inline=True)
    def nominal(self, token: Token) -> Term:
        return Nominal(int(token[1:]))

    @v_args(inline=True)
    def conominal(self, token: Token) -> Term:
        return CoNominal(int(token[1:]))

    @v_args(inline=True)
    def fpvar(self, token: Token) -> Term:
        return FVar(str(token))

    @v_args(inline=True)
    def prop(self, token: Token) -> Term:
        if "#" in token:
            raise ParseError(
                f"'{token}' is not a proposition letter", token.line, token.column
            )
        return Prop(str(token))

    @v_args(inline=True)
    def app(self, token: Token, *args: Term) -> Term:
        try:
            conn = self._sig.lookup(str(token))
        except SignatureError as exc:
            raise ParseError(str(exc), token.line, token.column) from None
        if len(args) != conn.arity:
            raise ParseError(
                f"'{conn.name}' expects {conn.arity} argument(s), got {len(args)}",
                token.line,
                token.column,
            )
        return App(conn, args)

    @v_args(inline=True)
    def binder(self, kind: Token, var: Token, body: Term) -> Term:
        return Binder(BinderKind(str(kind)), str(var), body)

    @v_args(inline=True)
    def join(self, left: Term, right: Term) -> Term:
        return Join(left, right)

    @v_args(inline=True)
    def meet(self, left: Term, right: Term) -> Term:
        return Meet(left, right)

    @v_args(inline=True)
    def ineq(self, lhs: Term, rhs: Term) -> Inequality:
        return Inequality(lhs, rhs)

    def quasi(self, items: list[Inequality]) -> QuasiInequality:
        return QuasiInequality(tuple(items[:-1]), items[-1])


def parse(text: str, sig: Signature, start: str = "any") -> Syntax:
    """Parse a term, inequality or quasi-inequality.

    Args:
        text: Concrete syntax.
        sig: Signature providing the connectives.
        start: One of 'any', 'term', 'ineq' or 'quasi'.

    Returns:
        Parsed object.
    """
    try:
        tree = PARSER.parse(text, start=start)
    except UnexpectedInput as exc:
        raise ParseError(
            "Syntax error", exc.line, exc.column, exc.get_context(text)
        ) from None
    try:
        result: Syntax = _Builder(sig).transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, AlbaError):
            if isinstance(exc.orig_exc, ParseError):
                raise exc.orig_exc from None
            raise ParseError(str(exc.orig_exc)) from None
        raise
    LOG.debug("parsed '%s'", text)
    return result


def parse_term(text: str, sig: Signature) -> Term:
    result = parse(text, sig, start="term")
    assert isinstance(result, Term)
    return result


def parse_inequality(text: str, sig: Signature) -> Inequality:
    result = parse(text, sig, start="ineq")
    assert isinstance(result, Inequality)
    return result


def parse_quasi(text: str, sig: Signature) -> QuasiInequality:
    result = parse(text, sig, start="quasi")
    assert isinstance(result, QuasiInequality)
    return result


def _operand(t: Term) -> str:
    text = render(t)
    return f"({text})" if isinstance(t, Binder) else text


def render(obj: Syntax) -> str:
    """Print a term, inequality or quasi-inequality in concrete syntax.

    Args:
        obj: Object to print.

    Returns:
        Text that parses back to obj.
    """
    if isinstance(obj, QuasiInequality):
        head = " & ".join(render(x) for x in obj.antecedents)
        return f"{head} => {render(obj.consequent)}".lstrip()
    if isinstance(obj, Inequality):
        return f"{render(obj.lhs)} <= {render(obj.rhs)}"
    if isinstance(obj, Bottom):
        return "bot"
    if isinstance(obj, Top):
        return "top"
    if isinstance(obj, (Prop, FVar)):
        return obj.name
    if isinstance(obj, Nominal):
        return f"j{obj.index}"
    if isinstance(obj, CoNominal):
        return f"m{obj.index}"
    if isinstance(obj, Meet):
        return f"({_operand(obj.left)} /\\ {_operand(obj.right)})"
    if isinstance(obj, Join):
        return f"({_operand(obj.left)} \\/ {_operand(obj.right)})"
    if isinstance(obj, App):
        return f"{obj.connective.name}({', '.join(render(x) for x in obj.args)})"
    if isinstance(obj, Binder):
        return f"{obj.kind.value} {obj.var}. {render(obj.body)}"
    raise TypeError(f"Cannot render {obj!r}")


def parse_signature(text: str) -> Signature:
    """Parse a signature file.

    Args:
        text: Lines of the form 'connective f : F / 1 / (1);'.

    Returns:
        Signature with base connectives.
    """
    declarations = []
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        found = match(SIGNATURE_LINE, line)
        if not found:
            raise SignatureError(f"Invalid signature declaration on line {number}")
        declarations.append(
            (
                found.group("name"),
                found.group("family"),
                int(found.group("arity")),
                found.group("order"),
            )
        )
    return declare_signature(declarations)


def load_signature(path: Path) -> Signature:
    LOG.debug("loading signature '%s'", path)
    try:
        return parse_signature(path.read_text())
    except (OSError, UnicodeDecodeError) as exc:
        raise SignatureError(f"Cannot read signature file '{path}'") from exc
