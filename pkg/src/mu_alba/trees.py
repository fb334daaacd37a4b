# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""Signed generation trees: every subterm position with its sign."""

from __future__ import annotations

from typing import TYPE_CHECKING

from .syntax import App, Binder, FVar, Prop, Sign, child_signs

if TYPE_CHECKING:
    from collections.abc import Iterator

    from .syntax import Path, Term

Branch = tuple["SignedNode", ...]


class SignedNode:
    """Node of a signed generation tree."""

    __slots__ = ("binder", "children", "flags", "parent", "path", "sign", "term")

    def __init__(
        self,
        sign: Sign,
        term: Term,
        path: Path,
        parent: SignedNode | None = None,
        binder: SignedNode | None = None,
    ) -> None:
        self.sign = sign
        self.term = term
        self.path = path
        self.parent = parent
        # binding node of a bound fixed point variable leaf
        self.binder = binder
        self.children: list[SignedNode] = []
        # node class flags, filled by the classifier
        self.flags: frozenset[object] = frozenset()

    def __repr__(self) -> str:
        return f"SignedNode({self.sign.value}{self.constructor}, path={self.path})"

    @property
    def constructor(self) -> str:
        """Short description of the term constructor, e.g. 'join' or 'app:f'."""
        term = self.term
        if isinstance(term, App):
            return f"app:{term.connective.name}"
        if isinstance(term, Binder):
            return term.kind.value
        if isinstance(term, Prop):
            return f"prop:{term.name}"
        if isinstance(term, FVar):
            return f"fpvar:{term.name}"
        return type(term).__name__.lower()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def ancestors(self) -> Iterator[SignedNode]:
        """Nodes strictly above this one, nearest first."""
        node = self.parent
        while node is not None:
            yield node
            node = node.parent

    def branch(self) -> Branch:
        """Root to node path."""
        return (*reversed(tuple(self.ancestors())), self)

    def walk(self) -> Iterator[SignedNode]:
        yield self
        for child in self.children:
            yield from child.walk()

    def side_subtrees(self, child: SignedNode) -> tuple[SignedNode, ...]:
        """Children other than child."""
        return tuple(x for x in self.children if x is not child)


class SignedTree:
    """Signed generation tree of a term."""

    __slots__ = ("root",)

    def __init__(self, root: SignedNode) -> None:
        self.root = root

    @property
    def sign(self) -> Sign:
        return self.root.sign

    def nodes(self) -> Iterator[SignedNode]:
        return self.root.walk()

    def leaves(self) -> Iterator[SignedNode]:
        return (x for x in self.nodes() if x.is_leaf)

    def branches(self) -> Iterator[Branch]:
        for leaf in self.leaves():
            yield leaf.branch()

    def node_at(self, path: Path) -> SignedNode:
        node = self.root
        for idx in path:
            node = node.children[idx]
        return node

    def bound_leaves(self) -> Iterator[SignedNode]:
        """Fixed point variable leaves bound by a binder of the tree."""
        return (x for x in self.leaves() if x.binder is not None)


def signed_tree(t: Term, sign: Sign) -> SignedTree:
    """Signed generation tree of t with root sign.

    Args:
        t: Term.
        sign: Sign of the root.

    Returns:
        SignedTree.
    """

    def build(
        term: Term,
        node_sign: Sign,
        path: Path,
        parent: SignedNode | None,
        scope: dict[str, SignedNode],
    ) -> SignedNode:
        binder = scope.get(term.name) if isinstance(term, FVar) else None
        node = SignedNode(node_sign, term, path, parent, binder)
        if isinstance(term, Binder):
            scope = {**scope, term.var: node}
        for idx, (child, child_sign) in enumerate(
            zip(term.children, child_signs(term, node_sign))
        ):
            node.children.append(build(child, child_sign, (*path, idx), node, scope))
        return node

    return SignedTree(build(t, sign, (), None, {}))
