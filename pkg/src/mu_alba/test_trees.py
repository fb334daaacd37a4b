# type: ignore
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this file,
# You can obtain one at http://mozilla.org/MPL/2.0/.
from pytest import raises

from .grammar import parse_signature, parse_term
from .syntax import Sign
from .trees import signed_tree

SIG = parse_signature(
    "connective f : F / 1 / (1)\n"
    "connective g : G / 1 / (1)\n"
    "connective h : F / 2 / (1,d)\n"
)


def test_signed_tree_01():
    """test signed_tree() signs follow the order-type"""
    tree = signed_tree(parse_term("h(p, g(q))", SIG), Sign.PLUS)
    assert tree.sign is Sign.PLUS
    assert [x.constructor for x in tree.nodes()] == [
        "app:h",
        "prop:p",
        "app:g",
        "prop:q",
    ]
    assert tree.node_at((0,)).sign is Sign.PLUS
    assert tree.node_at((1,)).sign is Sign.MINUS
    assert tree.node_at((1, 0)).sign is Sign.MINUS
    # negative root flips everything
    tree = signed_tree(parse_term("h(p, g(q))", SIG), Sign.MINUS)
    assert tree.node_at((1, 0)).sign is Sign.PLUS
    with raises(IndexError):
        tree.node_at((2,))


def test_signed_tree_02():
    """test branches, ancestors and bound leaves"""
    tree = signed_tree(parse_term("f(p) \\/ (mu X. (q \\/ f(X)))", SIG), Sign.PLUS)
    leaves = list(tree.leaves())
    assert [x.constructor for x in leaves] == ["prop:p", "prop:q", "fpvar:X"]
    (bound,) = tree.bound_leaves()
    assert bound.binder is tree.node_at((1,))
    branch = bound.branch()
    assert branch[0] is tree.root
    assert branch[-1] is bound
    assert [x.path for x in bound.ancestors()] == [(1, 0, 1), (1, 0), (1,), ()]
    assert len(list(tree.branches())) == 3
    join = tree.root
    assert join.side_subtrees(join.children[0]) == (join.children[1],)
    assert not join.is_leaf
    assert "mu" in repr(tree.node_at((1,)))


def test_signed_tree_03():
    """test shadowed binders"""
    tree = signed_tree(parse_term("mu X. (nu X. g(X))", SIG), Sign.PLUS)
    (bound,) = tree.bound_leaves()
    assert bound.binder is tree.node_at((0,))
