# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""Node classification, good branches and the inductive inequality classes."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from logging import getLogger
from typing import TYPE_CHECKING, Any

from .common import ClassificationError
from .syntax import (
    App,
    Binder,
    Family,
    Join,
    Language,
    Meet,
    Prop,
    Sign,
    Variance,
    in_language,
    is_sentence,
    letters,
)
from .trees import signed_tree

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator, Mapping, Sequence

    from .syntax import Inequality
    from .trees import Branch, SignedNode, SignedTree

LOG = getLogger(__name__)
REPORT_VERSION = 1


class NodeFlag(Enum):
    """Skeleton and PIA node classes."""

    DELTA_ADJOINT = "DeltaAdjoint"
    SLR_OUTER = "SLR_outer"
    BINDER_INNER = "Binder_inner"
    SLA = "SLA"
    SLR_INNER = "SLR_inner"
    BINDER_PIA = "Binder_PIA"
    SRA = "SRA"
    SRR = "SRR"


OUTER_FLAGS = frozenset({NodeFlag.DELTA_ADJOINT, NodeFlag.SLR_OUTER})
INNER_FLAGS = frozenset({NodeFlag.BINDER_INNER, NodeFlag.SLA, NodeFlag.SLR_INNER})
PIA_FLAGS = frozenset({NodeFlag.BINDER_PIA, NodeFlag.SRA, NodeFlag.SRR})
SKELETON_FLAGS = OUTER_FLAGS | INNER_FLAGS


@dataclass(frozen=True)
class NodeClass:
    flags: frozenset[NodeFlag] = frozenset()

    @property
    def is_outer_skeleton(self) -> bool:
        return bool(self.flags & OUTER_FLAGS)

    @property
    def is_inner_skeleton(self) -> bool:
        return bool(self.flags & INNER_FLAGS)

    @property
    def is_skeleton(self) -> bool:
        return bool(self.flags & SKELETON_FLAGS)

    @property
    def is_pia(self) -> bool:
        return bool(self.flags & PIA_FLAGS)


def classify_node(node: SignedNode) -> NodeClass:
    """Node class flags computed from sign, constructor, arity and order-type.

    Args:
        node: Node of a signed generation tree.

    Returns:
        NodeClass.
    """
    term = node.term
    plus = node.sign is Sign.PLUS
    flags: set[NodeFlag] = set()
    if isinstance(term, Join):
        flags = {NodeFlag.DELTA_ADJOINT, NodeFlag.SLA} if plus else {NodeFlag.SRA}
    elif isinstance(term, Meet):
        flags = {NodeFlag.SRA} if plus else {NodeFlag.DELTA_ADJOINT, NodeFlag.SLA}
    elif isinstance(term, App):
        arity = term.connective.arity
        if (term.connective.family is Family.F) == plus:
            flags = {NodeFlag.SLR_OUTER}
            if arity == 1:
                flags.add(NodeFlag.SLA)
            elif arity > 1:
                flags.add(NodeFlag.SLR_INNER)
        elif arity == 1:
            flags = {NodeFlag.SRA}
        elif arity > 1:
            flags = {NodeFlag.SRR}
    elif isinstance(term, Binder):
        inner = term.kind.least == plus
        flags = {NodeFlag.BINDER_INNER if inner else NodeFlag.BINDER_PIA}
    return NodeClass(frozenset(flags))


def annotate(tree: SignedTree) -> SignedTree:
    """Fill the flags of every node of tree."""
    for node in tree.nodes():
        node.flags = classify_node(node).flags
    return tree


def is_critical(node: SignedNode, epsilon: Mapping[str, Variance]) -> bool:
    term = node.term
    if not isinstance(term, Prop):
        return False
    variance = epsilon.get(term.name, Variance.MONO)
    return (node.sign is Sign.PLUS) == (variance is Variance.MONO)


def critical_branches(
    tree: SignedTree, epsilon: Mapping[str, Variance]
) -> list[Branch]:
    """Branches ending in +p with epsilon 1 or -p with epsilon d.

    Args:
        tree: Signed generation tree.
        epsilon: Order-type over the proposition letters.

    Returns:
        Root to leaf branches.
    """
    return [leaf.branch() for leaf in tree.leaves() if is_critical(leaf, epsilon)]


@dataclass(frozen=True)
class BranchDecomposition:
    """Split of a branch into PIA (p1), inner (p2) and outer (p3) skeleton paths.

    Each path is listed leaf to root.
    """

    leaf: SignedNode
    p1: tuple[SignedNode, ...] = ()
    p2: tuple[SignedNode, ...] = ()
    p3: tuple[SignedNode, ...] = ()


@dataclass(frozen=True)
class BranchProps:
    nb_pia: bool
    nl: bool


def _pia_prefix(branch: Branch) -> tuple[SignedNode, ...]:
    upward = branch[-2::-1]
    count = 0
    while count < len(upward) and classify_node(upward[count]).is_pia:
        count += 1
    return tuple(upward[:count])


def decompose_branch(branch: Branch) -> list[BranchDecomposition]:
    """All (p1, p2, p3) splits of branch consistent with the node flags.

    Args:
        branch: Root to leaf branch.

    Returns:
        Decompositions, possibly none.
    """
    upward = branch[-2::-1]
    p1 = _pia_prefix(branch)
    found = []
    for cut in range(len(p1), len(upward) + 1):
        p2 = tuple(upward[len(p1) : cut])
        p3 = tuple(upward[cut:])
        if all(classify_node(x).is_inner_skeleton for x in p2) and all(
            classify_node(x).is_outer_skeleton for x in p3
        ):
            found.append(BranchDecomposition(branch[-1], p1, p2, p3))
    return found


def _next_on_branch(branch: Branch, node: SignedNode) -> SignedNode:
    for idx, item in enumerate(branch):
        if item is node:
            return branch[idx + 1]
    raise ValueError("node is not on branch")


def _dual_agreeing(node: SignedNode, epsilon: Mapping[str, Variance]) -> bool:
    return not any(is_critical(x, epsilon) for x in node.walk())


def _sides(
    branch: Branch, nodes: Iterable[SignedNode], flag: NodeFlag
) -> Iterator[SignedNode]:
    for node in nodes:
        if flag in classify_node(node).flags:
            yield from node.side_subtrees(_next_on_branch(branch, node))


def check_good(
    branch: Branch,
    epsilon: Mapping[str, Variance],
    decomposition: BranchDecomposition,
) -> bool:
    """Good branch conditions for one decomposition.

    Args:
        branch: Critical branch.
        epsilon: Order-type over the proposition letters.
        decomposition: Valid decomposition of branch.

    Returns:
        True if the uppermost PIA node is a sentence and every side subtree of
        an SRR node on p1 and of an SLR node on p2 is an epsilon-dual agreeing
        sentence.
    """
    top = decomposition.p1[-1] if decomposition.p1 else decomposition.leaf
    if not is_sentence(top.term):
        return False
    for side in (
        *_sides(branch, decomposition.p1, NodeFlag.SRR),
        *_sides(branch, decomposition.p2, NodeFlag.SLR_INNER),
    ):
        if not is_sentence(side.term) or not _dual_agreeing(side, epsilon):
            return False
    return True


def check_branch_props(
    branch: Branch, decomposition: BranchDecomposition
) -> BranchProps:
    """NB-PIA (no binder on p1) and NL (no live branch below SLR nodes on p2)."""
    nb_pia = not any(isinstance(x.term, Binder) for x in decomposition.p1)
    nl = not any(
        isinstance(node.term, Prop)
        for side in _sides(branch, decomposition.p2, NodeFlag.SLR_INNER)
        for node in side.walk()
    )
    return BranchProps(nb_pia, nl)


def omega_constraints(branch: Branch) -> frozenset[tuple[str, str]]:
    """Pairs (q, p) forced by the SRR side subtrees on the PIA part of branch."""
    leaf = branch[-1].term
    assert isinstance(leaf, Prop)
    return frozenset(
        (node.term.name, leaf.name)
        for side in _sides(branch, _pia_prefix(branch), NodeFlag.SRR)
        for node in side.walk()
        if isinstance(node.term, Prop)
    )


@dataclass(frozen=True)
class StrictOrder:
    """Strict order given by generating pairs (a, b) meaning a < b."""

    edges: frozenset[tuple[str, str]] = frozenset()

    @classmethod
    def parse(cls, text: str) -> StrictOrder:
        """Parse 'q<p,r<p'."""
        edges = set()
        for item in text.split(","):
            if not item.strip():
                continue
            lower, _, upper = item.partition("<")
            if not lower.strip() or not upper.strip():
                raise ValueError(f"invalid order pair '{item.strip()}'")
            edges.add((lower.strip(), upper.strip()))
        return cls(frozenset(edges))

    def closure(self) -> frozenset[tuple[str, str]]:
        closed = set(self.edges)
        changed = True
        while changed:
            changed = False
            for a, b in list(closed):
                for c, d in list(closed):
                    if b == c and (a, d) not in closed:
                        closed.add((a, d))
                        changed = True
        return frozenset(closed)

    @property
    def is_valid(self) -> bool:
        """Irreflexive and acyclic."""
        return all(a != b for a, b in self.closure())

    def less(self, lower: str, upper: str) -> bool:
        return (lower, upper) in self.closure()

    def topological(self, items: Sequence[str]) -> list[str]:
        """Order items minimal first, keeping the given order among ties."""
        closure = self.closure()
        remaining = list(items)
        ordered: list[str] = []
        while remaining:
            for item in remaining:
                if not any((x, item) in closure for x in remaining if x != item):
                    break
            else:
                item = remaining[0]
            ordered.append(item)
            remaining.remove(item)
        return ordered

    def __str__(self) -> str:
        return ",".join(f"{a}<{b}" for a, b in sorted(self.edges))


def synthesize_omega(constraints: Iterable[tuple[str, str]]) -> StrictOrder | None:
    """Smallest strict order containing the constraints, None if they are cyclic."""
    omega = StrictOrder(frozenset(constraints))
    return omega if omega.is_valid else None


def check_omega_conf(branch: Branch, omega: StrictOrder) -> bool:
    """Every letter in an SRR side subtree on the PIA part is below the leaf."""
    closure = omega.closure()
    return all(pair in closure for pair in omega_constraints(branch))


class InequalityClass(Enum):
    RECURSIVE = "recursive"
    INDUCTIVE = "inductive"
    RESTRICTED = "restricted"
    TAME = "tame"


@dataclass(frozen=True)
class Witness:
    epsilon: tuple[tuple[str, Variance], ...]
    omega: StrictOrder = StrictOrder()

    @property
    def epsilon_map(self) -> dict[str, Variance]:
        return dict(self.epsilon)

    def to_json(self) -> dict[str, Any]:
        return {
            "epsilon": {name: value.value for name, value in self.epsilon},
            "omega": sorted([a, b] for a, b in self.omega.edges),
        }

    def __str__(self) -> str:
        eps = ",".join(f"{name}={value.value}" for name, value in self.epsilon)
        return f"epsilon ({eps}), omega {{{self.omega}}}"


@dataclass(frozen=True)
class Failure:
    epsilon: tuple[tuple[str, Variance], ...]
    branch: tuple[tuple[str, str], ...]
    reason: str

    def to_json(self) -> dict[str, Any]:
        return {
            "epsilon": {name: value.value for name, value in self.epsilon},
            "branch": [list(x) for x in self.branch],
            "reason": self.reason,
        }


@dataclass
class Verdict:
    holds: bool = False
    witnesses: list[Witness] = field(default_factory=list)
    failures: list[Failure] = field(default_factory=list)


@dataclass
class ClassReport:
    """Per class verdicts with witnesses or failing branches."""

    ineq: Inequality
    letters: tuple[str, ...]
    verdicts: dict[InequalityClass, Verdict]

    def holds(self, cls: InequalityClass) -> bool:
        return self.verdicts[cls].holds

    def witness(self, cls: InequalityClass) -> Witness | None:
        witnesses = self.verdicts[cls].witnesses
        return witnesses[0] if witnesses else None

    @property
    def classes(self) -> list[str]:
        return [cls.value for cls in InequalityClass if self.holds(cls)]

    @property
    def strongest(self) -> str:
        tame = self.holds(InequalityClass.TAME)
        restricted = self.holds(InequalityClass.RESTRICTED)
        if tame and restricted:
            return "tame and restricted inductive"
        if tame:
            return "tame inductive"
        if restricted:
            return "restricted inductive"
        if self.holds(InequalityClass.INDUCTIVE):
            return "inductive"
        if self.holds(InequalityClass.RECURSIVE):
            return "recursive"
        return "not recursive"

    def to_json(self) -> dict[str, Any]:
        return {
            "version": REPORT_VERSION,
            "input": str(self.ineq),
            "letters": list(self.letters),
            "class": self.classes,
            "verdicts": {
                cls.value: {
                    "holds": verdict.holds,
                    "witnesses": [x.to_json() for x in verdict.witnesses],
                    "failures": [x.to_json() for x in verdict.failures],
                }
                for cls, verdict in self.verdicts.items()
            },
        }


def describe_branch(branch: Branch) -> tuple[tuple[str, str], ...]:
    return tuple((node.constructor, node.sign.value) for node in branch)


@dataclass
class _EpsilonResult:
    holds: dict[InequalityClass, bool]
    failures: dict[InequalityClass, Failure]
    omega: StrictOrder | None
    critical: list[Branch]


def _trees(ineq: Inequality) -> tuple[SignedTree, SignedTree]:
    return (
        annotate(signed_tree(ineq.lhs, Sign.PLUS)),
        annotate(signed_tree(ineq.rhs, Sign.MINUS)),
    )


def _check_epsilon(  # pylint: disable=too-many-branches,too-many-locals
    trees: tuple[SignedTree, SignedTree], epsilon: dict[str, Variance]
) -> _EpsilonResult:
    eps_key = tuple(epsilon.items())
    holds = dict.fromkeys(InequalityClass, False)
    failures: dict[InequalityClass, Failure] = {}

    def fail(reason: str, branch: Branch, *classes: InequalityClass) -> None:
        for cls in classes:
            failures.setdefault(cls, Failure(eps_key, describe_branch(branch), reason))

    critical = [b for tree in trees for b in critical_branches(tree, epsilon)]
    everything = tuple(InequalityClass)
    good: list[list[BranchDecomposition]] = []
    for branch in critical:
        decompositions = decompose_branch(branch)
        if not decompositions:
            fail("PIA node above skeleton", branch, *everything)
            return _EpsilonResult(holds, failures, None, critical)
        passing = [d for d in decompositions if check_good(branch, epsilon, d)]
        if not passing:
            fail("good branch conditions violated", branch, *everything)
            return _EpsilonResult(holds, failures, None, critical)
        good.append(passing)
    holds[InequalityClass.RECURSIVE] = True

    constraints = frozenset().union(*(omega_constraints(b) for b in critical))
    omega = synthesize_omega(constraints)
    if omega is None:
        branch = next(b for b in critical if omega_constraints(b))
        fail("omega constraints are cyclic", branch, *everything[1:])
        return _EpsilonResult(holds, failures, None, critical)
    holds[InequalityClass.INDUCTIVE] = True

    # restricted
    restricted = True
    for branch, passing in zip(critical, good):
        props = [check_branch_props(branch, d) for d in passing]
        if not any(x.nb_pia for x in props):
            fail("binder on the PIA part", branch, InequalityClass.RESTRICTED)
            restricted = False
        elif not any(x.nb_pia and x.nl for x in props):
            fail("live branch below an SLR node", branch, InequalityClass.RESTRICTED)
            restricted = False
    on_critical = {id(node) for branch in critical for node in branch}
    binders = [
        node
        for tree in trees
        for node in tree.nodes()
        if isinstance(node.term, Binder)
    ]
    for node in binders:
        if id(node) not in on_critical:
            fail(
                "binder not on a critical branch",
                node.branch(),
                InequalityClass.RESTRICTED,
            )
            restricted = False
    holds[InequalityClass.RESTRICTED] = restricted

    # tame
    tame = True
    if constraints:
        branch = next(b for b in critical if omega_constraints(b))
        fail("omega must be empty", branch, InequalityClass.TAME)
        tame = False
    for node in binders:
        assert isinstance(node.term, Binder)
        if id(node) in on_critical:
            fail("binder on a critical branch", node.branch(), InequalityClass.TAME)
            tame = False
        elif node.term.kind.least == (node.sign is Sign.PLUS):
            fail("only +nu and -mu binders allowed", node.branch(), InequalityClass.TAME)
            tame = False
    holds[InequalityClass.TAME] = tame
    return _EpsilonResult(holds, failures, omega, critical)


def letter_order(ineq: Inequality) -> tuple[str, ...]:
    """Proposition letters in first occurrence order of the printed inequality."""
    return letters(ineq)


def classify_inequality(ineq: Inequality) -> ClassReport:
    """Exhaustive classification over every order-type on the letters.

    Args:
        ineq: Inequality of the fixed point language with base connectives.

    Returns:
        ClassReport.
    """
    if not in_language(ineq, Language.L1):
        raise ClassificationError(
            "Only inequalities with mu/nu binders over base connectives are classified"
        )
    names = letter_order(ineq)
    trees = _trees(ineq)
    verdicts = {cls: Verdict() for cls in InequalityClass}
    for values in product((Variance.MONO, Variance.ANTI), repeat=len(names)):
        epsilon = dict(zip(names, values))
        result = _check_epsilon(trees, epsilon)
        LOG.debug(
            "epsilon %s: %s",
            ",".join(f"{k}={v.value}" for k, v in epsilon.items()),
            ", ".join(cls.value for cls, ok in result.holds.items() if ok) or "none",
        )
        for cls, verdict in verdicts.items():
            if result.holds[cls]:
                verdict.holds = True
                omega = StrictOrder() if cls is InequalityClass.TAME else result.omega
                assert omega is not None
                verdict.witnesses.append(Witness(tuple(epsilon.items()), omega))
            else:
                verdict.failures.append(result.failures[cls])
    return ClassReport(ineq, names, verdicts)


def validate_witness(
    ineq: Inequality, cls: InequalityClass, witness: Witness
) -> bool:
    """Re-check a witness of a class verdict from scratch.

    Args:
        ineq: Classified inequality.
        cls: Class the witness was reported for.
        witness: Order-type and strict order.

    Returns:
        True if the class conditions hold for the witness.
    """
    result = _check_epsilon(_trees(ineq), witness.epsilon_map)
    if not result.holds[cls]:
        return False
    if cls is InequalityClass.RECURSIVE:
        return True
    if not witness.omega.is_valid:
        return False
    return all(check_omega_conf(b, witness.omega) for b in result.critical)
