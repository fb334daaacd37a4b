# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""Built-in acceptance suites run by 'alba selftest'."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from logging import getLogger
from random import Random
from time import perf_counter
from typing import TYPE_CHECKING, Any, Callable

from .algebra import evaluate, symbols
from .catalog import MAX_CATALOG_SIZE, enumerate_les
from .classifier import InequalityClass, classify_inequality, validate_witness
from .common import AlbaError, seed_from_env
from .engine import replay, run
from .generate import InequalityGenerator, Kind, generate
from .grammar import parse_inequality, parse_quasi, parse_signature, parse_term, render
from .rules import Mode, RunConfig
from .syntax import (
    Binder,
    BinderKind,
    Family,
    QuasiInequality,
    Variance,
    binder_paths,
    free_fixpoint_variables,
)
from .verify import check_equivalence, check_step_soundness

if TYPE_CHECKING:
    from collections.abc import Sequence

    from .algebra import FiniteLE
    from .engine import RunOutcome
    from .syntax import Connective, Signature, Term

LOG = getLogger(__name__)

SELFTEST_SIGNATURE = """\
# unary and binary connectives, monotone and antitone
connective f : F / 1 / (1)
connective g : G / 1 / (1)
connective h : F / 2 / (1,1)
connective k : G / 2 / (1,1)
connective n : F / 1 / (d)
connective o : G / 1 / (d)
"""

# input, run regime, expected output
GOLDEN = (
    ("f(p) <= g(p)", RunConfig(), ("j1 <= m1 => f(j1) <= g(m1)",)),
    (
        "mu X. (p \\/ f(X)) <= g(p)",
        RunConfig(),
        ("j1 <= m1 => mu* X. (j1 \\/ f(X)) <= g(m1)",),
    ),
    (
        "f(p) \\/ (nu X. g(X)) <= g(p)",
        RunConfig(mode=Mode.TAME),
        ("j1 <= m1 => f(j1) <= g(m1)", "=> nu* X. g(X) <= g(bot)"),
    ),
    ("n(p) <= o(p)", RunConfig(), ("j1 <= m1 => n(m1) <= o(j1)",)),
    # p of order-type d, eliminated by the left Ackermann rule
    (
        "f(p) <= g(p)",
        RunConfig(epsilon=(("p", Variance.ANTI),)),
        ("j1 <= m1 => f(j1) <= g(m1)",),
    ),
)
NOT_RECURSIVE = "g(f(p)) <= f(g(p))"


@dataclass(frozen=True)
class SelftestSizes:
    """Corpus sizes of the suites."""

    oracle: int = 50
    generated: int = 100
    classified: int = 500
    fixpoint_terms: int = 50
    round_trip: int = 1000


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict[str, Any]:
        return {
            "suite": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "failures": self.failures,
            "elapsed": round(self.elapsed, 3),
        }


class Selftest:
    """Acceptance suites sharing one signature, algebra corpus and run corpus."""

    __slots__ = ("algebras", "runs", "seed", "sig", "sizes")

    def __init__(
        self,
        algebras: Sequence[FiniteLE],
        sizes: SelftestSizes | None = None,
        seed: int = 0,
        sig: Signature | None = None,
    ) -> None:
        self.algebras = algebras
        self.seed = seed
        self.sig = sig or parse_signature(SELFTEST_SIGNATURE)
        self.sizes = sizes or SelftestSizes()
        # successful runs collected by the golden and oracle suites
        self.runs: list[RunOutcome] = []

    def golden(self, result: SuiteResult) -> None:
        for text, config, expected in GOLDEN:
            result.checked += 1
            outcome = run(parse_inequality(text, self.sig), config)
            wanted = [parse_quasi(x, self.sig) for x in expected]
            if outcome.output != wanted:
                result.failures.append(
                    f"{text}: got {[str(x) for x in outcome.output]} "
                    f"({outcome.reason or 'success'})"
                )
                continue
            self.runs.append(outcome)
            report = check_equivalence(outcome.ineq, outcome.output, self.algebras)
            if not report.equivalent:
                result.failures.append(
                    f"{text}: inequivalent on {report.discrepancies[0].algebra}"
                )

    def oracle(self, result: SuiteResult) -> None:
        corpus = generate(
            Kind.RESTRICTED,
            self.sizes.oracle,
            self.sig,
            depth=3,
            seed=self.seed,
            letters=("p", "q"),
        )
        for ineq in corpus:
            configs = [RunConfig(mode=Mode.PROPER)]
            # witnesses run from all 1 towards all d
            witnesses = classify_inequality(ineq).verdicts[
                InequalityClass.RESTRICTED
            ].witnesses
            if len(witnesses) > 1:
                last = witnesses[-1]
                configs.append(
                    RunConfig(mode=Mode.PROPER, epsilon=last.epsilon, omega=last.omega)
                )
            for config in configs:
                result.checked += 1
                outcome = run(ineq, config)
                if not outcome.success:
                    result.failures.append(f"{ineq}: {outcome.reason}")
                    continue
                self.runs.append(outcome)
                report = check_equivalence(ineq, outcome.output, self.algebras)
                for item in report.discrepancies:
                    result.failures.append(
                        f"{ineq}: inequivalent on {item.algebra} {item.counterexample}"
                    )

    def soundness(self, result: SuiteResult) -> None:
        for outcome in self.runs:
            result.checked += len(outcome.steps)
            report = check_step_soundness(outcome.steps, self.algebras)
            for item in report.discrepancies:
                assert item.step is not None
                step = outcome.steps[item.step]
                result.failures.append(
                    f"{step.rule.value} on '{step.before}' unsound on {item.algebra}"
                )

    def success(self, result: SuiteResult) -> None:
        for kind, mode in ((Kind.RESTRICTED, Mode.PROPER), (Kind.TAME, Mode.TAME)):
            corpus = generate(kind, self.sizes.generated, self.sig, seed=self.seed)
            for ineq in corpus:
                result.checked += 1
                outcome = run(ineq, RunConfig(mode=mode))
                if not outcome.success:
                    result.failures.append(
                        f"{kind.value} '{ineq}' failed in {mode.value} mode: "
                        f"{outcome.reason}"
                    )

    def classifier(self, result: SuiteResult) -> None:
        implications = (
            (InequalityClass.TAME, InequalityClass.INDUCTIVE),
            (InequalityClass.RESTRICTED, InequalityClass.INDUCTIVE),
            (InequalityClass.INDUCTIVE, InequalityClass.RECURSIVE),
        )
        corpus = generate(
            Kind.RANDOM, self.sizes.classified, self.sig, depth=5, seed=self.seed
        )
        for ineq in corpus:
            result.checked += 1
            report = classify_inequality(ineq)
            for stronger, weaker in implications:
                if report.holds(stronger) and not report.holds(weaker):
                    result.failures.append(
                        f"'{ineq}' is {stronger.value} but not {weaker.value}"
                    )
            for cls in InequalityClass:
                witness = report.witness(cls)
                if witness is not None and not validate_witness(ineq, cls, witness):
                    result.failures.append(f"{cls.value} witness of '{ineq}' rejected")
        result.checked += 1
        if classify_inequality(parse_inequality(NOT_RECURSIVE, self.sig)).holds(
            InequalityClass.RECURSIVE
        ):
            result.failures.append(f"'{NOT_RECURSIVE}' classified as recursive")

    def _fixpoint_terms(self) -> list[Term]:
        generator = InequalityGenerator(self.sig, Random(self.seed))
        found: list[Term] = []
        for _ in range(self.sizes.fixpoint_terms * 50):
            if len(found) >= self.sizes.fixpoint_terms:
                break
            t = generator.term(4)
            if binder_paths(t) and not free_fixpoint_variables(t):
                found.append(t)
        return found

    def semantics(self, result: SuiteResult) -> None:
        terms = self._fixpoint_terms()
        variants = [
            (
                t,
                rekind(t, BinderKind.MU2, BinderKind.NU2),
                rekind(t, BinderKind.MU_STAR, BinderKind.NU_STAR),
            )
            for t in terms
        ]
        rng = Random(self.seed)
        for le in self.algebras:
            lattice = le.lattice
            for conn in le.connectives:
                for coordinate in range(1, conn.arity + 1):
                    result.checked += 1
                    if not adjunction_holds(le, conn, coordinate):
                        result.failures.append(
                            f"residual {coordinate} of '{conn.name}' on {le.name}"
                        )
            for plain, second, starred in variants:
                result.checked += 1
                v = {x: rng.choice(lattice.elements) for x in symbols(plain)}
                try:
                    values = {
                        evaluate(plain, le, v, strict=True),
                        evaluate(second, le, v),
                        evaluate(starred, le, v),
                    }
                except AlbaError as exc:
                    result.failures.append(f"'{plain}' on {le.name}: {exc}")
                    continue
                if len(values) != 1:
                    result.failures.append(
                        f"binder kinds disagree on '{plain}' ({le.name})"
                    )

    def replay(self, result: SuiteResult) -> None:
        generator = InequalityGenerator(self.sig, Random(self.seed))
        for _ in range(self.sizes.round_trip):
            result.checked += 1
            t = generator.term(5)
            if parse_term(render(t), self.sig) != t:
                result.failures.append(f"round trip changed '{render(t)}'")
        for outcome in self.runs:
            result.checked += 1
            if replay(outcome) != outcome.output:
                result.failures.append(f"replay of '{outcome.ineq}' diverged")
        # dropping the antecedents of the first golden output must be detected
        result.checked += 1
        outcome = run(parse_inequality(GOLDEN[0][0], self.sig))
        corrupted = [QuasiInequality((), x.consequent) for x in outcome.output]
        if check_equivalence(
            outcome.ineq, corrupted, self.algebras, expect_equivalent=False
        ).equivalent:
            result.failures.append("corrupted output not detected")

    def suites(self) -> list[tuple[str, Callable[[SuiteResult], None]]]:
        return [
            ("golden derivations", self.golden),
            ("oracle equivalence", self.oracle),
            ("rule soundness", self.soundness),
            ("class generators", self.success),
            ("classifier inclusions", self.classifier),
            ("semantics cross-checks", self.semantics),
            ("round trip and replay", self.replay),
        ]

    def run_all(self) -> list[SuiteResult]:
        results = []
        for name, suite in self.suites():
            LOG.info("Running '%s'...", name)
            result = SuiteResult(name)
            start = perf_counter()
            try:
                suite(result)
            except AlbaError as exc:
                result.failures.append(f"aborted: {exc}")
            result.elapsed = perf_counter() - start
            for failure in result.failures:
                LOG.warning("%s: %s", name, failure)
            results.append(result)
        return results


def rekind(t: Term, least: BinderKind, greatest: BinderKind) -> Term:
    """Replace every binder by least or greatest according to its polarity."""
    if isinstance(t, Binder):
        return Binder(
            least if t.kind.least else greatest, t.var, rekind(t.body, least, greatest)
        )
    if not t.children:
        return t
    return t.rebuild(tuple(rekind(x, least, greatest) for x in t.children))


def adjunction_holds(le: FiniteLE, conn: Connective, coordinate: int) -> bool:
    """Exhaustive check of the adjunction between conn and a residual table."""
    lattice = le.lattice
    table = le.operation(conn)
    residual = le.operation(conn.residual(coordinate))
    pos = coordinate - 1
    mono = conn.order_type[pos] is Variance.MONO
    is_f = conn.family is Family.F
    for args in product(lattice.elements, repeat=conn.arity):
        for bound in lattice.elements:
            img = table[args]
            res = residual[(*args[:pos], bound, *args[pos + 1 :])]
            a = args[pos]
            lhs = lattice.le(img, bound) if is_f else lattice.le(bound, img)
            if is_f:
                rhs = lattice.le(a, res) if mono else lattice.le(res, a)
            else:
                rhs = lattice.le(res, a) if mono else lattice.le(a, res)
            if lhs != rhs:
                return False
    return True


def selftest(
    max_size: int = MAX_CATALOG_SIZE,
    budget: int = 20,
    seed: int | None = None,
    sizes: SelftestSizes | None = None,
) -> list[SuiteResult]:
    """Run every acceptance suite.

    Args:
        max_size: Largest catalog lattice used by the oracle.
        budget: Algebras per lattice.
        seed: Random seed, ALBA_SEED (or 0) when omitted.
        sizes: Corpus sizes.

    Returns:
        One result per suite.
    """
    seed = seed_from_env() if seed is None else seed
    test = Selftest([], sizes, seed)
    test.algebras = list(enumerate_les(max_size, test.sig, budget, seed))
    LOG.info("Oracle corpus: %d algebra(s)", len(test.algebras))
    return test.run_all()

