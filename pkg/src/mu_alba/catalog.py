# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""Built-in lattice catalog, algebra description files and the oracle corpus."""

from __future__ import annotations

from itertools import product
from logging import getLogger
from math import prod
from random import Random
from typing import TYPE_CHECKING, Any, Callable

from yaml import YAMLError, safe_load

from .algebra import (
    FiniteLE,
    attach_operation,
    build_lattice,
    check_normality,
    tabulate,
)
from .common import AlgebraError, NormalityError, list_lattices, seed_from_env
from .syntax import Connective, Family, OrderType, Variance

if TYPE_CHECKING:
    from collections.abc import Iterator, Sequence
    from pathlib import Path

    from .algebra import FiniteLattice, Table
    from .syntax import Signature

LOG = getLogger(__name__)
# largest built-in lattice (the Boolean cube)
MAX_CATALOG_SIZE = 8
UNARY_TRIES = 20


def _read(path: Path) -> dict[str, Any]:
    LOG.debug("loading '%s'", path)
    try:
        data = safe_load(path.read_text()) or {}
    except (OSError, UnicodeDecodeError, YAMLError):
        raise AlgebraError(f"Invalid YAML file '{path}'") from None
    if not isinstance(data, dict):
        raise AlgebraError(f"Invalid description file '{path}'")
    return data


def lattice_from_data(data: dict[str, Any], name: str = "") -> FiniteLattice:
    """Build a lattice from a mapping with 'elements' and 'covers' entries.

    Args:
        data: Parsed description. 'order' may replace 'covers'.
        name: Name used when data has none.

    Returns:
        FiniteLattice.
    """
    try:
        elements = data["elements"]
    except KeyError as exc:
        raise AlgebraError(f"Description missing entry {exc}") from None
    pairs = data.get("covers", data.get("order")) or []
    if not isinstance(elements, list) or not isinstance(pairs, list):
        raise AlgebraError("'elements' and 'covers' must be lists")
    for pair in pairs:
        if not isinstance(pair, list) or len(pair) != 2:
            raise AlgebraError(f"Invalid cover pair {pair!r}")
    return build_lattice(
        [str(x) for x in elements],
        [(str(low), str(high)) for low, high in pairs],
        str(data.get("name", name)),
    )


def load_lattice(path: Path) -> FiniteLattice:
    return lattice_from_data(_read(path), path.stem)


def catalog_lattices(max_size: int = MAX_CATALOG_SIZE) -> list[FiniteLattice]:
    """Built-in lattices with at most max_size elements, smallest first.

    Args:
        max_size: Size limit.

    Returns:
        Lattices.
    """
    found = [load_lattice(x) for x in list_lattices()]
    return sorted(
        (x for x in found if x.size <= max_size), key=lambda x: (x.size, x.name)
    )


def load_algebra(path: Path, sig: Signature) -> FiniteLE:
    """Load an algebra description file.

    The file holds 'elements', 'covers' and 'operations', the latter mapping
    connective names to rows [arg..., value].

    Args:
        path: YAML (or JSON) file.
        sig: Signature providing the connectives.

    Returns:
        FiniteLE with a table for every base connective of sig.
    """
    data = _read(path)
    lattice = lattice_from_data(data, path.stem)
    le = FiniteLE(lattice, name=str(data.get("name", path.stem)))
    operations = data.get("operations") or {}
    if not isinstance(operations, dict):
        raise AlgebraError("'operations' must map connective names to tables")
    for name, rows in operations.items():
        conn = sig.lookup(str(name))
        table: Table = {}
        for row in rows or []:
            if not isinstance(row, list) or len(row) != conn.arity + 1:
                raise AlgebraError(f"Row {row!r} of '{name}' has the wrong length")
            values = tuple(lattice.index(str(x)) for x in row)
            table[values[:-1]] = values[-1]
        le = attach_operation(le, conn, table)
    missing = [x.name for x in sig.base if x not in le.tables]
    if missing:
        raise AlgebraError(f"No table for {', '.join(missing)}")
    return le


def _unary_candidates(
    lattice: FiniteLattice, is_f: bool, variance: Variance
) -> list[Callable[[int], int]]:
    found: list[Callable[[int], int]] = []
    if variance is Variance.MONO:
        found.append(lambda x: x)
        for c in lattice.elements:
            if is_f:
                found.append(lambda x, c=c: lattice.meet(x, c))
            else:
                found.append(lambda x, c=c: lattice.join(x, c))
    else:
        for c in lattice.elements:
            if is_f:
                found.append(lambda x, c=c: lattice.bot if x == lattice.top else c)
            else:
                found.append(lambda x, c=c: lattice.top if x == lattice.bot else c)
    return found


def canned_tables(lattice: FiniteLattice, conn: Connective) -> list[Table]:
    """Hand picked operation tables, identities first, constant unit last.

    Unary pieces (identity, meet or join with a constant, and for antitone
    coordinates constants away from the unit) are combined with meets for F
    connectives and joins for G connectives. Not every table is normal on a
    non-distributive lattice.

    Args:
        lattice: Carrier.
        conn: Base connective.

    Returns:
        Tables.
    """
    if conn.arity == 0:
        return [{(): x} for x in lattice.elements]
    is_f = conn.family is Family.F
    combine = lattice.meet_all if is_f else lattice.join_all
    pieces = [_unary_candidates(lattice, is_f, x) for x in conn.order_type]
    tables = [
        tabulate(
            lattice,
            conn.arity,
            lambda *xs, fns=fns: combine(fn(x) for fn, x in zip(fns, xs)),
        )
        for fns in product(*pieces)
    ]
    unit = lattice.bot if is_f else lattice.top
    tables.append(tabulate(lattice, conn.arity, lambda *_: unit))
    return tables


def _extend(lattice: FiniteLattice, conn: Connective, rng: Random) -> Table:
    """Table extended from random images of join (meet) irreducible tuples.

    F connectives join the images of the join irreducibles below each
    monotone argument (meet irreducibles above each antitone argument), G
    connectives dually. On distributive lattices the result is normal.
    """
    elements = list(lattice.elements)
    if conn.arity == 0:
        return {(): rng.choice(elements)}
    is_f = conn.family is Family.F
    below = [(x is Variance.MONO) == is_f for x in conn.order_type]
    gens = [
        lattice.join_irreducibles() if flag else lattice.meet_irreducibles()
        for flag in below
    ]
    images = {tup: rng.choice(elements) for tup in product(*gens)}
    table: Table = {}
    for args in product(elements, repeat=conn.arity):
        selected = [
            value
            for tup, value in images.items()
            if all(
                lattice.le(g, x) if flag else lattice.le(x, g)
                for g, x, flag in zip(tup, args, below)
            )
        ]
        table[args] = lattice.join_all(selected) if is_f else lattice.meet_all(selected)
    return table


def _unary_piece(
    lattice: FiniteLattice, family: Family, variance: Variance, rng: Random
) -> dict[int, int]:
    unary = Connective("u", family, OrderType((variance,)))
    for _ in range(UNARY_TRIES):
        table = _extend(lattice, unary, rng)
        try:
            check_normality(lattice, unary, table)
        except NormalityError:
            continue
        return {args[0]: value for args, value in table.items()}
    # unit to unit, everything else to one element
    joinlike = (variance is Variance.MONO) == (family is Family.F)
    in_unit = lattice.bot if joinlike else lattice.top
    out_unit = lattice.bot if family is Family.F else lattice.top
    value = rng.choice(lattice.elements)
    return {x: out_unit if x == in_unit else value for x in lattice.elements}


def _guarded(lattice: FiniteLattice, conn: Connective, rng: Random) -> Table:
    """Table normal on any lattice.

    One coordinate carries a normal unary map. Every other coordinate only
    tests whether its argument is the unit of that coordinate, in which case
    the result is the output unit.
    """
    is_f = conn.family is Family.F
    out_unit = lattice.bot if is_f else lattice.top
    units = [
        lattice.bot if (x is Variance.MONO) == is_f else lattice.top
        for x in conn.order_type
    ]
    carrier = rng.randrange(conn.arity)
    piece = _unary_piece(lattice, conn.family, conn.order_type[carrier], rng)
    table: Table = {}
    for args in product(lattice.elements, repeat=conn.arity):
        if any(
            x == unit
            for pos, (x, unit) in enumerate(zip(args, units))
            if pos != carrier
        ):
            table[args] = out_unit
        else:
            table[args] = piece[args[carrier]]
    return table


def random_table(lattice: FiniteLattice, conn: Connective, rng: Random) -> Table:
    """Random normal table.

    Tables are extended from images of irreducible tuples, which is normal on
    distributive lattices. Elsewhere a non-normal extension is replaced by a
    guarded table built around a normal unary map.

    Args:
        lattice: Carrier.
        conn: Base connective.
        rng: Random source.

    Returns:
        Total normal table.
    """
    table = _extend(lattice, conn, rng)
    if conn.arity == 0 or lattice.is_distributive:
        return table
    try:
        check_normality(lattice, conn, table)
    except NormalityError:
        LOG.debug("'%s' extension not normal on '%s'", conn.name, lattice.name)
        return _guarded(lattice, conn, rng)
    return table


def _decode(index: int, choices: Sequence[Sequence[Table]]) -> list[Table]:
    picked = []
    for options in reversed(choices):
        index, pos = divmod(index, len(options))
        picked.append(options[pos])
    return picked[::-1]


def algebras_over(
    lattice: FiniteLattice, connectives: Sequence[Connective], budget: int, rng: Random
) -> Iterator[FiniteLE]:
    """Up to budget distinct normal algebras over lattice.

    Half of the budget comes from canned tables (the all-identity choice
    first), the rest from random tables. Non-normal candidates are dropped.

    Args:
        lattice: Carrier.
        connectives: Base connectives needing tables.
        budget: Maximum number of algebras.
        rng: Random source.

    Yields:
        FiniteLE.
    """
    seen: set[tuple[tuple[tuple[tuple[int, ...], int], ...], ...]] = set()
    produced = 0

    def attempt(tables: Sequence[Table]) -> FiniteLE | None:
        key = tuple(tuple(sorted(x.items())) for x in tables)
        if key in seen:
            return None
        seen.add(key)
        le = FiniteLE(lattice)
        try:
            for conn, table in zip(connectives, tables):
                le = attach_operation(le, conn, table)
        except NormalityError as exc:
            LOG.debug("rejected on '%s': %s", lattice.name, exc)
            return None
        return le

    canned = [canned_tables(lattice, x) for x in connectives]
    total = prod(len(x) for x in canned)
    quota = max(1, budget // 2)
    indices = [0, *rng.sample(range(1, total), min(total - 1, quota * 4))]
    tries = 0
    for source in ("canned", "random"):
        while produced < (quota if source == "canned" else budget):
            if source == "canned":
                if not indices:
                    break
                le = attempt(_decode(indices.pop(0), canned))
            else:
                tries += 1
                if tries > budget * 20:
                    break
                le = attempt([random_table(lattice, x, rng) for x in connectives])
            if le is not None:
                produced += 1
                le.name = f"{lattice.name}/{produced}"
                yield le
    LOG.debug("%d algebra(s) over '%s'", produced, lattice.name)


def enumerate_les(
    max_size: int, sig: Signature, budget: int, seed: int | None = None
) -> Iterator[FiniteLE]:
    """Oracle corpus: normal algebras over every catalog lattice up to max_size.

    Args:
        max_size: Largest lattice size.
        sig: Signature whose base connectives get tables.
        budget: Algebras per lattice.
        seed: Random seed, ALBA_SEED (or 0) when omitted.

    Yields:
        FiniteLE.
    """
    rng = Random(seed_from_env() if seed is None else seed)
    for lattice in catalog_lattices(max_size):
        yield from algebras_over(lattice, sig.base, budget, rng)
