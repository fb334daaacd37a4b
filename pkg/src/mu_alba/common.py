# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
from __future__ import annotations

from logging import DEBUG, basicConfig, getLogger
from os import environ
from pathlib import Path
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from collections.abc import Iterator

LOG = getLogger(__name__)
SEED_ENV = "ALBA_SEED"


class AlbaError(Exception):
    """Base class for mu-alba errors."""


class SignatureError(AlbaError):
    """Signature related errors."""


class TermError(AlbaError):
    """Ill-formed term errors."""


class ParseError(TermError):
    """Concrete syntax errors."""

    def __init__(
        self, message: str, line: int = -1, column: int = -1, context: str = ""
    ) -> None:
        if line > 0:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column
        self.context = context


class ClassificationError(AlbaError):
    """Classifier input errors."""


class RuleError(AlbaError):
    """Rewrite rule side condition violations."""

    def __init__(self, rule: str, restriction: str) -> None:
        super().__init__(f"{rule}: {restriction}")
        self.rule = rule
        self.restriction = restriction


class AlgebraError(AlbaError):
    """Finite algebra related errors."""


class NormalityError(AlgebraError):
    """Operation table is not normal."""


def init_logging(level: int) -> None:
    """Initialize logging

    Arguments:
        level: logging verbosity level

    Returns:
        None
    """
    if level == DEBUG:
        date_fmt = None
        log_fmt = "%(asctime)s %(levelname).1s %(name)s | %(message)s"
    else:
        date_fmt = "%H:%M:%S"
        log_fmt = "[%(asctime)s] %(message)s"
    basicConfig(format=log_fmt, datefmt=date_fmt, level=level)


def list_lattices() -> Iterator[Path]:
    """List built-in lattice description files.

    Args:
        None

    Yields:
        Lattice files.
    """
    path = Path(__file__).parent.resolve() / "lattices"
    if path.is_dir():
        for lattice in sorted(path.iterdir()):
            if lattice.suffix.lower().endswith(".yml"):
                yield lattice


def seed_from_env(default: int = 0) -> int:
    """Seed for random generation, taken from ALBA_SEED when set.

    Args:
        default: Seed used when the environment does not provide one.

    Returns:
        Seed value.
    """
    value = environ.get(SEED_ENV, "").strip()
    if not value:
        return default
    try:
        return int(value)
    except ValueError:
        LOG.warning("Ignoring invalid %s value '%s'", SEED_ENV, value)
        return default
