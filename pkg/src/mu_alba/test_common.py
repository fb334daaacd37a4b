# type: ignore
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this file,
# You can obtain one at http://mozilla.org/MPL/2.0/.
from logging import DEBUG, INFO

from pytest import mark

from .common import (
    SEED_ENV,
    ParseError,
    RuleError,
    TermError,
    init_logging,
    list_lattices,
    seed_from_env,
)


def test_list_lattices_01():
    """test list_lattices()"""
    found = {x.stem for x in list_lattices()}
    assert {"chain2", "boolean2", "m3", "n5"} <= found
    assert all(x.suffix == ".yml" for x in list_lattices())


@mark.parametrize(
    "value, expected",
    [
        # not set
        (None, 0),
        # valid
        ("42", 42),
        # empty
        ("  ", 0),
        # invalid
        ("x", 0),
    ],
)
def test_seed_from_env_01(monkeypatch, value, expected):
    """test seed_from_env()"""
    if value is None:
        monkeypatch.delenv(SEED_ENV, raising=False)
    else:
        monkeypatch.setenv(SEED_ENV, value)
    assert seed_from_env() == expected


def test_errors_01():
    """test ParseError and RuleError messages"""
    exc = ParseError("Syntax error", 1, 7)
    assert isinstance(exc, TermError)
    assert str(exc) == "Syntax error (line 1, column 7)"
    assert exc.column == 7
    assert str(ParseError("bad")) == "bad"
    exc = RuleError("approx_L+", "tame restriction violated")
    assert str(exc) == "approx_L+: tame restriction violated"
    assert exc.restriction == "tame restriction violated"


@mark.parametrize("level", [DEBUG, INFO])
def test_init_logging_01(mocker, level):
    """test init_logging()"""
    config = mocker.patch("mu_alba.common.basicConfig", autospec=True)
    init_logging(level)
    assert config.call_count == 1
    assert config.call_args[1]["level"] == level
