"""Runs every registered invariant check as its own test case."""

import pytest

from properties import PROPERTIES


@pytest.mark.parametrize(
    "check", [fn for _, fn in PROPERTIES], ids=[name for name, _ in PROPERTIES]
)
def test_property(check):
    check()
