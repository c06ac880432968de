"""The ten acceptance criteria, one test each.

Each test prints a PASS/FAIL line, repeated in the terminal summary, and
asserts the criterion.
"""
from __future__ import annotations

import pytest

from wlcc.acceptance import CHECKS, run_criterion

from tests.conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("number", [num for num, _, _ in CHECKS], ids=[f"criterion_{num}" for num, _, _ in CHECKS])
def test_criterion(number):
    res = run_criterion(number)
    print(res.line())
    ACCEPTANCE_LINES.append(res.line())
    assert res.passed, res.line()
