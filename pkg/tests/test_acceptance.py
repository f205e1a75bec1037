"""Acceptance gate: every criterion at its stated tolerance and budget.

Each test prints one ``criterion N [PASS|FAIL]`` line; the lines are
repeated together in the terminal summary.
"""

import pytest

from rotvort import acceptance

RESULTS = []


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number, capsys):
    result = acceptance.run_criterion(number)
    RESULTS.append(result)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, f"{result.line()}\n{result.detail}"
