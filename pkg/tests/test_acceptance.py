"""One pass/fail line per exit criterion, repeated in the session summary."""
import pytest

from spinpurify.acceptance import CRITERIA

LINES: list[str] = []


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: c.__name__.removeprefix("criterion_"))
def test_criterion(criterion):
    result = criterion()
    LINES.append(result.line())
    print(result.line())
    assert result.passed, result.line()
