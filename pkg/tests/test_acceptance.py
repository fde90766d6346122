"""The fourteen acceptance criteria, each at its stated tolerance and time budget.

Criteria 4 and 5 fail at the stated scale; the measured values are printed
and the reasons are discussed in the README.
"""
import pytest

from cubictwists.acceptance import CRITERIA, run_check
from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("cid", [c[0] for c in CRITERIA], ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(cid):
    res = run_check(cid)
    line = res.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert res.passed, line
