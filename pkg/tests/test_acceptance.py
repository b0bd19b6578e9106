"""Acceptance gate: every criterion at its stated tolerance, one
pass/fail line each.

The envelopes criterion is a documented red: its boundary-dominance
clause asserts that the gradient sup sits at a boundary node at every
recorded time for a = -1, p = 3, u0 = e1, but the exact solution puts
the gradient argmax at an interior node until t ~ 1.3 (confirmed by two
independent discretizations agreeing to four digits; the absorption
term erodes the steepest, boundary, slopes first, and the initial datum
violates second-order corner compatibility).  The clause is evaluated
as stated rather than weakened, so that sub-check fails honestly while
the criterion's containment and gradient-ratio clauses pass.
"""

import json

import pytest

from hjdecay.verify import CRITERIA, run_criteria, summary_payload


@pytest.mark.parametrize("cid", list(CRITERIA))
def test_criterion(cid, capsys):
    result = CRITERIA[cid](None)
    with capsys.disabled():
        print(f"\n{result.line()}")
    assert result.passed, f"criterion '{cid}' failed: {json.dumps(result.details, indent=2, default=float)}"


def test_summary_lists_each_criterion_once():
    results = run_criteria(only=["stationary", "mode1-asymptotics"], echo=lambda *_: None)
    payload = summary_payload(results)
    assert sorted(payload["criteria"]) == ["mode1-asymptotics", "stationary"]
    assert set(payload) == {"version", "criteria", "all_passed"}
