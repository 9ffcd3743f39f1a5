"""Tests for check aggregation."""

import pytest

from weldedtree.checks import CheckResult, CheckTable, VerificationFailed


class TestCheckTable:
    """Test pass/fail bookkeeping."""

    def test_passed(self):
        assert CheckResult("a", 1.0, 1.0).passed
        assert not CheckResult("a", 1.5, 1.0).passed

    def test_summary_keeps_worst(self):
        table = CheckTable()
        table.add("identity", 1e-12, 1e-9, step=1)
        table.add("identity", 5e-10, 1e-9, step=2)
        table.add("bound", 0.1, 1.0)
        summary = {row[0]: row for row in table.summary()}
        assert summary["identity"][1] == pytest.approx(5e-10)
        assert summary["identity"][3]
        assert table.ok

    def test_reported_checks_never_fail(self):
        """Test unasserted checks show up in the summary only."""
        table = CheckTable()
        table.add("report.only", 2.0, 1.0, asserted=False)
        assert table.ok
        assert table.summary()[0][3] is False
        table.raise_on_failure()

    def test_raise_on_failure(self):
        table = CheckTable()
        table.add("identity", 1.0, 1e-9, step=3)
        table.add("identity", 2.0, 1e-9, step=4)
        with pytest.raises(VerificationFailed) as info:
            table.raise_on_failure()
        assert len(info.value.failures) == 2
        assert "identity" in str(info.value)
