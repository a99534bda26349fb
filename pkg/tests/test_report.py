"""Tests for run reports."""

import json
import math

import pytest
from mpmath import mp

from slowdet.config import RunConfig
from slowdet.error import ErrorCode, SlowdetError
from slowdet.report import (
    REPORT_SCHEMA,
    ReportRow,
    RunReport,
    check_consistency,
    order_estimate,
    rows_to_tsv,
)


class TestRunReport:
    """Tests for the JSON report."""

    def test_fields(self) -> None:
        """Test the top-level keys."""
        report = RunReport("bound", "spiral", RunConfig(), T=10, result={"total": mp.mpf(3)})
        data = json.loads(report.to_json())
        assert data["schema"] == REPORT_SCHEMA
        assert data["T"] == 10
        assert data["config"]["precision"] == 128
        assert data["result"]["total"] == "3.0"
        assert "timings" not in data

    def test_timings(self) -> None:
        """Test that timings appear only when enabled."""
        report = RunReport("scan", "spiral", RunConfig(timings=True))
        with report.timed("scan"):
            pass
        assert report.to_dict()["timings"]["scan"] >= 0

    def test_byte_identical(self) -> None:
        """Test that equal inputs give equal bytes with timings off."""
        first = RunReport("scan", "spiral", RunConfig(seed=4), result={"b": 1, "a": 2})
        second = RunReport("scan", "spiral", RunConfig(seed=4), result={"a": 2, "b": 1})
        with first.timed("scan"):
            pass
        assert first.to_json() == second.to_json()

    def test_write(self, tmp_path, capsys) -> None:
        """Test writing to a file and to stdout."""
        report = RunReport("certify", "spiral", RunConfig())
        path = tmp_path / "report.json"
        text = report.write(path)
        assert path.read_text(encoding="utf-8") == text
        assert capsys.readouterr().out == ""
        report.write(None)
        assert capsys.readouterr().out == text


class TestConsistency:
    """Tests for the certified-count check."""

    def test_within_bound(self) -> None:
        """Test a count below the bound."""
        check_consistency(5, mp.mpf(10), verified=True)

    def test_exceeds_bound(self) -> None:
        """Test that a verified excess is an invariant violation."""
        with pytest.raises(SlowdetError) as exc_info:
            check_consistency(11, mp.mpf(10), verified=True)
        assert exc_info.value.code == ErrorCode.INVARIANT_VIOLATION
        assert exc_info.value.exit_code == 2

    def test_unverified(self) -> None:
        """Test that unverified plans are not checked."""
        check_consistency(11, mp.mpf(10), verified=False)


class TestOrderEstimate:
    """Tests for log #X / log log T."""

    def test_value(self) -> None:
        """Test 5 points at T = 16."""
        assert order_estimate(5, 16) == pytest.approx(math.log(5) / math.log(math.log(16)))

    def test_unit_loglog(self) -> None:
        """Test T = e^e, where log log T = 1."""
        assert order_estimate(7, math.exp(math.e) + 1e-9) == pytest.approx(math.log(7), rel=1e-6)

    @pytest.mark.parametrize(("count", "T"), [(0, 100), (3, 2), (3, math.e)])
    def test_undefined(self, count, T) -> None:
        """Test no points and log log T <= 0."""
        assert order_estimate(count, T) is None


class TestRows:
    """Tests for the TSV table."""

    def test_tsv(self) -> None:
        """Test the header, numbers and placeholders."""
        rows = [ReportRow(2, 3, 0, None), ReportRow(16, 5, 1, mp.mpf(1000), d=2)]
        lines = rows_to_tsv(rows).splitlines()
        assert lines[0] == "T\tcertified\tcandidates\tbound\torder"
        assert lines[1] == "2\t3\t0\t-\t-"
        assert lines[2].startswith("16\t5\t1\t1000.0\t1.5")

    def test_row_dict(self) -> None:
        """Test the JSON row."""
        data = ReportRow(16, 5, 1, mp.mpf(1000), d=2).to_dict()
        assert data["bound"] == "1000.0"
        assert data["d"] == 2
        assert data["order"] == pytest.approx(1.578, abs=1e-3)
