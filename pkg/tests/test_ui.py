"""Tests for ui module."""

import pytest
from spt_mbqc.groups import check_group, load_builtin
from spt_mbqc.scan import ScanPoint, ScanResult
from spt_mbqc.ui import TerminalUI, report_rows


@pytest.fixture
def ui():
    """Create UI instance."""
    return TerminalUI()


@pytest.fixture
def scan_result():
    """Create a small scan result with one failed point."""
    points = (
        ScanPoint(0.0, 0.0, -2 / 3, 1.0, 2.0, True, True),
        ScanPoint(0.0, -3.0, -3.4, 0.2, -1.0, False, False, error="drifting"),
    )
    return ScanResult(points=points, params={})


def test_display_group(ui, capsys):
    """Test group display."""
    ui.display_group(load_builtin("Z2xZ2"))
    captured = capsys.readouterr()

    assert "Z2xZ2" in captured.out
    assert "Character table" in captured.out
    assert "5 irreps" in captured.out
    assert "a:1" in captured.out
    assert "e:4" in captured.out


def test_display_group_check(ui, capsys):
    """Test group check display."""
    ui.display_group_check(check_group(load_builtin("Z2xZ2")))
    captured = capsys.readouterr()

    assert "Consistency checks" in captured.out
    assert "Group totals" in captured.out
    assert "pass" in captured.out


def test_display_report(ui, capsys):
    """Test report display with a verdict."""
    ui.display_report("Parity check", [("residual", 1e-15), ("beta", -1)], passed=False)
    captured = capsys.readouterr()

    assert "Parity check" in captured.out
    assert "residual" in captured.out
    assert "-1" in captured.out
    assert "fail" in captured.out


def test_display_transcript_empty(ui, capsys):
    """Test transcript display without records."""
    ui.display_transcript([])
    captured = capsys.readouterr()

    assert "Measurement transcript" in captured.out


def test_display_scan_summary(ui, scan_result, capsys):
    """Test scan summary display."""
    ui.display_scan_summary(scan_result)
    captured = capsys.readouterr()

    assert "Scan Summary" in captured.out
    assert "Grid points: 2" in captured.out
    assert "Not converged: 1" in captured.out


def test_update_scan_progress(ui):
    """Test that progress closes after the last point."""
    ui.update_scan_progress(1, 2, "λ=0.000, μ=0.000")
    assert ui._progress is not None

    ui.update_scan_progress(2, 2, "λ=0.000, μ=-3.000")
    assert ui._progress is None


def test_report_rows():
    """Test report row extraction."""
    report = ScanPoint(0.5, 1.0, 0.0, 1.0, 2.0, True, True)

    rows = report_rows(report, ["min_eig_h", "converged"])
    assert rows == [("min eig h", 2.0), ("converged", True)]


def test_display_error(ui, capsys):
    """Test error message display."""
    ui.display_error("Test error message")
    captured = capsys.readouterr()

    assert "Error" in captured.out
    assert "Test error message" in captured.out


def test_display_warning(ui, capsys):
    """Test warning message display."""
    ui.display_warning("Test warning message")
    captured = capsys.readouterr()

    assert "Warning" in captured.out
    assert "Test warning message" in captured.out


def test_display_info(ui, capsys):
    """Test info message display."""
    ui.display_info("Test info message")
    captured = capsys.readouterr()

    assert "Info" in captured.out
    assert "Test info message" in captured.out


def test_display_success(ui, capsys):
    """Test success message display."""
    ui.display_success("All blocks intertwine")
    captured = capsys.readouterr()

    assert "All blocks intertwine" in captured.out
