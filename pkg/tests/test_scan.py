"""Tests for scan module."""

import numpy as np
import pytest
from spt_mbqc.errors import InvalidInput
from spt_mbqc.hamiltonian import aklt_energy
from spt_mbqc.output import read_csv
from spt_mbqc.scan import (
    COLUMNS,
    ScanPoint,
    ScanResult,
    boundary_distance,
    grid_axis,
    phase_scan,
    plot_script,
    point_seed,
    scan_grid,
    write_scan,
)


@pytest.fixture
def scan_result():
    """Create a two-point scan result."""
    points = (
        ScanPoint(0.5, 0.0, -2 / 3, 1.0, 0.2679491924311228, True, True),
        ScanPoint(
            0.5, -3.0, -3.4, 0.25, -2.732050807568877, False, False, error="drifting"
        ),
    )
    return ScanResult(points=points, params={"chi": 4})


def test_grid_order():
    """Test that λ is the outer loop."""
    points = scan_grid((0.0, 1.0), (-1.0, 0.0), grid=(2, 3))

    assert points == [
        (0.0, -1.0),
        (0.0, -0.5),
        (0.0, 0.0),
        (1.0, -1.0),
        (1.0, -0.5),
        (1.0, 0.0),
    ]


def test_grid_from_step():
    """Test a grid derived from the step size."""
    points = scan_grid((0.0, 0.1), (0.0, 0.1), step=0.05)

    assert len(points) == 9
    assert points[-1] == pytest.approx((0.1, 0.1))


def test_grid_axis_errors():
    """Test empty ranges and empty grids."""
    with pytest.raises(InvalidInput):
        grid_axis((1.0, 0.0), 3, 0.05)
    with pytest.raises(InvalidInput):
        grid_axis((0.0, 1.0), 0, 0.05)


def test_single_point_axis():
    """Test a degenerate range."""
    assert np.allclose(grid_axis((0.3, 0.3), None, 0.05), [0.3])


def test_point_seed():
    """Test per-point seeds."""
    assert point_seed(1, 0) == point_seed(1, 0)
    assert point_seed(1, 0) != point_seed(1, 1)
    assert point_seed(1, 0) != point_seed(2, 0)


def test_boundary_distance():
    """Test distances to the analytic boundary lines."""
    assert boundary_distance(0.0, -2.0) == pytest.approx(0.0)
    assert boundary_distance(0.0, 0.0) == pytest.approx(2 / np.sqrt(13))


def test_failures(scan_result):
    """Test that failed points are listed."""
    assert [p.mu for p in scan_result.failures] == [-3.0]
    assert len(scan_result.rows()[0]) == len(COLUMNS)


def test_plot_script():
    """Test the generated plotting script."""
    script = plot_script("phase.csv")

    assert "'phase.csv'" in script
    assert "'phase.png'" in script
    assert "fidelity_per_site" in script


def test_write_scan(tmp_path, scan_result):
    """Test the scan CSV and its plotting script."""
    csv_path, script_path = write_scan(
        scan_result, tmp_path / "out" / "scan.csv", header={"chi": 4}
    )

    assert script_path.name == "scan_plot.py"
    assert script_path.exists()
    data = read_csv(csv_path)
    assert data["header"] == {"chi": "4"}
    assert [r["mu"] for r in data["rows"]] == ["0", "-3"]
    assert data["rows"][0]["in_region_analytic"] == "true"
    assert data["rows"][1]["converged"] == "false"
    assert float(data["rows"][0]["energy_per_site"]) == pytest.approx(-2 / 3, abs=1e-15)


@pytest.mark.slow
@pytest.mark.scan
def test_small_phase_scan():
    """Test a two-point scan inside the AKLT region."""
    calls = []
    result = phase_scan(
        lambda_range=(0.0, 0.0),
        mu_range=(-0.2, 0.0),
        grid=(1, 2),
        chi=2,
        schedule=[(0.1, 300), (0.01, 100)],
        seed=1,
        progress_callback=lambda done, total, label: calls.append((done, total)),
    )

    assert calls == [(1, 2), (2, 2)]
    assert [p.mu for p in result.points] == [-0.2, 0.0]
    for point in result.points:
        assert point.in_region_analytic
        assert point.fidelity_per_site == pytest.approx(1.0, abs=1e-6)
    assert result.params["grid"] == [1, 2]


@pytest.mark.slow
@pytest.mark.scan
def test_parallel_scan_matches_serial():
    """Test that worker processes reproduce the serial scan."""
    kwargs = dict(
        lambda_range=(0.0, 0.2),
        mu_range=(0.0, 0.0),
        grid=(2, 1),
        chi=2,
        schedule=[(0.1, 100)],
        seed=4,
    )
    serial = phase_scan(**kwargs)
    parallel = phase_scan(jobs=2, **kwargs)

    for a, b in zip(serial.points, parallel.points):
        assert (a.lam, a.mu) == (b.lam, b.mu)
        assert a.energy_per_site == pytest.approx(b.energy_per_site, abs=1e-12)


@pytest.mark.slow
@pytest.mark.scan
def test_desk_scan_sign_agreement():
    """Test fidelity and energy against the sign of h on an 11x11 grid."""
    result = phase_scan(
        lambda_range=(-1.5, 1.5), mu_range=(-1.5, 1.5), grid=(11, 11), chi=8, jobs=4
    )

    assert len(result.points) == 121
    for point in result.points:
        if point.min_eig_h > 0.05:
            assert point.fidelity_per_site >= 1 - 1e-6
            expected = aklt_energy(point.mu)
            assert point.energy_per_site == pytest.approx(expected, abs=1e-6)
        elif point.min_eig_h < -0.05:
            assert point.fidelity_per_site < 1 - 1e-4
            assert point.energy_per_site < aklt_energy(point.mu)
