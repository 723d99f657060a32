"""Tests for cli module."""

import json
from dataclasses import replace
from unittest.mock import patch

import pytest
from spt_mbqc.cli import app
from spt_mbqc.mbqc import compile_rotation
from spt_mbqc.symmetry_checks import OnsiteReport, extract_virtual_rep
from typer.testing import CliRunner


@pytest.fixture
def runner():
    """Create CLI runner."""
    return CliRunner()


def test_group_info(runner):
    """Test group info for a built-in group."""
    result = runner.invoke(app, ["group", "info", "Z2xZ2"])

    assert result.exit_code == 0
    assert "5 irreps" in result.stdout


def test_group_info_json(runner, tmp_path):
    """Test the JSON summary of a group."""
    out = tmp_path / "a4.json"
    result = runner.invoke(app, ["group", "info", "A4", "--out", str(out)])

    assert result.exit_code == 0
    data = json.loads(out.read_text())
    assert data["config"]["command"] == "group info"
    assert data["result"]["order"] == 24
    assert len(data["result"]["irreps"]) == 7


@pytest.mark.parametrize("name", ["Q8", "D3"])
def test_unknown_group_exit_code(runner, name):
    """Test that unsupported groups exit with a validation code."""
    result = runner.invoke(app, ["group", "info", name])

    assert result.exit_code == 2
    assert "Error" in result.stdout


def test_group_check(runner):
    """Test the consistency checks of a built-in group."""
    result = runner.invoke(app, ["group", "check", "S4"])

    assert result.exit_code == 0


def test_cg_compute_then_verify(runner, tmp_path):
    """Test that a stored CG table verifies."""
    out = tmp_path / "cg.json"
    args = ["cg", "compute", "A4", "3", "2~_(0)", "--seed", "3", "--out", str(out)]
    computed = runner.invoke(app, args)

    assert computed.exit_code == 0
    data = json.loads(out.read_text())
    assert data["result"]["group"] == "A4"
    assert data["config"]["defaults"]["cg_seed"] == 3

    verified = runner.invoke(app, ["cg", "verify", str(out)])
    assert verified.exit_code == 0


def test_cg_compute_stack_defect_exit_code(runner):
    """Test that a non-unitary CG stack fails with the verification code."""
    with patch("spt_mbqc.cli.full_stack_defect", return_value=1.0):
        result = runner.invoke(app, ["cg", "compute", "A4", "3", "2~_(0)"])

    assert result.exit_code == 3
    assert "stack unitarity defect" in result.stdout


def test_cg_verify_malformed(runner, tmp_path):
    """Test a CG file without blocks."""
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"group": "A4", "i": "3", "alpha": "2~_(0)"}))

    result = runner.invoke(app, ["cg", "verify", str(path)])
    assert result.exit_code == 2


def test_mps_build_and_check(runner, tmp_path):
    """Test building an A4 MPS file and checking it."""
    out = tmp_path / "mps.json"
    args = [
        "mps",
        "build",
        "A4",
        "--preset",
        "spin1",
        "--virtual",
        "2~_(0),2~_(1),2~_(2)",
        "--out",
        str(out),
    ]
    built = runner.invoke(app, args)

    assert built.exit_code == 0
    checked = runner.invoke(app, ["mps", "check-onsite", str(out)])
    assert checked.exit_code == 0


def test_mps_build_onsite_failure_exit_code(runner):
    """Test that a build breaking the on-site condition exits with code 3."""
    broken = OnsiteReport(residual=1.0, per_generator={"a": 1.0}, tol=1e-12)
    args = ["mps", "build", "A4", "--phys", "3", "--virtual", "2~_(0),2~_(1),2~_(2)"]
    with patch("spt_mbqc.cli.check_onsite_invariance", return_value=broken):
        result = runner.invoke(app, args)

    assert result.exit_code == 3
    assert "On-site residual" in result.stdout


def test_mps_build_needs_physical_irreps(runner):
    """Test a build without --phys or --preset."""
    result = runner.invoke(app, ["mps", "build", "A4", "--virtual", "2~_(0)"])

    assert result.exit_code == 2


def test_check_parity_aklt(runner, tmp_path):
    """Test the parity check of the AKLT chain."""
    out = tmp_path / "parity.json"
    result = runner.invoke(app, ["mps", "check-parity", "aklt", "--out", str(out)])

    assert result.exit_code == 0
    data = json.loads(out.read_text())
    assert data["result"]["passed"] is True
    assert data["result"]["report"]["beta"] == -1
    assert data["result"]["block_form"]["gamma"] == "1_(0,1)"


def test_check_parity_without_solution(runner):
    """Test α(P) = -1 on the AKLT chain."""
    result = runner.invoke(app, ["mps", "check-parity", "aklt", "--alpha", "-1"])

    assert result.exit_code == 3


def test_check_time_reversal_aklt(runner):
    """Test the time-reversal check of the AKLT chain."""
    result = runner.invoke(app, ["mps", "check-time-reversal", "aklt"])

    assert result.exit_code == 0


def test_extract_sym(runner):
    """Test recovering the virtual representation."""
    result = runner.invoke(app, ["mps", "extract-sym", "aklt"])

    assert result.exit_code == 0
    assert "V(a)" in result.stdout


def test_extract_sym_residual_exit_code(runner):
    """Test that a large extraction residual exits with code 3."""

    def inaccurate(*args, **kwargs):
        return replace(extract_virtual_rep(*args, **kwargs), residual=0.1)

    with patch("spt_mbqc.cli.extract_virtual_rep", side_effect=inaccurate):
        result = runner.invoke(app, ["mps", "extract-sym", "aklt"])

    assert result.exit_code == 3
    assert "Extracted representation residual" in result.stdout


def test_mbqc_run_transcript(runner, tmp_path):
    """Test the JSON lines transcript of a rotation."""
    out = tmp_path / "run.jsonl"
    args = ["mbqc", "run", "--gate", "rz:0.3", "--seed", "1", "--out", str(out)]
    result = runner.invoke(app, args)

    assert result.exit_code == 0
    lines = out.read_text().splitlines()
    header = json.loads(lines[0])
    assert header["config"]["command"] == "mbqc run"
    assert header["fidelity"] == pytest.approx(1.0, abs=1e-10)
    assert len(lines) > 1


def test_mbqc_run_documented_command(runner):
    """Test the rotation command as written in the README."""
    args = ["mbqc", "run", "--state", "aklt", "--gate", "rz:0.785,rx:1.047"]
    result = runner.invoke(app, args + ["--seed", "7"])

    assert result.exit_code == 0
    assert "aklt rotation" in result.stdout


@pytest.mark.parametrize("state", ["aklt", "cluster"])
def test_mbqc_run_legacy_option_names(runner, state):
    """Test that --chain and --gates still select the state and rotations."""
    args = ["mbqc", "run", "--chain", state, "--gates", "rx:0.5", "--seed", "2"]
    result = runner.invoke(app, args)

    assert result.exit_code == 0
    assert f"{state} rotation" in result.stdout


def test_mbqc_run_low_fidelity_exit_code(runner):
    """Test that a rotation below the fidelity bound exits with code 3."""

    def degraded(*args, **kwargs):
        return replace(compile_rotation(*args, **kwargs), fidelity=0.5)

    args = ["mbqc", "run", "--state", "aklt", "--gate", "rz:0.3", "--seed", "7"]
    with patch("spt_mbqc.cli.compile_rotation", side_effect=degraded):
        result = runner.invoke(app, args)

    assert result.exit_code == 3
    assert "Rotation fidelity" in result.stdout


def test_mbqc_run_transcript_is_reproducible(runner, tmp_path):
    """Test that the same seed writes byte-identical transcripts."""
    outputs = []
    for name in ("first.jsonl", "second.jsonl"):
        out = tmp_path / name
        args = ["mbqc", "run", "--gate", "rz:0.785,rx:1.047", "--seed", "7"]
        result = runner.invoke(app, args + ["--out", str(out)])
        assert result.exit_code == 0
        outputs.append(out.read_bytes())

    assert outputs[0] == outputs[1]


def test_mbqc_run_bad_gates(runner):
    """Test an unknown rotation axis."""
    result = runner.invoke(app, ["mbqc", "run", "--gate", "rq:0.3"])

    assert result.exit_code == 2


def test_mbqc_run_needs_a_target(runner):
    """Test a run without --gate or --euler."""
    result = runner.invoke(app, ["mbqc", "run", "--state", "cluster"])

    assert result.exit_code == 2


def test_mbqc_identity_test(runner):
    """Test identity protection on Z2xZ2."""
    args = ["mbqc", "identity-test", "Z2xZ2", "--degeneracy", "2", "--sites", "4"]
    result = runner.invoke(app, args)

    assert result.exit_code == 0


def test_ham_h_matrix(runner, tmp_path):
    """Test the spin-2 block outside the AKLT region."""
    out = tmp_path / "h.json"
    result = runner.invoke(app, ["ham", "h-matrix", "--mu=-3", "--out", str(out)])

    assert result.exit_code == 0
    data = json.loads(out.read_text())
    assert data["result"]["in_region_analytic"] is False
    assert data["result"]["min_eig"] == pytest.approx(-1.0)


def test_ham_build_and_verify(runner, tmp_path):
    """Test writing a Hamiltonian and verifying the file."""
    out = tmp_path / "h.json"
    built = runner.invoke(app, ["ham", "build", "--lambda", "0.4", "--out", str(out)])

    assert built.exit_code == 0
    data = json.loads(out.read_text())
    term = tmp_path / "term.json"
    term.write_text(json.dumps(data["result"]))

    verified = runner.invoke(app, ["ham", "verify", "--file", str(term)])
    assert verified.exit_code == 0


def test_itebd_bad_chi(runner):
    """Test the smallest bond dimension."""
    result = runner.invoke(app, ["itebd", "run", "--chi", "1"])

    assert result.exit_code == 2


def test_itebd_bad_schedule(runner):
    """Test a malformed schedule string."""
    result = runner.invoke(app, ["itebd", "run", "--schedule", "fast"])

    assert result.exit_code == 2


def test_scan_rejects_format(runner, tmp_path):
    """Test an unsupported scan output format."""
    out = tmp_path / "scan.xml"
    result = runner.invoke(app, ["scan", "--format", "xml", "--out", str(out)])

    assert result.exit_code == 2


def test_scan_rejects_grid(runner):
    """Test a malformed grid."""
    result = runner.invoke(app, ["scan", "--grid", "ten"])

    assert result.exit_code == 2


def test_verbose_flag(runner):
    """Test that -v is accepted before a command."""
    result = runner.invoke(app, ["-v", "ham", "h-matrix"])

    assert result.exit_code == 0


@pytest.mark.slow
@pytest.mark.scan
def test_scan_writes_csv_and_script(runner, tmp_path):
    """Test a one-point scan end to end."""
    out = tmp_path / "scan.csv"
    args = [
        "scan",
        "--lambda-range",
        "0,0",
        "--mu-range",
        "0,0",
        "--grid",
        "1x1",
        "--chi",
        "2",
        "--schedule",
        "0.1x200,0.01x50",
        "--out",
        str(out),
    ]
    result = runner.invoke(app, args)

    assert result.exit_code == 0
    assert out.exists()
    assert (tmp_path / "scan_plot.py").exists()
