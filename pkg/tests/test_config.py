"""Tests for config module."""

import pytest
from spt_mbqc.config import DEFAULTS, DEFAULTS_VERSION, resolve, schedule_from_string
from spt_mbqc.errors import InvalidInput


def test_overrides_skip_none():
    """Test that None overrides keep the default."""
    defaults = DEFAULTS.with_overrides(chi=12, drift_tol=None)

    assert defaults.chi == 12
    assert defaults.drift_tol == DEFAULTS.drift_tol
    assert DEFAULTS.chi == 8


def test_unknown_override():
    """Test that misspelled defaults are rejected."""
    with pytest.raises(KeyError):
        DEFAULTS.with_overrides(chii=12)


def test_as_table_is_flat():
    """Test the header table of the defaults."""
    table = DEFAULTS.as_table()

    assert table["version"] == DEFAULTS_VERSION
    assert table["schedule"][0] == [0.1, 2000]
    assert table["scan_lambda_range"] == [-3.0, 3.0]


def test_resolve_tolerance_and_seed():
    """Test that --tol and --seed reach every module."""
    config = resolve("cg compute", {"group": "A4"}, tol=1e-6, seed=9)
    defaults = config.defaults

    assert defaults.cg_residual_tol == 1e-6
    assert defaults.group_tol == 1e-6
    assert defaults.ham_tol == 1e-6
    assert defaults.probability_tol == 1e-6
    assert defaults.rotation_tol == 1e-6
    assert defaults.protection_tol == 1e-6
    seeds = (
        defaults.cg_seed,
        defaults.b_seed,
        defaults.measurement_seed,
        defaults.itebd_seed,
    )
    assert seeds == (9, 9, 9, 9)
    assert defaults.chi == DEFAULTS.chi


def test_resolve_rejects_format():
    """Test unsupported output formats."""
    with pytest.raises(InvalidInput):
        resolve("scan", fmt="xml")


def test_run_config_to_dict():
    """Test the serialized run configuration."""
    params = {"lam": 0.1, "sectors": ("a", "b")}
    config = resolve("itebd run", params, chi=6, out="run.json")
    data = config.to_dict()

    assert data["command"] == "itebd run"
    assert data["params"] == {"lam": 0.1, "sectors": ["a", "b"]}
    assert data["defaults"]["chi"] == 6
    assert data["defaults_version"] == DEFAULTS_VERSION
    assert data["out"] == "run.json"
    assert data["format"] == "json"


def test_schedule_from_string():
    """Test schedule parsing."""
    assert schedule_from_string("0.1x500, 0.01x200") == [(0.1, 500), (0.01, 200)]


@pytest.mark.parametrize("text", ["", " , ", "0.1", "fastx10"])
def test_bad_schedule_string(text):
    """Test malformed schedules."""
    with pytest.raises(InvalidInput):
        schedule_from_string(text)
