"""Tests for itebd module."""

from dataclasses import replace

import numpy as np
import pytest
from spt_mbqc.config import DEFAULTS
from spt_mbqc.errors import (
    DegenerateDominantEigenvalue,
    InvalidInput,
    NoConvergence,
    NonCanonical,
)
from spt_mbqc.hamiltonian import aklt_energy, hamiltonian
from spt_mbqc.itebd import (
    ITEBDState,
    canonical_residual,
    energy_density,
    fidelity_per_site,
    itebd_ground_state,
)
from spt_mbqc.mps import aklt_mps, build_mps, cluster_mps


@pytest.fixture
def aklt_state():
    """Create the AKLT chain as a canonical two-site state."""
    return ITEBDState.from_uniform(aklt_mps().A)


@pytest.fixture
def zz_state():
    """Create the product state |z z z ...>."""
    A = np.zeros((3, 1, 1), dtype=complex)
    A[2] = 1.0
    return ITEBDState.from_uniform(A)


def test_aklt_state_is_canonical(aklt_state):
    """Test the canonical form of the exact AKLT state."""
    assert canonical_residual(aklt_state) < 1e-10
    assert aklt_state.chi == 2
    assert np.sum(aklt_state.lam_a**2) == pytest.approx(1.0)


def test_aklt_energy_and_fidelity(aklt_state):
    """Test energy -2/3 and unit fidelity for the AKLT state."""
    energy = energy_density(aklt_state, hamiltonian(0.0, 0.0))
    assert energy == pytest.approx(-2 / 3, abs=1e-12)
    assert fidelity_per_site(aklt_state, aklt_mps()) == pytest.approx(1.0, abs=1e-10)


def test_product_state_energy(zz_state):
    """Test that a product state reads off the diagonal of H."""
    H = hamiltonian(0.0, 0.0)

    assert energy_density(zz_state, H) == pytest.approx(H.matrix[8, 8].real)
    assert energy_density(zz_state, H) == pytest.approx(2 / 3)


def test_product_state_beats_aklt_deep_in_mu(zz_state):
    """Test the |zz> energy at μ = -3."""
    assert energy_density(zz_state, hamiltonian(0.0, -3.0)) == pytest.approx(-10 / 3)
    assert -10 / 3 < aklt_energy(-3.0)


def test_degenerate_fidelity(zz_state):
    """Test the degenerate mixed transfer spectrum against AKLT."""
    assert fidelity_per_site(zz_state, aklt_mps()) == pytest.approx(1 / 3)

    with pytest.raises(DegenerateDominantEigenvalue) as exc_info:
        fidelity_per_site(zz_state, aklt_mps(), strict=True)
    assert exc_info.value.value == pytest.approx(1 / 3)


def test_fidelity_reference_checks(aklt_state):
    """Test references of the wrong dimension or without translation invariance."""
    with pytest.raises(InvalidInput):
        fidelity_per_site(aklt_state, cluster_mps())

    virtual = [("2~_(0)", 1), ("2~_(1)", 1), ("2~_(2)", 1)]
    sites = build_mps("A4", ["3"], "a", None, virtual, sites=3)
    with pytest.raises(InvalidInput):
        fidelity_per_site(aklt_state, sites)


def test_random_state_is_canonical():
    """Test that random starting states are canonical."""
    state = ITEBDState.random(3, 4, seed=1)

    assert state.chi <= 4
    assert canonical_residual(state) < 1e-8


def test_non_canonical_state(aklt_state):
    """Test that energies need a canonical state."""
    broken = replace(aklt_state, b_a=2 * aklt_state.b_a)

    with pytest.raises(NonCanonical):
        energy_density(broken, hamiltonian(0.0, 0.0))


def test_from_uniform_shape_check():
    """Test a tensor that is not (d, D, D)."""
    with pytest.raises(InvalidInput):
        ITEBDState.from_uniform(np.ones((3, 2, 4)))


def test_bond_dimension_must_exceed_one():
    """Test the smallest allowed bond dimension."""
    with pytest.raises(InvalidInput):
        itebd_ground_state(hamiltonian(0.0, 0.0), chi=1)


@pytest.mark.parametrize("schedule", [[], [(0.01, 10), (0.1, 10)], [(0.0, 10)]])
def test_bad_schedule(schedule):
    """Test empty, increasing and non-positive schedules."""
    with pytest.raises(InvalidInput):
        itebd_ground_state(hamiltonian(0.0, 0.0), chi=2, schedule=schedule)


def test_no_convergence_keeps_state():
    """Test that a too short schedule raises with the state attached."""
    with pytest.raises(NoConvergence) as exc_info:
        itebd_ground_state(hamiltonian(0.0, 0.0), chi=2, schedule=[(0.1, 1)], seed=3)

    state = exc_info.value.state
    assert isinstance(state, ITEBDState)
    assert not state.converged
    assert len(state.log) == 1


def test_to_dict(aklt_state):
    """Test the exported state summary."""
    data = aklt_state.to_dict()

    assert data["chi"] == 2
    assert data["converged"] is False
    assert len(data["lambda_a"]) == 2


@pytest.mark.slow
def test_ground_state_at_aklt_point():
    """Test that the evolution lands on the AKLT state at λ = μ = 0."""
    defaults = DEFAULTS.with_overrides(drift_tol=1e-6)
    H = hamiltonian(0.0, 0.0)
    state = itebd_ground_state(
        H, chi=4, schedule=[(0.1, 500), (0.01, 100)], seed=2, defaults=defaults
    )

    assert energy_density(state, H) == pytest.approx(-2 / 3, abs=1e-6)
    assert fidelity_per_site(state, aklt_mps()) > 1 - 1e-6
    assert state.log


@pytest.mark.slow
def test_ground_state_outside_aklt_region():
    """Test that the ground state leaves the AKLT state for μ = -3."""
    defaults = DEFAULTS.with_overrides(drift_tol=1e-4)
    H = hamiltonian(0.0, -3.0)
    state = itebd_ground_state(
        H, chi=4, schedule=[(0.1, 400), (0.01, 200)], seed=2, defaults=defaults
    )

    assert energy_density(state, H, tol=np.inf) < aklt_energy(-3.0) - 0.5
    assert fidelity_per_site(state, aklt_mps()) < 0.99
