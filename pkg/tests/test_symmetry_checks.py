"""Tests for symmetry_checks module."""

import numpy as np
import pytest
from spt_mbqc.errors import (
    DimensionMismatch,
    NoIntertwiner,
    NonInjectiveMPS,
    NoSolution,
)
from spt_mbqc.mps import BondSector, SymmetricMPS, aklt_mps, build_mps
from spt_mbqc.numerics import SIGMA_X, SIGMA_Y, SIGMA_Z
from spt_mbqc.symmetry_checks import (
    check_block_form,
    check_onsite_invariance,
    check_parity,
    check_parity_time_commutation,
    check_time_reversal,
    compute_Lgamma,
    extract_virtual_rep,
    infer_gamma,
    solve_parity_matrix,
    solve_time_reversal_matrix,
    symmetry_action,
    symmetry_action_for,
)

AKLT_SECTORS = [BondSector("2~", 1, 2)]


@pytest.fixture
def aklt():
    """Create the AKLT chain."""
    return aklt_mps()


def test_aklt_onsite(aklt):
    """Test the Z2xZ2 on-site condition for AKLT."""
    report = check_onsite_invariance(aklt, symmetry_action_for(aklt))

    assert report.passed
    assert set(report.per_generator) == {"a", "x"}


def test_onsite_detects_wrong_action(aklt):
    """Test that a wrong physical action fails."""
    sym = symmetry_action("Z2xZ2", ["1_(0,0)", "1_(0,0)", "1_(0,0)"], AKLT_SECTORS)

    assert not check_onsite_invariance(aklt, sym).passed


def test_onsite_dimension_check(aklt):
    """Test mismatched symmetry matrices."""
    sym = symmetry_action("A4", ["3"], [("2~_(0)", 1), ("2~_(1)", 1)])

    with pytest.raises(DimensionMismatch):
        check_onsite_invariance(aklt, sym)


def test_gauge_transformed_action():
    """Test that V follows a gauge change of the tensors."""
    virtual = [("2~_(0)", 1), ("2~_(1)", 1), ("2~_(2)", 1)]
    mps = build_mps("A4", ["3"], "a", None, virtual)
    rng = np.random.default_rng(5)
    S = rng.normal(size=(6, 6)) + np.eye(6) * 3
    sym = symmetry_action_for(mps).gauge_transform(S)

    assert check_onsite_invariance(mps.gauge_transform(S), sym).passed


def test_extract_virtual_rep(aklt):
    """Test recovering V(g) and χ(g) from the AKLT tensors."""
    sym = symmetry_action_for(aklt)
    rep = extract_virtual_rep(aklt, sym.u)

    assert rep.residual < 1e-8
    for chi in rep.chi.values():
        assert chi == pytest.approx(1.0)
    for V in rep.V.values():
        assert np.allclose(V.conj().T @ V, np.eye(2), atol=1e-8)


def test_extract_rejects_non_symmetry(aklt):
    """Test a physical action that is not a symmetry."""
    u = {"g": np.diag([1.0, 1.0, 0.5])}

    with pytest.raises(NoSolution):
        extract_virtual_rep(aklt, u)


def test_extract_rejects_non_injective():
    """Test a product-like MPS with a degenerate transfer spectrum."""
    tensors = np.stack([np.eye(2), np.zeros((2, 2)), np.zeros((2, 2))]).astype(complex)
    degenerate = SymmetricMPS(tensors=tensors[None])

    with pytest.raises(NonInjectiveMPS):
        extract_virtual_rep(degenerate, {"g": np.eye(3)})


def test_aklt_parity(aklt):
    """Test the parity condition with w = -1 and N = σ_y."""
    w = -np.eye(3)
    report = check_parity(aklt, w, SIGMA_Y, 1)

    assert report.passed
    assert report.beta == -1


def test_solve_parity_matrix(aklt):
    """Test that the solved N is proportional to σ_y."""
    N = solve_parity_matrix(aklt, -np.eye(3))
    ratio = N[0, 1] / SIGMA_Y[0, 1]

    assert np.allclose(N, ratio * SIGMA_Y)
    assert check_parity(aklt, -np.eye(3), N, 1).beta == -1


def test_parity_without_solution(aklt):
    """Test α(P) = -1 for AKLT."""
    with pytest.raises(NoSolution):
        solve_parity_matrix(aklt, -np.eye(3), alphaP=-1)


def test_aklt_time_reversal(aklt):
    """Test time reversal with v = -1 and M = σ_y."""
    M = solve_time_reversal_matrix(aklt, -np.eye(3))
    report = check_time_reversal(aklt, -np.eye(3), M)

    assert report.passed
    assert report.beta == -1


def test_parity_time_commutation(aklt):
    """Test that M N† M N† is a phase."""
    N = solve_parity_matrix(aklt, -np.eye(3))
    M = solve_time_reversal_matrix(aklt, -np.eye(3))
    report = check_parity_time_commutation(M, N)

    assert report.passed
    assert abs(report.phase) == pytest.approx(1.0)


def test_commutation_fails_for_non_commuting():
    """Test a pair whose commutator is not a phase."""
    M = np.kron(SIGMA_X, np.eye(2))
    N = np.kron(SIGMA_Z, SIGMA_X) + np.kron(np.eye(2), SIGMA_Z)

    assert not check_parity_time_commutation(M, N).passed


def test_infer_gamma_for_aklt():
    """Test the one-dimensional twist of σ_y on the 2~ irrep."""
    assert infer_gamma(SIGMA_Y, "Z2xZ2", AKLT_SECTORS) == "1_(0,1)"


def test_infer_gamma_without_twist():
    """Test a matrix that twists V* into no multiple of V."""
    with pytest.raises(NoIntertwiner):
        infer_gamma(np.diag([1.0, 2.0]), "Z2xZ2", AKLT_SECTORS)


def test_lgamma_and_block_form():
    """Test L_γ for AKLT and the block form of N."""
    L = compute_Lgamma("Z2xZ2", AKLT_SECTORS, "1_(0,1)")

    assert L.residual < 1e-9
    assert L.permutation == {"2~": "2~"}
    assert np.allclose(L.L.conj().T @ L.L, np.eye(2))

    N = solve_parity_matrix(aklt_mps(), -np.eye(3))
    block = check_block_form(N, L.L, AKLT_SECTORS)
    assert block.holds
    assert block.blocks["2~"].shape == (1, 1)


def test_lgamma_permutes_a4_sectors():
    """Test that conjugation swaps 2~_(1) and 2~_(2)."""
    sectors = [("2~_(0)", 1), ("2~_(1)", 1), ("2~_(2)", 1)]
    L = compute_Lgamma("A4", sectors, "1_(0)")

    assert L.permutation == {"2~_(0)": "2~_(0)", "2~_(1)": "2~_(2)", "2~_(2)": "2~_(1)"}


def test_lgamma_missing_partner():
    """Test a sector whose twisted conjugate is absent."""
    with pytest.raises(NoIntertwiner):
        compute_Lgamma("A4", [("2~_(1)", 1)], "1_(0)")
