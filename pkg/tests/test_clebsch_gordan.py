"""Tests for clebsch_gordan module."""

import numpy as np
import pytest
from spt_mbqc.clebsch_gordan import (
    average_intertwiner,
    cg_table,
    cg_to_dict,
    compute_cg,
    find_cg,
    full_stack_defect,
    product_matrices,
    verify_cg,
)
from spt_mbqc.errors import DimensionMismatch
from spt_mbqc.groups import load_builtin


@pytest.fixture
def a4():
    """Create the A4 bundle."""
    return load_builtin("A4")


@pytest.fixture
def s4():
    """Create the S4 bundle."""
    return load_builtin("S4")


def test_a4_blocks_intertwine(a4):
    """Test that every A4 block intertwines and is orthonormal."""
    i, alpha = a4.irrep("3"), a4.irrep("2~_(0)")
    cgs = compute_cg(i, alpha, a4.irreps_of_class("a"))

    assert [cg.beta_label for cg in cgs] == ["2~_(0)", "2~_(1)", "2~_(2)"]
    for cg in cgs:
        report = verify_cg(cg, i, alpha, a4.irrep(cg.beta_label))
        assert report.passed
        assert cg.coeffs.shape == (6, 2)


def test_full_stack_is_unitary(a4):
    """Test that the blocks of i ⊗ α stack into a unitary."""
    cgs = cg_table("A4", "3", "2~_(1)")

    assert full_stack_defect(cgs) < 1e-9


def test_multiplicity_two_copies_orthogonal(s4):
    """Test the two copies of 4~ in 3_(1) ⊗ 4~."""
    i, alpha = s4.irrep("3_(1)"), s4.irrep("4~")
    cgs = compute_cg(i, alpha, s4.irreps_of_class("a"))
    copies = find_cg(cgs, "4~")

    assert [cg.copy_index for cg in copies] == [1, 2]
    overlap = copies[0].coeffs.conj().T @ copies[1].coeffs
    assert np.max(np.abs(overlap)) < 1e-9
    assert full_stack_defect(cgs) < 1e-9


def test_phase_convention(a4):
    """Test that the largest entry of every block is real positive."""
    for cg in cg_table("A4", "3", "2~_(0)"):
        flat = cg.coeffs.ravel()
        magnitudes = np.abs(flat)
        pivot = flat[np.flatnonzero(magnitudes >= magnitudes.max() - 1e-9)[0]]
        assert abs(pivot.imag) < 1e-12
        assert pivot.real > 0


def test_same_seed_same_blocks(a4):
    """Test that a fixed seed reproduces the coefficients."""
    i, alpha = a4.irrep("3"), a4.irrep("2~_(2)")
    candidates = a4.irreps_of_class("a")
    first = compute_cg(i, alpha, candidates, rng_seed=7)
    second = compute_cg(i, alpha, candidates, rng_seed=7)

    for a, b in zip(first, second):
        assert np.array_equal(a.coeffs, b.coeffs)


def test_block_slices(a4):
    """Test the per-component slices of a block."""
    cg = cg_table("A4", "3", "2~_(0)")[0]

    assert cg.block(0).shape == (2, 2)
    assert np.allclose(np.vstack([cg.block(m) for m in range(3)]), cg.coeffs)


def test_average_intertwiner_shapes(a4):
    """Test shape validation of the averaging sum."""
    Dprime = product_matrices(a4.irrep("3"), a4.irrep("2~_(0)"))
    D = a4.irrep("2~_(0)").matrices

    assert average_intertwiner(Dprime, D, np.ones((6, 2))).shape == (6, 2)
    with pytest.raises(DimensionMismatch):
        average_intertwiner(Dprime, D, np.ones((2, 6)))


def test_verify_rejects_mismatched_labels(a4):
    """Test that verification checks the labels."""
    cg = cg_table("A4", "3", "2~_(0)")[0]

    with pytest.raises(DimensionMismatch):
        verify_cg(cg, a4.irrep("3"), a4.irrep("2~_(1)"), a4.irrep("2~_(0)"))


def test_cg_to_dict(a4):
    """Test the exported CG table."""
    data = cg_to_dict(cg_table("A4", "3", "2~_(0)"))

    assert data["i"] == "3"
    assert data["alpha"] == "2~_(0)"
    assert len(data["blocks"]) == 3
    assert data["blocks"][0]["n"] == 1
