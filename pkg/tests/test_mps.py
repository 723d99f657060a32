"""Tests for mps module."""

import numpy as np
import pytest
from spt_mbqc.errors import ClassMismatch, InvalidInput, LengthMismatch, MissingCG
from spt_mbqc.mps import (
    BoundaryVector,
    aklt_mps,
    build_mps,
    cluster_mps,
    evaluate_amplitude,
    load_mps_json,
    mps_to_dict,
    operator_schmidt_rank,
    parse_virtual_spec,
    protected_factorization,
    split_labels,
    transfer_matrix,
)
from spt_mbqc.output import write_json
from spt_mbqc.symmetry_checks import check_onsite_invariance, symmetry_action_for

A4_VIRTUAL = [("2~_(0)", 1), ("2~_(1)", 1), ("2~_(2)", 1)]


@pytest.fixture
def a4_mps():
    """Create a random A4-symmetric spin-1 chain."""
    return build_mps("A4", ["3"], "a", None, A4_VIRTUAL, "random", seed=3)


def test_aklt_amplitudes():
    """Test periodic AKLT amplitudes."""
    mps = aklt_mps()

    assert evaluate_amplitude(mps, [2, 2]) == pytest.approx(2.0)
    assert evaluate_amplitude(mps, [0, 1]) == pytest.approx(0.0)
    assert evaluate_amplitude(mps, [0, 1, 2]) == pytest.approx(2j)


def test_open_boundary_amplitude():
    """Test amplitudes with boundary vectors."""
    mps = aklt_mps()
    up = BoundaryVector.from_vector([1, 0])

    assert evaluate_amplitude(mps, [2], boundary=(up, up)) == pytest.approx(1.0)
    assert evaluate_amplitude(mps, [0], boundary=(up, up)) == pytest.approx(0.0)


def test_empty_configuration():
    """Test that empty configurations are rejected."""
    with pytest.raises(LengthMismatch):
        evaluate_amplitude(aklt_mps(), [])


def test_configuration_length_must_match_sites():
    """Test configurations on a chain with independent sites."""
    mps = build_mps("A4", ["3"], "a", None, A4_VIRTUAL, sites=3)

    with pytest.raises(LengthMismatch):
        evaluate_amplitude(mps, [0, 1])


def test_aklt_transfer_spectrum():
    """Test the AKLT transfer eigenvalues 3, -1, -1, -1."""
    values = np.sort(np.linalg.eigvals(transfer_matrix(aklt_mps().A)).real)

    assert np.allclose(values, [-1, -1, -1, 3])


def test_normalized_has_unit_radius():
    """Test transfer normalization."""
    T = aklt_mps().normalized().transfer_matrix()

    assert np.max(np.abs(np.linalg.eigvals(T))) == pytest.approx(1.0)


def test_gauge_transform_keeps_amplitudes():
    """Test that a gauge change leaves periodic amplitudes alone."""
    mps = aklt_mps()
    S = np.array([[2.0, 1.0], [0.5, 1.0]])
    moved = mps.gauge_transform(S)

    for config in ([0, 1, 2], [2, 2, 0, 0]):
        expected = evaluate_amplitude(mps, config)
        assert evaluate_amplitude(moved, config) == pytest.approx(expected)


def test_built_mps_is_symmetric(a4_mps):
    """Test the on-site condition for a random A4 build."""
    report = check_onsite_invariance(a4_mps, symmetry_action_for(a4_mps))

    assert report.passed
    assert a4_mps.phys_dim == 3
    assert a4_mps.bond_dim == 6
    assert a4_mps.basis_labels == ("x", "y", "z")


def test_reconstruction(a4_mps):
    """Test that the B/CG record rebuilds the tensors."""
    assert a4_mps.reconstruction_residual() < 1e-12


def test_aklt_has_no_record():
    """Test reconstructing a tensor-only MPS."""
    with pytest.raises(InvalidInput):
        aklt_mps().reconstruct()


def test_protected_factorization(a4_mps):
    """Test that the A4 build splits as junk ⊗ Pauli."""
    factorization = protected_factorization(a4_mps)

    assert factorization is not None
    assert set(factorization.paulis) == {"X", "Y", "Z"}
    assert factorization.residual < 1e-10
    assert factorization.junk[0].shape == (3, 3)


def test_z2xz2_degenerate_build():
    """Test a Z2xZ2 build with a degenerate virtual sector."""
    mps = build_mps("Z2xZ2", ["1_(1,0)", "1_(1,1)", "1_(0,1)"], "a", None, [("2~", 2)])

    assert mps.bond_dim == 4
    assert check_onsite_invariance(mps, symmetry_action_for(mps)).passed
    assert protected_factorization(mps) is not None


def test_dihedral_build():
    """Test a build over the D4 cover."""
    mps = build_mps("D4", ["2_(2)"], "a", None, [("2~_(1)", 1), ("2~_(3)", 1)])

    assert check_onsite_invariance(mps, symmetry_action_for(mps)).passed


def test_independent_sites():
    """Test that every site draws its own B blocks."""
    mps = build_mps("A4", ["3"], "a", None, A4_VIRTUAL, sites=3)

    assert mps.n_sites == 3
    assert not np.allclose(mps.site(0), mps.site(1))
    assert check_onsite_invariance(mps, symmetry_action_for(mps)).passed


def test_identity_blocks_match_explicit_mapping(a4_mps):
    """Test that explicit B blocks reproduce the identity build."""
    identity = build_mps("A4", ["3"], "a", None, A4_VIRTUAL, "identity")
    ones = {key: [[1.0]] for key in a4_mps.cgs}
    explicit = build_mps("A4", ["3"], "a", None, A4_VIRTUAL, ones)

    assert np.allclose(identity.tensors, explicit.tensors)


def test_missing_blocks_are_zero(a4_mps):
    """Test that unlisted B blocks default to zero."""
    mps = build_mps("A4", ["3"], "a", None, A4_VIRTUAL, {})

    assert np.allclose(mps.tensors, 0)


def test_block_without_cg():
    """Test that B blocks need a matching CG tensor."""
    with pytest.raises(MissingCG):
        blocks = {(0, "2~_(0)", "2~_(0)", 2): [[1.0]]}
        build_mps("A4", ["3"], "a", None, A4_VIRTUAL, blocks)


def test_virtual_class_mismatch():
    """Test that virtual irreps must carry the requested class."""
    with pytest.raises(ClassMismatch):
        build_mps("A4", ["3"], "a", None, [("3", 1)])


def test_physical_class_mismatch():
    """Test that physical irreps must be linear."""
    with pytest.raises(ClassMismatch):
        build_mps("A4", ["2~_(0)"], "a", None, A4_VIRTUAL)


def test_parse_virtual_spec():
    """Test parsing of virtual sector lists."""
    assert parse_virtual_spec("2~_(0):2,2~_(1)") == [("2~_(0)", 2), ("2~_(1)", 1)]
    assert split_labels("1_(1,0),1_(1,1), 1_(0,1)") == ["1_(1,0)", "1_(1,1)", "1_(0,1)"]


def test_bad_virtual_spec():
    """Test a non-integer degeneracy."""
    with pytest.raises(InvalidInput):
        parse_virtual_spec("2~:two")


def test_json_export(tmp_path, a4_mps):
    """Test writing and reading an MPS file."""
    path = write_json(mps_to_dict(a4_mps), tmp_path / "mps.json")
    loaded = load_mps_json(path)

    assert np.allclose(loaded.tensors, a4_mps.tensors)
    assert loaded.sectors == a4_mps.sectors
    assert loaded.group == "A4"
    assert set(loaded.blocks[0]) == set(a4_mps.blocks[0])


def test_operator_schmidt_rank():
    """Test operator Schmidt ranks across the junk/qubit cut."""
    A = np.kron(np.diag([1.0, 2.0]), np.array([[0, 1], [1, 0]]))
    swap = np.eye(4)[[0, 2, 1, 3]]

    assert operator_schmidt_rank(A, 2, 2) == 1
    assert operator_schmidt_rank(swap, 2, 2) == 4


def test_cluster_tensors():
    """Test the cluster-state tensors."""
    mps = cluster_mps()

    assert mps.phys_dim == 2
    assert evaluate_amplitude(mps, [0, 0]) == pytest.approx(1.0)


BUILDS = {
    "Z2xZ2": (["1_(1,0)", "1_(1,1)", "1_(0,1)"], [("2~", 2)]),
    "A4": (["3"], A4_VIRTUAL),
    "S4": (["3_(1)"], [("2~_(0)", 1), ("2~_(1)", 1), ("4~", 1)]),
}


@pytest.mark.slow
@pytest.mark.parametrize("group", sorted(BUILDS))
def test_random_builds_are_symmetric(group):
    """Test the on-site residual of random builds over 100 seeds."""
    phys, virtual = BUILDS[group]
    for seed in range(100):
        mps = build_mps(group, phys, "a", None, virtual, "random", seed=seed)

        assert check_onsite_invariance(mps, symmetry_action_for(mps)).residual < 1e-12
        assert protected_factorization(mps) is not None


def test_a4_junk_blocks_rotate_with_cube_roots():
    """Test B_i = V^(i-1) B V^*(i-1) with V = diag(1, ω, ω*) on the A4 sectors."""
    mps = build_mps("A4", ["3"], "a", None, A4_VIRTUAL, "random", seed=7)
    junk = protected_factorization(mps).junk

    # ratios cancel the per-block CG phases and keep V^k ⊗ V^*k
    first = junk[1] / junk[0]
    first = first / first[0, 0]
    x = first[:, 0]
    assert np.allclose(np.abs(first), 1.0, atol=1e-10)
    assert np.allclose(first, np.outer(x, x.conj()), atol=1e-10)
    roots = sorted(np.angle(x / x[0]) % (2 * np.pi))
    assert np.allclose(roots, [0.0, 2 * np.pi / 3, 4 * np.pi / 3], atol=1e-10)

    second = junk[2] / junk[0]
    second = second / second[0, 0]
    assert np.allclose(second, first**2, atol=1e-10)


def test_s4_junk_blocks_separate_the_two_doublets():
    """Test the vanishing 2~_(0)/2~_(1) blocks of the S4 spin-1 form."""
    phys, virtual = BUILDS["S4"]
    mps = build_mps("S4", phys, "a", None, virtual, "random", seed=2)
    factorization = protected_factorization(mps)

    assert factorization.residual < 1e-10
    for B in factorization.junk:
        assert B.shape == (4, 4)
        assert abs(B[0, 1]) < 1e-12
        assert abs(B[1, 0]) < 1e-12
        assert abs(B[0, 0]) > 1e-6
        assert np.max(np.abs(B[2:, :2])) > 1e-6


@pytest.mark.parametrize("seed", range(5))
def test_dihedral_build_does_not_factor(seed):
    """Test that no 1 ⊗ W basis change splits the D4 tensors as junk ⊗ Pauli."""
    virtual = [("2~_(1)", 1), ("2~_(3)", 1)]
    mps = build_mps("D4", ["2_(2)"], "a", None, virtual, seed=seed)

    assert protected_factorization(mps) is None
    assert max(operator_schmidt_rank(A, 2, 2) for A in mps.A) > 1


def test_gauge_change_keeps_onsite_residual(a4_mps):
    """Test that S⁻¹ A S with S⁻¹ V S leaves the on-site residual unchanged."""
    rng = np.random.default_rng(11)
    S = np.eye(6) + 0.2 * (rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    sym = symmetry_action_for(a4_mps)
    before = check_onsite_invariance(a4_mps, sym).residual
    moved = a4_mps.gauge_transform(S)
    after = check_onsite_invariance(moved, sym.gauge_transform(S)).residual

    assert before < 1e-12
    assert after == pytest.approx(before, abs=1e-11)
