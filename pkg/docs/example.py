"""Example usage of the spt_mbqc library."""

import numpy as np

from spt_mbqc.clebsch_gordan import cg_table, full_stack_defect
from spt_mbqc.hamiltonian import aklt_region, hamiltonian
from spt_mbqc.itebd import energy_density, fidelity_per_site, itebd_ground_state
from spt_mbqc.mbqc import compile_rotation, euler_zxz, identity_protection_test
from spt_mbqc.mps import aklt_mps, build_mps, protected_factorization
from spt_mbqc.symmetry_checks import (
    check_onsite_invariance,
    check_parity,
    solve_parity_matrix,
    symmetry_action_for,
)
from spt_mbqc.ui import TerminalUI


def main():
    """Example workflow."""
    ui = TerminalUI()

    # 1. CG blocks of 3 ⊗ 2~_(0) for A4
    cgs = cg_table("A4", "3", "2~_(0)")
    ui.display_info(f"{len(cgs)} CG blocks, stack defect {full_stack_defect(cgs):.1e}")

    # 2. A random A4-symmetric spin-1 chain
    virtual = [("2~_(0)", 1), ("2~_(1)", 1), ("2~_(2)", 1)]
    mps = build_mps("A4", ["3"], "a", None, virtual, seed=1)
    onsite = check_onsite_invariance(mps, symmetry_action_for(mps))
    ui.display_info(f"On-site residual {onsite.residual:.1e}")
    factorization = protected_factorization(mps)
    if factorization is not None:
        ui.display_info(f"Tensors split as junk ⊗ {''.join(factorization.paulis)}")

    # 3. Parity of the AKLT chain
    aklt = aklt_mps()
    N = solve_parity_matrix(aklt, -np.eye(3))
    parity = check_parity(aklt, -np.eye(3), N, 1)
    ui.display_info(f"AKLT β(P) = {parity.beta}")

    # 4. An Euler rotation by measurements on the AKLT chain
    rotation = compile_rotation("aklt", euler_zxz(0.4, 1.3, -2.2), seed=3)
    ui.display_transcript(rotation.transcript)
    ui.display_success(
        f"Fidelity {rotation.fidelity:.12f}, byproduct {rotation.byproduct}"
    )

    # 5. The protected qubit survives Pauli measurements on an S4 chain
    report = identity_protection_test("S4", n_sites=6)
    ui.display_info(f"S4 identity protection passed: {report.passed}")

    # 6. Ground state at one (λ, μ)
    lam, mu = 0.2, 0.1
    H = hamiltonian(lam, mu)
    with ui.spinner("Running iTEBD..."):
        state = itebd_ground_state(H, chi=8, schedule=[(0.1, 1000), (0.01, 500)])
    ui.display_report(
        H.label,
        [
            ("energy per site", energy_density(state, H)),
            ("fidelity per site", fidelity_per_site(state, aklt)),
            ("inside AKLT region", aklt_region(lam, mu)),
        ],
    )


if __name__ == "__main__":
    main()
