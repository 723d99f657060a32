"""On-site, parity and time-reversal conditions on MPS tensors.

All checks work on the tensors of a single site and report residuals; the
solvers find the virtual matrices (V, N, M, L_γ) from null spaces of the
corresponding linear conditions.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from .config import DEFAULTS, Defaults
from .errors import (
    DimensionMismatch,
    InvalidInput,
    NoIntertwiner,
    NoSolution,
    NonInjectiveMPS,
    NotSymmetricOrAntisymmetric,
)
from .groups import GroupBundle, resolve_group
from .mps import BondSector, SymmetricMPS, transfer_matrix
from .numerics import gauge_fix, max_abs, rng_for, sorted_eig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParityData:
    w: np.ndarray
    N: np.ndarray
    alpha: int
    beta: int


@dataclass(frozen=True)
class TimeReversalData:
    v: np.ndarray
    M: np.ndarray
    beta: int


@dataclass(frozen=True, eq=False)
class SymmetryAction:
    """Physical u(g), virtual V(g) and phase χ(g) on the group generators."""

    group: str
    generators: Tuple[str, ...]
    u: Dict[str, np.ndarray]
    V: Dict[str, np.ndarray]
    chi: Dict[str, complex]
    parity: Optional[ParityData] = None
    time_reversal: Optional[TimeReversalData] = None
    commutation: Dict[str, np.ndarray] = field(default_factory=dict)

    def gauge_transform(self, S: np.ndarray) -> "SymmetryAction":
        """V(g) → S⁻¹ V(g) S, matching SymmetricMPS.gauge_transform."""
        S_inv = np.linalg.inv(S)
        return replace(self, V={g: S_inv @ V @ S for g, V in self.V.items()})


def _sectors(
    bundle: GroupBundle, virtual_spec: Sequence[Union[BondSector, Tuple[str, int]]]
) -> Tuple[BondSector, ...]:
    sectors = []
    for item in virtual_spec:
        if isinstance(item, BondSector):
            sectors.append(item)
        else:
            label, degeneracy = item
            sectors.append(BondSector(label, int(degeneracy), bundle.irrep(label).dim))
    return tuple(sectors)


def virtual_matrices(
    bundle: GroupBundle, virtual_spec: Sequence[Union[BondSector, Tuple[str, int]]]
) -> np.ndarray:
    """Stack (|G|, D, D) of ⊕_a 1_(n_a) ⊗ D_a(g) over every group element."""
    sectors = _sectors(bundle, virtual_spec)
    parts = []
    for sector in sectors:
        rep = bundle.irrep(sector.label)
        eye = np.eye(sector.degeneracy)
        parts.append(np.einsum("ab,gij->gaibj", eye, rep.matrices).reshape(
            bundle.table.order, sector.size, sector.size
        ))
    return np.stack(
        [
            scipy.linalg.block_diag(*(part[g] for part in parts))
            for g in range(bundle.table.order)
        ]
    )


def symmetry_action(
    group: Union[str, GroupBundle],
    phys_irreps: Sequence[str],
    virtual_spec: Sequence[Union[BondSector, Tuple[str, int]]],
    chi: Optional[str] = None,
) -> SymmetryAction:
    """Generator matrices u(g) = ⊕ D_i(g), V(g) and χ(g) for a build."""
    bundle = group if isinstance(group, GroupBundle) else resolve_group(group)
    table = bundle.table
    V_all = virtual_matrices(bundle, virtual_spec)
    phys = [bundle.irrep(label) for label in phys_irreps]
    chi_rep = bundle.irrep(chi) if chi else None
    u, V, phases = {}, {}, {}
    for name, element in table.generators:
        u[name] = scipy.linalg.block_diag(*(rep(element) for rep in phys))
        V[name] = V_all[element]
        if chi_rep is not None:
            phases[name] = complex(chi_rep(element)[0, 0])
        else:
            phases[name] = 1.0 + 0j
    return SymmetryAction(
        group=bundle.name,
        generators=table.generator_names,
        u=u,
        V=V,
        chi=phases,
    )


def symmetry_action_for(mps: SymmetricMPS) -> SymmetryAction:
    """The symmetry action a built MPS was constructed with."""
    if mps.group is None or not mps.sectors:
        raise InvalidInput("This MPS has no group or virtual sector record")
    return symmetry_action(mps.group, mps.phys_irreps, mps.sectors, mps.chi_label)


# --- on-site symmetry --------------------------------------------------------


@dataclass(frozen=True)
class OnsiteReport:
    residual: float
    per_generator: Dict[str, float]
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual < self.tol


def onsite_residual(A: np.ndarray, u: np.ndarray, V: np.ndarray, chi: complex) -> float:
    """max_i |Σ_j u_ij A^j − χ V⁻¹ A^i V|."""
    lhs = np.einsum("ij,jab->iab", u, A)
    rhs = chi * np.linalg.inv(V) @ A @ V
    return max_abs(lhs - rhs)


def check_onsite_invariance(
    mps: SymmetricMPS, sym: SymmetryAction, tol: float = DEFAULTS.mps_tol
) -> OnsiteReport:
    """Residual of the on-site symmetry condition, max over generators and sites."""
    per_generator = {}
    for g in sym.generators:
        u, V = sym.u[g], sym.V[g]
        phys_shape, bond_shape = (mps.phys_dim,) * 2, (mps.bond_dim,) * 2
        if u.shape != phys_shape or V.shape != bond_shape:
            raise DimensionMismatch(
                f"Generator {g}: u is {u.shape}, V is {V.shape}, "
                f"MPS has d={mps.phys_dim}, D={mps.bond_dim}"
            )
        per_generator[g] = max(
            onsite_residual(mps.site(k), u, V, sym.chi[g]) for k in range(mps.n_sites)
        )
    return OnsiteReport(
        residual=max(per_generator.values()), per_generator=per_generator, tol=tol
    )


@dataclass(frozen=True)
class VirtualRep:
    """Virtual matrices recovered from the tensors, one per generator."""

    V: Dict[str, np.ndarray]
    chi: Dict[str, complex]
    residual: float
    gap: float


def _require_uniform(mps: SymmetricMPS) -> np.ndarray:
    if not mps.translation_invariant:
        raise InvalidInput("This check needs a translation-invariant MPS")
    return mps.A


def extract_virtual_rep(
    mps: SymmetricMPS, u: Dict[str, np.ndarray], defaults: Defaults = DEFAULTS
) -> VirtualRep:
    """Solve Σ_j u_ij A^j = χ V⁻¹ A^i V for V and χ, one generator at a time.

    The right fixed point ρ of the transfer map and the dominant eigenvector
    X of the mixed transfer map built from Σ_j u_ij A^j give V ∝ ρ X⁻¹, and
    the ratio of the two dominant eigenvalues is χ.

    Args:
        mps: Injective translation-invariant MPS
        u: Physical matrices keyed by generator name
        defaults: Gap threshold and acceptance tolerance

    Returns:
        VirtualRep with V normalized to a unitary (fixed phase) per generator
    """
    A = _require_uniform(mps)
    D = mps.bond_dim
    values, vectors = sorted_eig(transfer_matrix(A))
    lead = values[0]
    if len(values) < 2:
        gap = float("inf")
    else:
        gap = float((abs(values[0]) - abs(values[1])) / abs(lead))
    if gap <= defaults.transfer_gap:
        raise NonInjectiveMPS(
            f"Leading transfer eigenvalue is not isolated (relative gap {gap:.3g})"
        )
    rho = vectors[:, 0].reshape(D, D)
    if np.linalg.cond(rho) > 1.0 / defaults.extract_tol:
        raise NonInjectiveMPS("Transfer fixed point is singular")

    V, chi, worst = {}, {}, 0.0
    for name, u_g in u.items():
        u_g = np.asarray(u_g, dtype=complex)
        if u_g.shape != (mps.phys_dim, mps.phys_dim):
            raise DimensionMismatch(f"u({name}) must be {mps.phys_dim}x{mps.phys_dim}")
        rotated = np.einsum("ij,jab->iab", u_g, A)
        mixed_values, mixed_vectors = sorted_eig(transfer_matrix(rotated, A))
        if abs(abs(mixed_values[0]) - abs(lead)) > defaults.extract_tol * abs(lead):
            raise NoSolution(
                f"Generator {name} is not a symmetry: mixed transfer radius "
                f"{abs(mixed_values[0]):.6g} vs {abs(lead):.6g}"
            )
        X = mixed_vectors[:, 0].reshape(D, D)
        V_g = rho @ np.linalg.inv(X)
        V_g = V_g * np.sqrt(D) / np.linalg.norm(V_g)
        V_g, _ = gauge_fix(V_g)
        chi_g = complex(mixed_values[0] / lead)
        residual = onsite_residual(A, u_g, V_g, chi_g)
        if residual > defaults.extract_tol:
            raise NoSolution(f"Recovered V({name}) leaves residual {residual:.3g}")
        V[name], chi[name] = V_g, chi_g
        worst = max(worst, residual)
        logger.debug(
            "Extracted V(%s) with chi=%s, residual %.3g", name, chi_g, residual
        )
    return VirtualRep(V=V, chi=chi, residual=worst, gap=gap)


# --- parity and time reversal ------------------------------------------------


def _null_vector(system: np.ndarray, D: int, what: str) -> np.ndarray:
    basis = scipy.linalg.null_space(system, rcond=1e-10)
    if basis.shape[1] == 0:
        raise NoSolution(f"No {what} satisfies the condition")
    if basis.shape[1] > 1:
        logger.debug(
            "%s solution space has dimension %d; taking the first",
            what,
            basis.shape[1],
        )
    X = basis[:, 0].reshape(D, D)
    X = X * np.sqrt(D) / np.linalg.norm(X)
    return gauge_fix(X)[0]


def _transpose_sign(N: np.ndarray, tol: float, what: str) -> int:
    if max_abs(N.T - N) < tol:
        return 1
    if max_abs(N.T + N) < tol:
        return -1
    raise NotSymmetricOrAntisymmetric(f"{what} is neither symmetric nor antisymmetric")


def _conjugate_sign(M: np.ndarray, tol: float) -> int:
    M = M * np.sqrt(M.shape[0]) / np.linalg.norm(M)
    product = M @ M.conj()
    eye = np.eye(M.shape[0])
    if max_abs(product - eye) < tol:
        return 1
    if max_abs(product + eye) < tol:
        return -1
    raise NotSymmetricOrAntisymmetric("M M* is not ±identity")


@dataclass(frozen=True)
class ParityReport:
    residual: float
    alpha: int
    beta: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual < self.tol


@dataclass(frozen=True)
class TimeReversalReport:
    residual: float
    beta: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual < self.tol


def parity_residual(A: np.ndarray, w: np.ndarray, N: np.ndarray, alpha: int) -> float:
    """max_i |Σ_j w_ij (A^j)^T − α N⁻¹ A^i N|."""
    lhs = np.einsum("ij,jba->iab", w, A)
    rhs = alpha * np.linalg.inv(N) @ A @ N
    return max_abs(lhs - rhs)


def check_parity(
    mps: SymmetricMPS,
    w: np.ndarray,
    N: np.ndarray,
    alphaP: int,
    tol: float = DEFAULTS.symmetric_tol,
) -> ParityReport:
    """Parity condition residual and β(P) from N^T = β(P) N."""
    A = _require_uniform(mps)
    w, N = np.asarray(w, dtype=complex), np.asarray(N, dtype=complex)
    bond_shape, phys_shape = (mps.bond_dim,) * 2, (mps.phys_dim,) * 2
    if N.shape != bond_shape or w.shape != phys_shape:
        raise DimensionMismatch("w or N does not match the MPS dimensions")
    beta = _transpose_sign(N, tol, "N")
    return ParityReport(
        residual=parity_residual(A, w, N, alphaP), alpha=alphaP, beta=beta, tol=tol
    )


def solve_parity_matrix(
    mps: SymmetricMPS, w: np.ndarray, alphaP: int = 1
) -> np.ndarray:
    """N with N (Σ_j w_ij (A^j)^T) = α A^i N for every i, normalized to √D."""
    A = _require_uniform(mps)
    D = mps.bond_dim
    eye = np.eye(D)
    rows = []
    for i in range(mps.phys_dim):
        X_i = np.einsum("j,jba->ab", np.asarray(w)[i], A)
        rows.append(np.kron(eye, X_i.T) - alphaP * np.kron(A[i], eye))
    return _null_vector(np.vstack(rows), D, "parity matrix N")


def check_time_reversal(
    mps: SymmetricMPS, v: np.ndarray, M: np.ndarray, tol: float = DEFAULTS.symmetric_tol
) -> TimeReversalReport:
    """Residual of Σ_j v_ij (A^j)* = M⁻¹ A^i M and β(T) from M M* = β(T) 1."""
    A = _require_uniform(mps)
    v, M = np.asarray(v, dtype=complex), np.asarray(M, dtype=complex)
    bond_shape, phys_shape = (mps.bond_dim,) * 2, (mps.phys_dim,) * 2
    if M.shape != bond_shape or v.shape != phys_shape:
        raise DimensionMismatch("v or M does not match the MPS dimensions")
    beta = _conjugate_sign(M, tol)
    lhs = np.einsum("ij,jab->iab", v, A.conj())
    rhs = np.linalg.inv(M) @ A @ M
    return TimeReversalReport(residual=max_abs(lhs - rhs), beta=beta, tol=tol)


def solve_time_reversal_matrix(mps: SymmetricMPS, v: np.ndarray) -> np.ndarray:
    """M with M (Σ_j v_ij (A^j)*) = A^i M for every i, normalized to √D."""
    A = _require_uniform(mps)
    D = mps.bond_dim
    eye = np.eye(D)
    rows = []
    for i in range(mps.phys_dim):
        Y_i = np.einsum("j,jab->ab", np.asarray(v)[i], A.conj())
        rows.append(np.kron(eye, Y_i.T) - np.kron(A[i], eye))
    return _null_vector(np.vstack(rows), D, "time-reversal matrix M")


@dataclass(frozen=True)
class CommutationReport:
    phase: complex
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual < self.tol


def check_parity_time_commutation(
    M: np.ndarray, N: np.ndarray, tol: float = DEFAULTS.intertwiner_tol
) -> CommutationReport:
    """M N† M N† must be a unit-modulus multiple of the identity."""
    D = M.shape[0]
    M = M * np.sqrt(D) / np.linalg.norm(M)
    N = N * np.sqrt(D) / np.linalg.norm(N)
    product = M @ N.conj().T @ M @ N.conj().T
    phase = complex(np.trace(product) / D)
    residual = max(max_abs(product - phase * np.eye(D)), abs(abs(phase) - 1.0))
    return CommutationReport(phase=phase, residual=residual, tol=tol)


# --- L_gamma and block forms --------------------------------------------------


@dataclass(frozen=True)
class LGamma:
    """Unitary L with γ(g) V(g)* = L V(g) L⁻¹ and the induced block permutation."""

    L: np.ndarray
    gamma: str
    permutation: Dict[str, str]
    residual: float


def compute_Lgamma(
    group: Union[str, GroupBundle],
    virtual_spec: Sequence[Union[BondSector, Tuple[str, int]]],
    gamma: str,
    seed: int = 0,
    tol: float = DEFAULTS.intertwiner_tol,
) -> LGamma:
    """Intertwiner from V to γ·V* on a reduced virtual representation.

    Args:
        group: Built-in group name or bundle
        virtual_spec: Sectors of V
        gamma: Label of a one-dimensional irrep
        seed: Seed of the combination drawn from a multi-dimensional solution space
        tol: Acceptance tolerance for the intertwining residual

    Returns:
        LGamma with the unitary L and the map α ↦ p(α) on sector labels
    """
    bundle = group if isinstance(group, GroupBundle) else resolve_group(group)
    sectors = _sectors(bundle, virtual_spec)
    gamma_rep = bundle.irrep(gamma)
    if gamma_rep.dim != 1:
        raise InvalidInput(f"γ must be one-dimensional, got {gamma}")
    labels = [s.label for s in sectors]

    permutation = {}
    for sector in sectors:
        rep = bundle.irrep(sector.label)
        twisted = gamma_rep.character * rep.character.conj()
        target = None
        for candidate in labels:
            if max_abs(bundle.irrep(candidate).character - twisted) < 1e-8:
                target = candidate
                break
        if target is None:
            raise NoIntertwiner(
                f"{gamma} x {sector.label}* is not among the virtual sectors"
            )
        permutation[sector.label] = target

    V_all = virtual_matrices(bundle, sectors)
    D = V_all.shape[1]
    eye = np.eye(D)
    rows = []
    for _, element in bundle.table.generators:
        V = V_all[element]
        g = gamma_rep(element)[0, 0]
        rows.append(np.kron(eye, V.T) - g * np.kron(V.conj(), eye))
    basis = scipy.linalg.null_space(np.vstack(rows), rcond=1e-10)
    if basis.shape[1] == 0:
        raise NoIntertwiner(f"{gamma} V* is not equivalent to V")
    coeffs = rng_for(seed, basis.shape[1]).normal(size=basis.shape[1])
    L = (basis @ coeffs).reshape(D, D)
    L, _ = scipy.linalg.polar(L)
    L = gauge_fix(L)[0]

    residual = 0.0
    for _, element in bundle.table.generators:
        V = V_all[element]
        g = gamma_rep(element)[0, 0]
        residual = max(residual, max_abs(g * V.conj() - L @ V @ L.conj().T))
    if residual > tol:
        raise NoIntertwiner(f"L_gamma residual {residual:.3g} exceeds {tol}")
    return LGamma(L=L, gamma=gamma, permutation=permutation, residual=residual)


def infer_gamma(
    X: np.ndarray,
    group: Union[str, GroupBundle],
    virtual_spec: Sequence[Union[BondSector, Tuple[str, int]]],
    tol: float = DEFAULTS.intertwiner_tol,
) -> str:
    """One-dimensional γ with X V(g)* X⁻¹ = conj(γ(g)) V(g) on every generator."""
    bundle = group if isinstance(group, GroupBundle) else resolve_group(group)
    V_all = virtual_matrices(bundle, virtual_spec)
    X = np.asarray(X, dtype=complex)
    if X.shape != V_all.shape[1:]:
        raise DimensionMismatch(f"X must be {V_all.shape[1]}x{V_all.shape[2]}")
    X_inv = np.linalg.inv(X)
    for gamma in bundle.one_dimensional():
        residual = max(
            max_abs(X @ V_all[e].conj() @ X_inv - np.conj(gamma(e)[0, 0]) * V_all[e])
            for _, e in bundle.table.generators
        )
        if residual < tol:
            return gamma.label
    raise NoIntertwiner("X does not twist V* into V by any one-dimensional irrep")


@dataclass(frozen=True)
class BlockFormReport:
    holds: bool
    blocks: Dict[str, np.ndarray]
    residual: float


def check_block_form(
    X: np.ndarray,
    L: np.ndarray,
    virtual_spec: Sequence[BondSector],
    tol: float = DEFAULTS.block_form_tol,
) -> BlockFormReport:
    """Whether X·L equals ⊕_α (X_α ⊗ 1_α), returning the X_α."""
    Y = np.asarray(X) @ np.asarray(L)
    D = sum(s.size for s in virtual_spec)
    if Y.shape != (D, D):
        raise DimensionMismatch(f"X·L is {Y.shape}, virtual space has dimension {D}")
    blocks, rebuilt, offset = {}, [], 0
    for sector in virtual_spec:
        sub = Y[offset : offset + sector.size, offset : offset + sector.size]
        shape = (sector.degeneracy, sector.dim, sector.degeneracy, sector.dim)
        X_a = np.einsum("imjm->ij", sub.reshape(shape)) / sector.dim
        blocks[sector.label] = X_a
        rebuilt.append(np.kron(X_a, np.eye(sector.dim)))
        offset += sector.size
    residual = max_abs(Y - scipy.linalg.block_diag(*rebuilt))
    return BlockFormReport(holds=residual < tol, blocks=blocks, residual=residual)

