"""Imaginary-time iTEBD on a two-site unit cell.

The chain is ... λ_B Γ_A λ_A Γ_B λ_B ...; the state keeps the right-canonical
tensors B_A = Γ_A λ_A and B_B = Γ_B λ_B so gate updates never divide by
singular values. Γ_A and Γ_B are available as derived properties.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from .config import DEFAULTS, Defaults
from .errors import (
    DegenerateDominantEigenvalue,
    InvalidInput,
    NoConvergence,
    NonCanonical,
)
from .hamiltonian import TwoSiteOperator
from .mps import SymmetricMPS, transfer_matrix
from .numerics import magnitude_gap, max_abs, rng_for, sorted_eig, unit_disk

logger = logging.getLogger(__name__)


def _safe_inverse(values: np.ndarray) -> np.ndarray:
    inverse = np.zeros_like(values)
    nonzero = values > 0
    inverse[nonzero] = 1.0 / values[nonzero]
    return inverse


@dataclass
class ITEBDState:
    """Two-site Vidal state with its convergence log.

    Attributes:
        b_a: B_A = Γ_A λ_A, shape (d, χ_B, χ_A)
        lam_a: Singular values on the A→B bond
        b_b: B_B = Γ_B λ_B, shape (d, χ_A, χ_B)
        lam_b: Singular values on the B→A bond
        log: One entry per energy check (stage, dt, step, energy, drift)
        converged: Set by :func:`itebd_ground_state`
    """

    b_a: np.ndarray
    lam_a: np.ndarray
    b_b: np.ndarray
    lam_b: np.ndarray
    log: List[Dict[str, Any]] = field(default_factory=list)
    converged: bool = False

    @property
    def phys_dim(self) -> int:
        return self.b_a.shape[0]

    @property
    def chi(self) -> int:
        return max(len(self.lam_a), len(self.lam_b))

    @property
    def gamma_a(self) -> np.ndarray:
        return self.b_a * _safe_inverse(self.lam_a)[None, None, :]

    @property
    def gamma_b(self) -> np.ndarray:
        return self.b_b * _safe_inverse(self.lam_b)[None, None, :]

    def cell(self) -> np.ndarray:
        """Two-site cell tensor B_A B_B with a (d·d)-valued physical index."""
        d = self.phys_dim
        cell = np.einsum("iab,jbc->ijac", self.b_a, self.b_b)
        return cell.reshape(d * d, cell.shape[2], cell.shape[3])

    @classmethod
    def from_uniform(cls, A: np.ndarray, chi: Optional[int] = None) -> "ITEBDState":
        """Canonical two-site state of the translation-invariant MPS ``A``."""
        A = np.asarray(A, dtype=complex)
        if A.ndim != 3 or A.shape[1] != A.shape[2]:
            raise InvalidInput(f"Expected a (d, D, D) tensor, got shape {A.shape}")
        D = A.shape[1]
        ones = np.ones(D) / np.sqrt(D)
        return canonicalize(cls(A, ones, A.copy(), ones), chi=chi)

    @classmethod
    def random(cls, d: int, chi: int, seed: int = DEFAULTS.itebd_seed) -> "ITEBDState":
        """Canonicalized random state with bond dimension ``chi``."""
        A = unit_disk(rng_for(seed, d, chi), (d, chi, chi))
        return cls.from_uniform(A, chi=chi)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "chi": self.chi,
            "lambda_a": self.lam_a,
            "lambda_b": self.lam_b,
            "converged": self.converged,
            "log": self.log,
        }


def _dominant_fixed_points(
    T: np.ndarray,
) -> Tuple[complex, np.ndarray, np.ndarray]:
    """Dominant eigenvalue with right and left fixed points as Hermitian PSD."""
    D = T.shape[1]
    values, lvecs, rvecs = sorted_eig(transfer_matrix(T), left=True)

    def positive(vector: np.ndarray) -> np.ndarray:
        matrix = vector.reshape(D, D)
        matrix = matrix / (np.trace(matrix) / abs(np.trace(matrix)))
        return (matrix + matrix.conj().T) / 2

    return values[0], positive(rvecs[:, 0]), positive(lvecs[:, 0])


def _psd_factor(matrix: np.ndarray, cutoff: float) -> Tuple[np.ndarray, np.ndarray]:
    """Columns U√w of the retained part of ``matrix`` and their eigenvalues."""
    w, U = scipy.linalg.eigh(matrix)
    keep = w > cutoff * w.max()
    return U[:, keep], w[keep]


def canonicalize(
    state: ITEBDState, chi: Optional[int] = None, cutoff: float = DEFAULTS.svd_cutoff
) -> ITEBDState:
    """Bring ``state`` to Vidal canonical form.

    The two-site cell is canonicalized as a single-site infinite MPS from its
    dominant transfer fixed points, then split back into A and B by an SVD
    truncated to ``chi`` (all weights above ``cutoff`` when ``chi`` is None).
    """
    d = state.phys_dim
    T = state.cell()
    eta, R, L = _dominant_fixed_points(T)
    T = T / np.sqrt(abs(eta))

    UR, wR = _psd_factor(R, cutoff)
    UL, wL = _psd_factor(L, cutoff)
    X, X_inv = UR * np.sqrt(wR), (UR / np.sqrt(wR)).conj().T
    Y, Y_inv = np.sqrt(wL)[:, None] * UL.conj().T, UL / np.sqrt(wL)
    U, S, Vh = scipy.linalg.svd(Y @ X)
    keep = int(np.count_nonzero(S > cutoff * S[0]))
    U, S, Vh = U[:, :keep], S[:keep], Vh[:keep]
    S = S / np.linalg.norm(S)

    P = np.einsum("ab,sbc,cd,de->sae", Vh @ X_inv, T, Y_inv @ U, np.diag(S))
    norm = np.trace(np.einsum("sab,scb->ac", P, P.conj())).real / keep
    P = P / np.sqrt(norm)

    P = P.reshape(d, d, keep, keep)
    theta = np.einsum("a,ijab->iajb", S, P).reshape(d * keep, d * keep)
    _, values, Wh = scipy.linalg.svd(theta, full_matrices=False)
    rank = int(np.count_nonzero(values > cutoff * values[0]))
    if chi is not None:
        rank = min(rank, chi)
    Wh = Wh[:rank].reshape(rank, d, keep)
    lam_a = values[:rank] / np.linalg.norm(values[:rank])
    b_b = Wh.transpose(1, 0, 2)
    b_a = np.einsum("ijab,kjb->iak", P, Wh.conj()) / np.linalg.norm(values[:rank])
    return replace(state, b_a=b_a, lam_a=lam_a, b_b=b_b, lam_b=S)


def canonical_residual(state: ITEBDState) -> float:
    """Max deviation from the left and right isometry conditions on both bonds."""
    residual = 0.0
    bonds = (
        (state.b_a, state.lam_b, state.lam_a),
        (state.b_b, state.lam_a, state.lam_b),
    )
    for B, lam_left, lam_right in bonds:
        right = np.einsum("sab,scb->ac", B, B.conj())
        weighted = lam_left[None, :, None] * B
        left = np.einsum("sab,sac->bc", weighted.conj(), weighted)
        residual = max(
            residual,
            max_abs(right - np.eye(right.shape[0])),
            max_abs(left - np.diag(lam_right**2)),
        )
    return residual


def _gate_tensor(H: np.ndarray, dt: float, d: int) -> np.ndarray:
    return scipy.linalg.expm(-dt * H).reshape(d, d, d, d)


def _apply_gate(
    b_left: np.ndarray,
    b_right: np.ndarray,
    lam_outer: np.ndarray,
    gate: np.ndarray,
    chi: int,
    cutoff: float,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Update one bond and return (new left B, new bond weights, new right B)."""
    d = b_left.shape[0]
    D_left, D_right = b_left.shape[1], b_right.shape[2]
    phi = np.einsum("iab,jbc->aijc", b_left, b_right)
    phi = np.einsum("ijkl,aklc->aijc", gate, phi)
    theta = (lam_outer[:, None, None, None] * phi).reshape(D_left * d, d * D_right)
    _, values, Wh = scipy.linalg.svd(theta, full_matrices=False)
    keep = max(1, min(chi, int(np.count_nonzero(values > cutoff * values[0]))))
    norm = np.linalg.norm(values[:keep])
    Wh = Wh[:keep].reshape(keep, d, D_right)
    new_right = Wh.transpose(1, 0, 2)
    new_left = np.einsum("aijc,kjc->iak", phi, Wh.conj()) / norm
    return new_left, values[:keep] / norm, new_right


def trotter_step(
    state: ITEBDState,
    half_gate: np.ndarray,
    full_gate: np.ndarray,
    chi: int,
    cutoff: float,
) -> ITEBDState:
    """Second-order step: half AB, full BA, half AB."""
    b_a, lam_a, b_b, lam_b = state.b_a, state.lam_a, state.b_b, state.lam_b
    b_a, lam_a, b_b = _apply_gate(b_a, b_b, lam_b, half_gate, chi, cutoff)
    b_b, lam_b, b_a = _apply_gate(b_b, b_a, lam_a, full_gate, chi, cutoff)
    b_a, lam_a, b_b = _apply_gate(b_a, b_b, lam_b, half_gate, chi, cutoff)
    return replace(state, b_a=b_a, lam_a=lam_a, b_b=b_b, lam_b=lam_b)


def _bond_energies(state: ITEBDState, H: np.ndarray) -> Tuple[complex, complex]:
    d = state.phys_dim
    H4 = H.reshape(d, d, d, d)
    energies = []
    pairs = (
        (state.b_a, state.b_b, state.lam_b),
        (state.b_b, state.b_a, state.lam_a),
    )
    for left, right, lam in pairs:
        theta = np.einsum("a,iab,jbc->aijc", lam, left, right)
        value = np.einsum("aijc,ijkl,aklc->", theta.conj(), H4, theta)
        energies.append(value / np.vdot(theta, theta))
    return energies[0], energies[1]


def _as_matrix(H_term: Union[TwoSiteOperator, np.ndarray]) -> np.ndarray:
    if isinstance(H_term, TwoSiteOperator):
        return H_term.matrix
    return np.asarray(H_term, dtype=complex)


def energy_density(
    state: ITEBDState,
    H_term: Union[TwoSiteOperator, np.ndarray],
    tol: float = DEFAULTS.canonical_tol,
) -> float:
    """⟨H_term⟩ averaged over the AB and BA bonds of a canonical state."""
    residual = canonical_residual(state)
    if residual > tol:
        raise NonCanonical(f"State is not canonical (residual {residual:.3e})")
    e_ab, e_ba = _bond_energies(state, _as_matrix(H_term))
    return float(((e_ab + e_ba) / 2).real)


def _reference_tensor(reference: Union[SymmetricMPS, np.ndarray]) -> np.ndarray:
    if isinstance(reference, SymmetricMPS):
        if not reference.translation_invariant:
            raise InvalidInput("Fidelity needs a translation-invariant reference")
        A = reference.A
    else:
        A = np.asarray(reference, dtype=complex)
    radius = np.max(np.abs(np.linalg.eigvals(transfer_matrix(A))))
    return A / np.sqrt(radius)


def fidelity_per_site(
    state: ITEBDState,
    reference: Union[SymmetricMPS, np.ndarray],
    gap_tol: float = DEFAULTS.fidelity_gap,
    strict: bool = False,
) -> float:
    """|Λ| of the dominant mixed transfer eigenvalue over the two-site cell.

    Args:
        state: Canonical iTEBD state
        reference: Translation-invariant MPS or its site tensor, same physical basis
        gap_tol: Minimum gap between the two leading eigenvalue magnitudes
        strict: Raise DegenerateDominantEigenvalue instead of logging a warning

    Returns:
        Overlap per two-site cell, 1 iff the states coincide
    """
    R = _reference_tensor(reference)
    d = state.phys_dim
    if R.shape[0] != d:
        raise InvalidInput(f"Physical dimensions differ: {d} vs {R.shape[0]}")
    R_cell = np.einsum("iab,jbc->ijac", R, R).reshape(d * d, R.shape[1], R.shape[2])
    values, _ = sorted_eig(transfer_matrix(state.cell(), R_cell))
    value = float(abs(values[0]))
    if magnitude_gap(values) < gap_tol:
        message = (
            f"Dominant mixed transfer eigenvalue is degenerate (|Λ| = {value:.12f})"
        )
        if strict:
            raise DegenerateDominantEigenvalue(message, value)
        logger.warning(message)
    return value


def itebd_ground_state(
    H_term: Union[TwoSiteOperator, np.ndarray],
    chi: Optional[int] = None,
    schedule: Optional[Sequence[Tuple[float, int]]] = None,
    seed: Optional[int] = None,
    initial: Optional[ITEBDState] = None,
    defaults: Defaults = DEFAULTS,
) -> ITEBDState:
    """Imaginary-time evolution towards the ground state of ``H_term``.

    Args:
        H_term: Hermitian two-site term
        chi: Bond dimension (defaults.chi when None)
        schedule: (dt, steps) stages with positive decreasing dt
        seed: Seed of the random initial state
        initial: Start from this state instead of a random one
        defaults: Tolerances and check interval

    Returns:
        Canonicalized state; ``converged`` is set when the final drift per sweep
        is below ``defaults.converge_tol``

    Raises:
        NoConvergence: Final drift per sweep above ``defaults.drift_tol``
    """
    H = _as_matrix(H_term)
    chi = defaults.chi if chi is None else chi
    schedule = list(defaults.schedule if schedule is None else schedule)
    seed = defaults.itebd_seed if seed is None else seed
    d = int(round(np.sqrt(H.shape[0])))
    if d * d != H.shape[0] or H.shape != (d * d, d * d):
        raise InvalidInput(f"Two-site term has shape {H.shape}")
    if chi < 2:
        raise InvalidInput(f"Bond dimension must be at least 2, got {chi}")
    dts = [dt for dt, _ in schedule]
    increasing = any(b > a for a, b in zip(dts, dts[1:]))
    if not schedule or any(dt <= 0 for dt in dts) or increasing:
        raise InvalidInput("Schedule time steps must be positive and non-increasing")

    state = initial if initial is not None else ITEBDState.random(d, chi, seed)
    log: List[Dict[str, Any]] = []
    previous = float(np.mean(_bond_energies(state, H)).real)
    drift = float("inf")
    for stage, (dt, steps) in enumerate(schedule):
        half_gate, full_gate = _gate_tensor(H, dt / 2, d), _gate_tensor(H, dt, d)
        drift, checked, step = float("inf"), 0, 0
        for step in range(1, steps + 1):
            state = trotter_step(state, half_gate, full_gate, chi, defaults.svd_cutoff)
            if step % defaults.check_interval and step != steps:
                continue
            energy = float(np.mean(_bond_energies(state, H)).real)
            drift = abs(energy - previous) / (step - checked)
            previous, checked = energy, step
            log.append(
                {
                    "stage": stage,
                    "dt": dt,
                    "step": step,
                    "energy": energy,
                    "drift": drift,
                }
            )
            if drift < defaults.stage_exit_tol:
                break
        logger.debug(
            "Stage %d (dt=%g) ended after %d steps, drift %.3e", stage, dt, step, drift
        )
    logger.info(
        "Imaginary-time schedule finished, energy %.15f, drift %.3e", previous, drift
    )

    state = canonicalize(state, chi=chi, cutoff=defaults.svd_cutoff)
    state = replace(state, log=log, converged=drift < defaults.converge_tol)
    if drift > defaults.drift_tol:
        raise NoConvergence(
            f"Energy still drifting by {drift:.3e} per sweep after the schedule", state
        )
    return state
