"""Spin-1 two-site terms invariant under A4 and bond inversion.

Operators act on (spin-1) ⊗ (spin-1) in the {|x>, |y>, |z>} basis where
(S^a)_bc = −i ε_abc. The coupled |S, m> states come from the usual spin-1
Clebsch-Gordan table in the S_z product basis and are rotated into that basis.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Tuple, Union

import numpy as np
import scipy.linalg

from .config import DEFAULTS
from .errors import DimensionMismatch, InvalidInput
from .groups import load_builtin
from .numerics import max_abs
from .output import complex_array, to_plain

BASIS_TAG = "xyz⊗xyz"

_S2 = np.sqrt(2.0)
_S3 = np.sqrt(3.0)
_S6 = np.sqrt(6.0)

# |S, m> in the S_z product basis as {(m1, m2): coefficient}
SPIN1_CG_TABLE: Dict[Tuple[int, int], Dict[Tuple[int, int], float]] = {
    (2, 2): {(1, 1): 1.0},
    (2, 1): {(1, 0): 1 / _S2, (0, 1): 1 / _S2},
    (2, 0): {(1, -1): 1 / _S6, (0, 0): 2 / _S6, (-1, 1): 1 / _S6},
    (2, -1): {(0, -1): 1 / _S2, (-1, 0): 1 / _S2},
    (2, -2): {(-1, -1): 1.0},
    (1, 1): {(1, 0): 1 / _S2, (0, 1): -1 / _S2},
    (1, 0): {(1, -1): 1 / _S2, (-1, 1): -1 / _S2},
    (1, -1): {(0, -1): 1 / _S2, (-1, 0): -1 / _S2},
    (0, 0): {(1, -1): 1 / _S3, (0, 0): -1 / _S3, (-1, 1): 1 / _S3},
}


@dataclass(frozen=True, eq=False)
class TwoSiteOperator:
    """Hermitian 9×9 bond term."""

    matrix: np.ndarray
    label: str = ""
    basis: str = BASIS_TAG

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (9, 9):
            raise DimensionMismatch(
                f"Two-site spin-1 terms are 9x9, got {matrix.shape}"
            )
        if max_abs(matrix - matrix.conj().T) > DEFAULTS.ham_tol:
            raise InvalidInput(f"Term '{self.label}' is not Hermitian")
        object.__setattr__(self, "matrix", matrix)

    def __add__(self, other: "TwoSiteOperator") -> "TwoSiteOperator":
        label = f"{self.label} + {other.label}"
        return TwoSiteOperator(self.matrix + other.matrix, label)

    def scaled(self, factor: float) -> "TwoSiteOperator":
        return TwoSiteOperator(factor * self.matrix, f"{factor:g}*{self.label}")

    @property
    def eigenvalues(self) -> np.ndarray:
        return scipy.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True, eq=False)
class SpinPairBasis:
    """Coupled |S, m> states and |φ±> as vectors in the xyz⊗xyz basis."""

    states: Dict[Tuple[int, int], np.ndarray]
    phi_plus: np.ndarray
    phi_minus: np.ndarray
    extra: Dict[str, np.ndarray] = field(default_factory=dict)

    def state(self, S: int, m: int) -> np.ndarray:
        try:
            return self.states[(S, m)]
        except KeyError:
            raise InvalidInput(f"No coupled state |{S},{m}>") from None

    @property
    def matrix(self) -> np.ndarray:
        """Columns ordered by descending S, then descending m."""
        keys = sorted(self.states, key=lambda k: (-k[0], -k[1]))
        return np.column_stack([self.states[k] for k in keys])

    def projector(self, vector: np.ndarray) -> np.ndarray:
        vector = vector / np.linalg.norm(vector)
        return np.outer(vector, vector.conj())


def levi_civita() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[a, b, c] = 1.0
        eps[a, c, b] = -1.0
    return eps


def spin1_operators() -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """S^x, S^y, S^z with (S^a)_bc = −i ε_abc."""
    S = -1j * levi_civita()
    return S[0], S[1], S[2]


def xyz_to_sz() -> np.ndarray:
    """Columns are |x>, |y>, |z> written in the S_z basis ordered m = 1, 0, −1."""
    W = np.zeros((3, 3), dtype=complex)
    W[:, 0] = np.array([-1, 0, 1]) / _S2
    W[:, 1] = np.array([1j, 0, 1j]) / _S2
    W[:, 2] = np.array([0, 1, 0])
    return W


def standard_spin1() -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """S^x, S^y, S^z in the S_z eigenbasis ordered m = 1, 0, −1."""
    Sx = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / _S2
    Sy = np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex) / _S2
    Sz = np.diag([1, 0, -1]).astype(complex)
    return Sx, Sy, Sz


def _sz_index(m1: int, m2: int) -> int:
    return (1 - m1) * 3 + (1 - m2)


def coupled_basis() -> SpinPairBasis:
    """The nine |S, m> states and |φ±> = (|2,2> + |2,−2> ± i√2|2,0>)/2."""
    W = xyz_to_sz()
    to_xyz = np.kron(W, W).conj().T
    states = {}
    for key, terms in SPIN1_CG_TABLE.items():
        vector = np.zeros(9, dtype=complex)
        for (m1, m2), coeff in terms.items():
            vector[_sz_index(m1, m2)] = coeff
        states[key] = to_xyz @ vector
    e22, e2m2, e20 = states[(2, 2)], states[(2, -2)], states[(2, 0)]
    return SpinPairBasis(
        states=states,
        phi_plus=(e22 + e2m2 + 1j * _S2 * e20) / 2,
        phi_minus=(e22 + e2m2 - 1j * _S2 * e20) / 2,
        extra={"q": (e22 + e2m2) / _S2},
    )


def _dot_product(S: Tuple[np.ndarray, ...]) -> np.ndarray:
    return sum(np.kron(Sa, Sa) for Sa in S)


def build_terms() -> Tuple[TwoSiteOperator, TwoSiteOperator, TwoSiteOperator]:
    """H_AKLT, H_q and H_c on one bond."""
    S = spin1_operators()
    SS = _dot_product(S)
    SS2 = SS @ SS
    h_aklt = SS + SS2 / 3
    h_q = sum(np.kron(Sa @ Sa, Sa @ Sa) for Sa in S) - SS2 / 3
    h_c = np.zeros((9, 9), dtype=complex)
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1), (0, 2, 1), (2, 1, 0), (1, 0, 2)):
        h_c += np.kron(S[a] @ S[b], S[c]) + np.kron(S[a], S[b] @ S[c])
    return (
        TwoSiteOperator(h_aklt, "H_AKLT"),
        TwoSiteOperator(h_q, "H_q"),
        TwoSiteOperator(h_c, "H_c"),
    )


def projector_forms() -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The three bond terms written through coupled-basis projectors."""
    basis = coupled_basis()
    eye = np.eye(9)
    spin2 = sum(basis.projector(basis.state(2, m)) for m in range(-2, 3))
    h_aklt = 2 * spin2 - 2 / 3 * eye
    h_q = (
        basis.projector(basis.extra["q"])
        + basis.projector(basis.state(2, 0))
        + 2 / 3 * eye
    )
    h_c = 2 * _S3 * (
        basis.projector(basis.phi_plus) - basis.projector(basis.phi_minus)
    )
    return h_aklt, h_q, h_c


def hamiltonian(lam: float, mu: float) -> TwoSiteOperator:
    """H_AKLT + λ H_c + μ H_q."""
    h_aklt, h_q, h_c = build_terms()
    matrix = h_aklt.matrix + lam * h_c.matrix + mu * h_q.matrix
    return TwoSiteOperator(matrix, f"H(lambda={lam:g}, mu={mu:g})")


def swap_operator() -> np.ndarray:
    swap = np.zeros((9, 9))
    for i in range(3):
        for j in range(3):
            swap[j * 3 + i, i * 3 + j] = 1.0
    return swap


@dataclass(frozen=True)
class SymmetryReport:
    label: str
    group_residual: float
    per_generator: Dict[str, float]
    swap_residual: float
    so3_rz_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.group_residual < self.tol and self.swap_residual < self.tol


def verify_symmetry(
    term: TwoSiteOperator, group: str = "A4", tol: float = DEFAULTS.ham_tol
) -> SymmetryReport:
    """Commutators with u(g) ⊗ u(g) on the generators, the swap and R_z(π/2)⊗2."""
    bundle = load_builtin(group)
    preset = bundle.preset("spin1")
    if len(preset.irreps) != 1:
        raise InvalidInput(f"{group} spin-1 preset is not a single irrep")
    rep = bundle.irrep(preset.irreps[0])
    H = term.matrix
    per_generator = {}
    for name, element in bundle.table.generators:
        U = np.kron(rep(element), rep(element))
        per_generator[name] = max_abs(H @ U - U @ H)
    swap = swap_operator()
    R = scipy.linalg.expm(-0.5j * np.pi * spin1_operators()[2])
    RR = np.kron(R, R)
    return SymmetryReport(
        label=term.label,
        group_residual=max(per_generator.values()),
        per_generator=per_generator,
        swap_residual=max_abs(H - swap @ H @ swap),
        so3_rz_residual=max_abs(H @ RR - RR @ H),
        tol=tol,
    )


def h_matrix(lam: float, mu: float) -> Tuple[np.ndarray, float]:
    """The 3×3 spin-2 block on |2,2>, |2,−2>, |2,0> and its smallest eigenvalue."""
    off = -1j * _S6 * lam
    h = np.array(
        [
            [2 + mu / 2, mu / 2, off],
            [mu / 2, 2 + mu / 2, off],
            [np.conj(off), np.conj(off), 2 + mu],
        ],
        dtype=complex,
    )
    return h, float(scipy.linalg.eigvalsh(h)[0])


def h_block(lam: float, mu: float) -> np.ndarray:
    """H(λ, μ) − E_AKLT(μ) restricted to |2,2>, |2,−2>, |2,0>."""
    basis = coupled_basis()
    vectors = np.column_stack(
        [basis.state(2, 2), basis.state(2, -2), basis.state(2, 0)]
    )
    shifted = hamiltonian(lam, mu).matrix - aklt_energy(mu) * np.eye(9)
    return vectors.conj().T @ shifted @ vectors


def aklt_region(lam: float, mu: float) -> bool:
    """True when μ ± 2√3 λ + 2 > 0, i.e. the AKLT state stays the ground state."""
    return bool(mu + 2 * _S3 * lam + 2 > 0 and mu - 2 * _S3 * lam + 2 > 0)


def region_boundary(lam: float) -> float:
    """Largest boundary value μ = 2√3|λ| − 2 at fixed λ."""
    return 2 * _S3 * abs(lam) - 2


def aklt_energy(mu: float = 0.0) -> float:
    """Energy per bond of the AKLT state for H_AKLT + λH_c + μH_q."""
    return -2 / 3 + 2 * mu / 3


def bond_gap(lam: float, mu: float) -> float:
    """Smallest eigenvalue of H(λ, μ) − E_AKLT(μ) on one bond."""
    shifted = hamiltonian(lam, mu).matrix - aklt_energy(mu) * np.eye(9)
    return float(scipy.linalg.eigvalsh(shifted)[0])


def hamiltonian_to_dict(term: TwoSiteOperator) -> Dict[str, Any]:
    return to_plain({"label": term.label, "basis": term.basis, "matrix": term.matrix})


def hamiltonian_from_dict(data: Mapping[str, Any]) -> TwoSiteOperator:
    basis = data.get("basis", BASIS_TAG)
    if basis != BASIS_TAG:
        raise InvalidInput(f"Unsupported Hamiltonian basis '{basis}'")
    try:
        matrix = complex_array(data["matrix"])
    except KeyError:
        raise InvalidInput("Hamiltonian file has no 'matrix' entry") from None
    return TwoSiteOperator(matrix, data.get("label", ""), basis)


def load_hamiltonian(path: Union[str, Path]) -> TwoSiteOperator:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInput(f"Failed to read Hamiltonian file {path}: {e}") from None
    return hamiltonian_from_dict(data)
