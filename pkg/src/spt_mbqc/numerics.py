"""Small numerical helpers shared across modules."""

from typing import Sequence, Tuple

import numpy as np
import scipy.linalg

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

PAULI = {"I": IDENTITY2, "X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}
PAULI_XYZ = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def rng_for(seed: int, *path: int) -> np.random.Generator:
    """Counter-based generator for ``seed`` and a stream path.

    Streams with different paths are independent and stable across platforms.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *path])))


def unit_disk(rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
    """Complex samples uniform on the closed unit disk."""
    radius = np.sqrt(rng.uniform(0.0, 1.0, size=shape))
    angle = rng.uniform(0.0, 2 * np.pi, size=shape)
    return radius * np.exp(1j * angle)


def haar_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar random normalized state vector."""
    vec = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return vec / np.linalg.norm(vec)


def max_abs(array: np.ndarray) -> float:
    """Entrywise max-norm, zero for empty arrays."""
    array = np.asarray(array)
    if array.size == 0:
        return 0.0
    return float(np.max(np.abs(array)))


def unitarity_defect(matrix: np.ndarray) -> float:
    """max |M†M − 1|."""
    matrix = np.asarray(matrix)
    return max_abs(matrix.conj().T @ matrix - np.eye(matrix.shape[1]))


def gauge_fix(matrix: np.ndarray, tie_tol: float = 1e-9) -> Tuple[np.ndarray, complex]:
    """Rotate ``matrix`` so its largest-magnitude entry is real positive.

    The first entry in row-major order within ``tie_tol`` of the maximum
    magnitude is the pivot.

    Args:
        matrix: Array to rephase
        tie_tol: Magnitude tolerance for ties

    Returns:
        Tuple of (rephased matrix, phase that was divided out)
    """
    flat = np.asarray(matrix).ravel()
    magnitudes = np.abs(flat)
    top = magnitudes.max()
    if top == 0:
        return np.asarray(matrix), 1.0 + 0j
    pivot = int(np.flatnonzero(magnitudes >= top - tie_tol)[0])
    phase = flat[pivot] / magnitudes[pivot]
    return np.asarray(matrix) / phase, complex(phase)


def sorted_eig(matrix: np.ndarray, left: bool = False):
    """Eigen-decomposition sorted by descending eigenvalue magnitude.

    Returns:
        (eigenvalues, right vectors) or (eigenvalues, left vectors, right
        vectors) when ``left`` is set
    """
    if left:
        values, lvecs, rvecs = scipy.linalg.eig(matrix, left=True, right=True)
        order = np.argsort(-np.abs(values), kind="stable")
        return values[order], lvecs[:, order], rvecs[:, order]
    values, rvecs = scipy.linalg.eig(matrix)
    order = np.argsort(-np.abs(values), kind="stable")
    return values[order], rvecs[:, order]


def magnitude_gap(values: Sequence[complex]) -> float:
    """|λ0| − |λ1| for magnitude-sorted eigenvalues (inf for a single value)."""
    if len(values) < 2:
        return float("inf")
    return float(abs(values[0]) - abs(values[1]))


def format_float(value: float, digits: int = 17) -> str:
    """Fixed-significance float formatting used in every output file."""
    if np.isnan(value):
        return "NaN"
    if np.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    return format(float(value), f".{digits}g")


def pauli_coefficients(matrix: np.ndarray) -> np.ndarray:
    """Coefficients c_a with M = Σ c_a σ_a over (I, X, Y, Z)."""
    return np.array(
        [np.trace(p.conj().T @ matrix) / 2 for p in PAULI.values()], dtype=complex
    )


def rz(theta: float) -> np.ndarray:
    """exp(−iθσ_z/2)."""
    return scipy.linalg.expm(-0.5j * theta * SIGMA_Z)


def rx(theta: float) -> np.ndarray:
    """exp(−iθσ_x/2)."""
    return scipy.linalg.expm(-0.5j * theta * SIGMA_X)


def ry(theta: float) -> np.ndarray:
    """exp(−iθσ_y/2)."""
    return scipy.linalg.expm(-0.5j * theta * SIGMA_Y)


def trace_fidelity(target: np.ndarray, achieved: np.ndarray) -> float:
    """|tr(U†W)| / dim, equal to 1 iff W = phase · U for unitaries."""
    return float(abs(np.trace(target.conj().T @ achieved)) / target.shape[0])
