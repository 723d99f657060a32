"""Measurement-based single-qubit gates in the virtual space of an MPS.

Measuring a site in a basis {φ_k} maps the right boundary vector as
R ↦ A'_k R with A'_k = Σ_i conj(φ_k[i]) A^i. When the virtual space splits as
junk ⊗ qubit and every A'_k factors accordingly, the qubit only sees a
product of known 2×2 maps. Pauli parts of those maps are tracked symbolically
as the byproduct.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from .config import DEFAULTS, Defaults
from .errors import (
    AttemptsExhausted,
    DimensionMismatch,
    InvalidInput,
    LengthMismatch,
    ZeroAmplitudeOutcome,
)
from .mps import (
    BoundaryVector,
    SymmetricMPS,
    aklt_mps,
    build_mps,
    cluster_mps,
    protected_factorization,
)
from .numerics import (
    IDENTITY2,
    PAULI,
    gauge_fix,
    haar_state,
    pauli_coefficients,
    rng_for,
    rx,
    ry,
    rz,
    trace_fidelity,
)

logger = logging.getLogger(__name__)

_PRODUCT = {
    ("X", "Y"): (1j, "Z"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "X"): (1j, "Y"),
    ("Y", "X"): (-1j, "Z"),
    ("Z", "Y"): (-1j, "X"),
    ("X", "Z"): (-1j, "Y"),
}

_HADAMARD_IMAGE = {"I": (1, "I"), "X": (1, "Z"), "Y": (-1, "Y"), "Z": (1, "X")}

# successors (b, c) of each rotation axis a, so that σ_a σ_b = iσ_c
_CYCLIC = {"x": ("y", "z"), "y": ("z", "x"), "z": ("x", "y")}


@dataclass(frozen=True)
class PauliWord:
    """A single Pauli matrix with a phase in {±1, ±i}."""

    phase: complex = 1
    label: str = "I"

    @classmethod
    def of(cls, label: str) -> "PauliWord":
        label = label.upper()
        if label not in PAULI:
            raise InvalidInput(f"Unknown Pauli label '{label}'")
        return cls(1, label)

    def __mul__(self, other: "PauliWord") -> "PauliWord":
        phase = self.phase * other.phase
        if self.label == "I":
            return PauliWord(phase, other.label)
        if other.label == "I":
            return PauliWord(phase, self.label)
        if self.label == other.label:
            return PauliWord(phase, "I")
        extra, label = _PRODUCT[(self.label, other.label)]
        return PauliWord(_snap(phase * extra), label)

    @property
    def matrix(self) -> np.ndarray:
        return self.phase * PAULI[self.label]

    def dagger(self) -> "PauliWord":
        return PauliWord(_snap(np.conj(self.phase)), self.label)

    def hadamard_conjugate(self) -> "PauliWord":
        """H P H."""
        sign, label = _HADAMARD_IMAGE[self.label]
        return PauliWord(_snap(sign * self.phase), label)

    def anticommutes_with(self, label: str) -> bool:
        label = label.upper()
        return self.label != "I" and label != "I" and self.label != label

    def __str__(self) -> str:
        prefix = {1: "", -1: "-", 1j: "i", -1j: "-i"}[self.phase]
        return f"{prefix}{self.label}"


def _snap(phase: complex) -> complex:
    for candidate in (1, -1, 1j, -1j):
        if abs(phase - candidate) < 1e-9:
            return candidate
    raise InvalidInput(f"Pauli phase {phase} is not a fourth root of unity")


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Orthonormal physical kets (rows of ``vectors``) with labels.

    ``byproducts`` optionally names the Pauli part each outcome leaves on the
    protected qubit, for bases whose induced maps are not plain Paulis.
    """

    name: str
    vectors: np.ndarray
    labels: Tuple[str, ...]
    byproducts: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=complex)
        if vectors.ndim != 2 or vectors.shape[0] != vectors.shape[1]:
            raise DimensionMismatch(
                f"A basis needs d kets of length d, got {vectors.shape}"
            )
        if len(self.labels) != vectors.shape[0]:
            raise InvalidInput("One label per basis ket is required")
        gram = vectors.conj() @ vectors.T
        if np.max(np.abs(gram - np.eye(vectors.shape[0]))) > 1e-12:
            raise InvalidInput(f"Basis '{self.name}' is not orthonormal")
        object.__setattr__(self, "vectors", vectors)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]


def pauli_basis(labels: Sequence[str] = ("x", "y", "z")) -> MeasurementBasis:
    """The spin-1 {|x>, |y>, |z>} basis."""
    return MeasurementBasis("xyz", np.eye(3), tuple(labels))


def aklt_rotation_basis(axis: str, theta: float) -> MeasurementBasis:
    """Basis whose first two outcomes induce σ_b R_a(θ) and σ_c R_a(θ)."""
    if axis not in _CYCLIC:
        raise InvalidInput(f"Rotation axis must be x, y or z, got '{axis}'")
    b, c = _CYCLIC[axis]
    index = {"x": 0, "y": 1, "z": 2}
    cos, sin = np.cos(theta / 2), np.sin(theta / 2)
    vectors = np.zeros((3, 3))
    vectors[0, index[b]], vectors[0, index[c]] = cos, -sin
    vectors[1, index[b]], vectors[1, index[c]] = sin, cos
    vectors[2, index[axis]] = 1.0
    return MeasurementBasis(
        f"r{axis}({theta:.6g})",
        vectors,
        (f"θ,{b}", f"θ,{c}", axis),
        byproducts=(b.upper(), c.upper(), axis.upper()),
    )


def cluster_basis(phi: float) -> MeasurementBasis:
    """(|0> ± e^{-iφ}|1>)/√2, inducing H σ_z^s R_z(φ)."""
    phase = np.exp(-1j * phi)
    vectors = np.array([[1, phase], [1, -phase]]) / np.sqrt(2)
    return MeasurementBasis(f"phi({phi:.6g})", vectors, ("+", "-"))


def mixing_basis() -> MeasurementBasis:
    """{(|x>+|y>)/√2, (|x>-|y>)/√2, |z>}; its first outcome entangles junk and qubit."""
    r = 1 / np.sqrt(2)
    vectors = np.array([[r, r, 0], [r, -r, 0], [0, 0, 1]])
    return MeasurementBasis("xy-mix", vectors, ("x+y", "x-y", "z"))


@dataclass(frozen=True)
class MeasurementRecord:
    site: int
    basis: str
    outcome: int
    label: str
    p: float
    probabilities: Tuple[float, ...]
    byproduct_after: str
    split: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "site": self.site,
            "basis": self.basis,
            "outcome": self.outcome,
            "label": self.label,
            "p": self.p,
            "probabilities": list(self.probabilities),
            "byproduct_after": self.byproduct_after,
            "split": self.split,
        }


@dataclass(frozen=True, eq=False)
class LogicalFrame:
    """Boundary vector, Pauli frame and the net map seen by the protected qubit."""

    boundary: BoundaryVector
    byproduct: PauliWord = PauliWord()
    protected_map: np.ndarray = field(default_factory=lambda: IDENTITY2.copy())
    transcript: Tuple[MeasurementRecord, ...] = ()

    @classmethod
    def start(
        cls, junk: Optional[np.ndarray], protected: np.ndarray
    ) -> "LogicalFrame":
        junk = np.ones(1, dtype=complex) if junk is None else junk
        return cls(boundary=BoundaryVector.split(junk, protected))

    @property
    def split(self) -> bool:
        return self.boundary.is_split

    @property
    def measured(self) -> int:
        return len(self.transcript)

    def probability_sums(self) -> List[float]:
        return [float(sum(r.probabilities)) for r in self.transcript]


def split_map(
    M: np.ndarray, protected_dim: int = 2, tol: float = DEFAULTS.split_tol
) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """Best rank-one fit M ≈ M_J ⊗ U; ``None`` if the fit misses by more than ``tol``.

    U is scaled to Frobenius norm √(protected_dim) with its largest entry
    real positive; all remaining scalars go into M_J.
    """
    D = M.shape[0]
    junk_dim = D // protected_dim
    if junk_dim * protected_dim != D:
        raise DimensionMismatch(
            f"Bond dimension {D} does not split off a {protected_dim}-level factor"
        )
    reshuffled = (
        M.reshape(junk_dim, protected_dim, junk_dim, protected_dim)
        .transpose(0, 2, 1, 3)
        .reshape(junk_dim**2, protected_dim**2)
    )
    U_svd, s, Vh = scipy.linalg.svd(reshuffled)
    scale = np.linalg.norm(s)
    if scale == 0:
        return None
    tail = np.sqrt(np.sum(s[1:] ** 2))
    if tail > tol * scale:
        return None
    junk = (s[0] * U_svd[:, 0]).reshape(junk_dim, junk_dim)
    protected = Vh[0].reshape(protected_dim, protected_dim)
    protected, phase = gauge_fix(protected * np.sqrt(protected_dim))
    junk = junk * phase / np.sqrt(protected_dim)
    return junk, protected


def pauli_label(U: np.ndarray, tol: float = 1e-9) -> Optional[str]:
    """The Pauli U is proportional to, if any."""
    coeffs = np.abs(pauli_coefficients(U))
    top = int(np.argmax(coeffs))
    if coeffs[top] == 0 or np.any(np.delete(coeffs, top) > tol * coeffs[top]):
        return None
    return "IXYZ"[top]


def vector_schmidt_rank(vector: np.ndarray, left_dim: int, tol: float = 1e-10) -> int:
    matrix = np.asarray(vector).reshape(left_dim, -1)
    values = scipy.linalg.svdvals(matrix)
    return int(np.count_nonzero(values > tol * values[0])) if values[0] > 0 else 0


def induced_maps(A: np.ndarray, basis: MeasurementBasis) -> np.ndarray:
    """A'_k = Σ_i conj(φ_k[i]) A^i for every outcome k."""
    if basis.dim != A.shape[0]:
        raise DimensionMismatch(
            f"Basis has {basis.dim} kets, site has dimension {A.shape[0]}"
        )
    return np.einsum("ki,iab->kab", basis.vectors.conj(), A)


def measure_site(
    mps: SymmetricMPS,
    frame: LogicalFrame,
    basis: MeasurementBasis,
    outcome: Union[int, str] = "sample",
    rng: Optional[np.random.Generator] = None,
    defaults: Defaults = DEFAULTS,
) -> LogicalFrame:
    """Measure the next site from the right end and update the frame.

    Args:
        mps: Chain being consumed, right to left
        frame: Current logical frame
        basis: Measurement basis of the site
        outcome: ``"sample"`` to draw from the outcome distribution, or a forced index
        rng: Generator used when sampling
        defaults: Probability and split tolerances

    Returns:
        New frame with the boundary, byproduct, protected map and transcript updated
    """
    if frame.boundary.dim != mps.bond_dim:
        raise DimensionMismatch(
            f"Boundary has dimension {frame.boundary.dim}, "
            f"bond dimension is {mps.bond_dim}"
        )
    site = frame.measured
    if not mps.translation_invariant and site >= mps.n_sites:
        raise LengthMismatch(f"All {mps.n_sites} sites have been measured")
    A = mps.site(mps.n_sites - 1 - site) if not mps.translation_invariant else mps.A

    maps = induced_maps(A, basis)
    images = maps @ frame.boundary.vector
    weights = np.sum(np.abs(images) ** 2, axis=1)
    total = weights.sum()
    if total <= 0:
        raise ZeroAmplitudeOutcome("Every outcome has zero amplitude")
    probabilities = weights / total

    if isinstance(outcome, str):
        if outcome != "sample":
            raise InvalidInput(f"Outcome must be 'sample' or an index, got '{outcome}'")
        rng = rng if rng is not None else rng_for(defaults.measurement_seed)
        k = int(rng.choice(basis.dim, p=probabilities))
    else:
        k = int(outcome)
        if not 0 <= k < basis.dim:
            raise InvalidInput(f"Outcome {k} out of range for basis '{basis.name}'")
        if probabilities[k] < defaults.zero_amplitude:
            raise ZeroAmplitudeOutcome(
                f"Outcome {basis.labels[k]} has probability {probabilities[k]:.3g}"
            )

    vector = images[k] / np.linalg.norm(images[k])
    boundary = BoundaryVector.from_vector(vector)
    byproduct, protected_map = frame.byproduct, frame.protected_map
    if frame.split:
        factors = split_map(maps[k], tol=defaults.split_tol)
        if factors is not None:
            junk_map, U = factors
            junk = junk_map @ frame.boundary.junk
            protected = U @ frame.boundary.protected
            boundary = BoundaryVector(
                vector=vector,
                junk=junk / np.linalg.norm(junk),
                protected=protected / np.linalg.norm(protected),
            )
            label = basis.byproducts[k] if basis.byproducts else pauli_label(U)
            if label is not None:
                byproduct = PauliWord.of(label) * byproduct
            protected_map = U @ protected_map
        else:
            logger.debug(
                "Outcome %s entangles junk and protected factors", basis.labels[k]
            )

    record = MeasurementRecord(
        site=site,
        basis=basis.name,
        outcome=k,
        label=basis.labels[k],
        p=float(probabilities[k]),
        probabilities=tuple(float(p) for p in probabilities),
        byproduct_after=str(byproduct),
        split=boundary.is_split,
    )
    return replace(
        frame,
        boundary=boundary,
        byproduct=byproduct,
        protected_map=protected_map,
        transcript=frame.transcript + (record,),
    )


# --- gate compilation -------------------------------------------------------

_ROTATIONS = {"x": rx, "y": ry, "z": rz}


def parse_gates(text: str) -> List[Tuple[str, float]]:
    """``"rz:0.785,rx:1.047"`` → [("z", 0.785), ("x", 1.047)], in application order."""
    gates = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        name, _, angle = chunk.partition(":")
        name = name.strip().lower()
        if name not in ("rx", "ry", "rz"):
            raise InvalidInput(f"Unknown gate '{name}' (use rx, ry or rz)")
        try:
            value = float(angle)
        except ValueError:
            raise InvalidInput(f"Bad angle in '{chunk}'") from None
        gates.append((name[1], value))
    return gates


def euler_zxz(alpha: float, beta: float, gamma: float) -> List[Tuple[str, float]]:
    """R_z(γ) R_x(β) R_z(α) as a gate list applied left to right."""
    return [("z", alpha), ("x", beta), ("z", gamma)]


def target_unitary(gates: Sequence[Tuple[str, float]]) -> np.ndarray:
    U = IDENTITY2.copy()
    for axis, angle in gates:
        U = _ROTATIONS[axis](angle) @ U
    return U


@dataclass(frozen=True, eq=False)
class RotationResult:
    """Outcome of one compiled rotation sequence."""

    kind: str
    target: np.ndarray
    achieved: np.ndarray
    byproduct: PauliWord
    fidelity: float
    attempts: int
    frame: LogicalFrame
    tol: float = DEFAULTS.rotation_tol

    @property
    def passed(self) -> bool:
        return self.fidelity >= 1 - self.tol

    @property
    def corrected(self) -> np.ndarray:
        return self.byproduct.matrix.conj().T @ self.achieved

    @property
    def transcript(self) -> Tuple[MeasurementRecord, ...]:
        return self.frame.transcript


def _validate_gates(target: Sequence[Tuple[str, float]]) -> None:
    for axis, angle in target:
        if axis not in _ROTATIONS:
            raise InvalidInput(f"Unknown rotation axis '{axis}'")
        if not np.isfinite(angle):
            raise InvalidInput(f"Rotation angle must be finite, got {angle}")


def _aklt_rotation(
    mps: SymmetricMPS,
    frame: LogicalFrame,
    axis: str,
    theta: float,
    rng: np.random.Generator,
    max_attempts: int,
    defaults: Defaults,
) -> Tuple[LogicalFrame, int]:
    for attempt in range(1, max_attempts + 1):
        sign = -1.0 if frame.byproduct.anticommutes_with(axis) else 1.0
        basis = aklt_rotation_basis(axis, sign * theta)
        frame = measure_site(mps, frame, basis, rng=rng, defaults=defaults)
        if frame.transcript[-1].outcome != 2:
            return frame, attempt
    raise AttemptsExhausted(
        f"R_{axis}({theta:.6g}) did not succeed within {max_attempts} attempts"
    )


def _compile_aklt(
    target: Sequence[Tuple[str, float]],
    rng: np.random.Generator,
    max_attempts: int,
    padding: int,
    defaults: Defaults,
) -> Tuple[LogicalFrame, int]:
    mps = aklt_mps()
    frame = LogicalFrame.start(None, haar_state(rng, 2))
    identity = pauli_basis()
    attempts = 0
    for axis, theta in target:
        frame, used = _aklt_rotation(
            mps, frame, axis, theta, rng, max_attempts, defaults
        )
        attempts += used
        for _ in range(padding):
            frame = measure_site(mps, frame, identity, rng=rng, defaults=defaults)
    if not target:
        for _ in range(padding):
            frame = measure_site(mps, frame, identity, rng=rng, defaults=defaults)
    return frame, attempts


def _cluster_step(
    mps: SymmetricMPS,
    frame: LogicalFrame,
    sigma: PauliWord,
    phi: float,
    rng: np.random.Generator,
    defaults: Defaults,
) -> Tuple[LogicalFrame, PauliWord]:
    """One cluster measurement realizing H σ_z^s R_z(φ) after frame adaptation."""
    sign = -1.0 if sigma.anticommutes_with("Z") else 1.0
    basis = cluster_basis(sign * phi)
    frame = measure_site(mps, frame, basis, rng=rng, defaults=defaults)
    s = frame.transcript[-1].outcome
    flip = PauliWord.of("Z") if s else PauliWord()
    sigma = (flip * sigma).hadamard_conjugate()
    return replace(frame, byproduct=sigma), sigma


def _compile_cluster(
    target: Sequence[Tuple[str, float]],
    rng: np.random.Generator,
    padding: int,
    defaults: Defaults,
) -> Tuple[LogicalFrame, int]:
    mps = cluster_mps()
    frame = LogicalFrame.start(None, haar_state(rng, 2))
    sigma = PauliWord()
    pending_h = False
    steps = 0

    expanded: List[Tuple[str, float]] = []
    for axis, angle in target:
        if axis == "y":
            expanded.extend([("z", -np.pi / 2), ("x", angle), ("z", np.pi / 2)])
        else:
            expanded.append((axis, angle))

    def step(phi: float) -> None:
        nonlocal frame, sigma, pending_h, steps
        frame, sigma = _cluster_step(mps, frame, sigma, phi, rng, defaults)
        pending_h = not pending_h
        steps += 1

    for axis, angle in expanded:
        # R_z needs no pending H, R_x = H R_z H needs one
        if (axis == "z") == pending_h:
            step(0.0)
        step(angle)
        for _ in range(padding):
            step(0.0)
    if not expanded:
        for _ in range(padding):
            step(0.0)
    if pending_h:
        step(0.0)
    return frame, steps


def compile_rotation(
    mps_kind: str,
    target: Sequence[Tuple[str, float]],
    max_attempts: int = DEFAULTS.max_attempts,
    seed: int = DEFAULTS.measurement_seed,
    padding: int = 0,
    defaults: Defaults = DEFAULTS,
) -> RotationResult:
    """Run the adaptive measurement protocol for a list of rotations.

    Args:
        mps_kind: ``"aklt"`` or ``"cluster"``
        target: (axis, angle) rotations in application order
        max_attempts: Repeat-until-success budget per AKLT rotation
        seed: Seed of the outcome sampler and the initial qubit state
        padding: Identity measurements inserted after every rotation
        defaults: Tolerances

    Returns:
        RotationResult with the net protected map, the byproduct and the
        trace fidelity of byproduct† · achieved against the target
    """
    _validate_gates(target)
    if max_attempts < 1:
        raise InvalidInput("max_attempts must be positive")
    rng = rng_for(seed, 1)
    if mps_kind == "aklt":
        frame, attempts = _compile_aklt(target, rng, max_attempts, padding, defaults)
    elif mps_kind == "cluster":
        frame, attempts = _compile_cluster(target, rng, padding, defaults)
    else:
        raise InvalidInput(f"Unknown chain kind '{mps_kind}' (use aklt or cluster)")

    goal = target_unitary(target)
    corrected = frame.byproduct.matrix.conj().T @ frame.protected_map
    fidelity = trace_fidelity(goal, corrected)
    logger.info(
        "Compiled %d rotation(s) on %s with fidelity %.17g",
        len(target),
        mps_kind,
        fidelity,
    )
    return RotationResult(
        kind=mps_kind,
        target=goal,
        achieved=frame.protected_map,
        byproduct=frame.byproduct,
        fidelity=fidelity,
        attempts=attempts,
        frame=frame,
        tol=defaults.rotation_tol,
    )


def replay_protected_map(
    mps: SymmetricMPS,
    transcript: Sequence[MeasurementRecord],
    bases: Sequence[MeasurementBasis],
) -> np.ndarray:
    """Multiply the protected factors of the recorded outcomes again."""
    if len(bases) != len(transcript):
        raise LengthMismatch("One basis per transcript record is required")
    net = IDENTITY2.copy()
    for record, basis in zip(transcript, bases):
        if mps.translation_invariant:
            A = mps.A
        else:
            A = mps.site(mps.n_sites - 1 - record.site)
        factors = split_map(induced_maps(A, basis)[record.outcome])
        if factors is None:
            raise InvalidInput(f"Record at site {record.site} does not factor")
        net = factors[1] @ net
    return net


def success_rate(
    trials: int,
    seed: int = DEFAULTS.measurement_seed,
    defaults: Defaults = DEFAULTS,
) -> float:
    """Fraction of single AKLT R_z attempts that land on a rotation outcome."""
    if trials < 1:
        raise InvalidInput("trials must be positive")
    mps = aklt_mps()
    rng = rng_for(seed, 2)
    successes = 0
    for _ in range(trials):
        frame = LogicalFrame(boundary=BoundaryVector.from_vector(haar_state(rng, 2)))
        basis = aklt_rotation_basis("z", rng.uniform(0, 2 * np.pi))
        frame = measure_site(mps, frame, basis, rng=rng, defaults=defaults)
        successes += frame.transcript[-1].outcome != 2
    return successes / trials


# --- identity-gate protection ------------------------------------------------

PROTECTION_SETUPS = {
    "Z2xZ2": (("1_(1,0)", "1_(1,1)", "1_(0,1)"), (("2~", 2),)),
    "A4": (("3",), (("2~_(0)", 1), ("2~_(1)", 1), ("2~_(2)", 1))),
    "S4": (("3_(1)",), (("2~_(0)", 1), ("2~_(1)", 1), ("4~", 1))),
}


@dataclass(frozen=True, eq=False)
class ProtectionReport:
    group: str
    n_sites: int
    fidelity: float
    byproduct: str
    factorization_residual: float
    probability_defect: float
    control_split_lost: bool
    control_schmidt_rank: int
    transcript: Tuple[MeasurementRecord, ...]
    tol: float
    probability_tol: float

    @property
    def passed(self) -> bool:
        return (
            self.fidelity >= 1 - self.tol
            and self.probability_defect <= self.probability_tol
            and self.control_split_lost
            and self.control_schmidt_rank > 1
        )


def identity_protection_test(
    group: str,
    B_seed: int = DEFAULTS.b_seed,
    n_sites: int = 8,
    measurement_seed: int = DEFAULTS.measurement_seed,
    degeneracy: Optional[int] = None,
    defaults: Defaults = DEFAULTS,
) -> ProtectionReport:
    """Measure ``n_sites`` sites in the {x, y, z} basis of a random symmetric chain.

    The qubit factor of the boundary must come out as (Pauli word)·|ψ⟩ while
    the junk factor absorbs the random B blocks. A single (|x⟩+|y⟩)/√2 outcome
    serves as the negative control and must entangle the two factors.
    """
    try:
        phys, virtual = PROTECTION_SETUPS[group]
    except KeyError:
        raise InvalidInput(
            f"identity_protection_test supports {', '.join(PROTECTION_SETUPS)}, "
            f"got '{group}'"
        ) from None
    if degeneracy is not None:
        virtual = tuple((label, degeneracy) for label, _ in virtual)
    if n_sites < 1:
        raise InvalidInput("n_sites must be positive")
    mps = build_mps(
        group, phys, "a", None, virtual, "random", seed=B_seed, defaults=defaults
    )
    factorization = protected_factorization(mps)
    if factorization is None:
        raise InvalidInput(f"The {group} build does not factor as junk ⊗ Pauli")
    junk_dim = mps.bond_dim // 2

    rng = rng_for(measurement_seed, 3)
    psi = haar_state(rng, 2)
    junk = haar_state(rng_for(B_seed, 4), junk_dim)
    frame = LogicalFrame.start(junk, psi)
    basis = pauli_basis(mps.basis_labels or ("x", "y", "z"))
    for _ in range(n_sites):
        frame = measure_site(mps, frame, basis, rng=rng, defaults=defaults)

    if frame.split:
        expected = frame.byproduct.matrix @ psi
        fidelity = float(abs(np.vdot(expected, frame.boundary.protected)) ** 2)
    else:
        fidelity = 0.0
    defect = max((abs(s - 1.0) for s in frame.probability_sums()), default=0.0)

    control = measure_site(
        mps, LogicalFrame.start(junk, psi), mixing_basis(), outcome=0, defaults=defaults
    )
    rank = vector_schmidt_rank(control.boundary.vector, junk_dim)
    return ProtectionReport(
        group=group,
        n_sites=n_sites,
        fidelity=fidelity,
        byproduct=str(frame.byproduct),
        factorization_residual=factorization.residual,
        probability_defect=defect,
        control_split_lost=not control.split,
        control_schmidt_rank=rank,
        transcript=frame.transcript,
        tol=defaults.protection_tol,
        probability_tol=defaults.probability_tol,
    )
