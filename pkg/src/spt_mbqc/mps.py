"""Symmetric matrix product states built from Clebsch-Gordan data.

Site tensors are assembled block by block: for physical irrep slot ``s``
with component ``m`` and virtual sectors α, β the (α, β) block of A^(s, m)
is Σ_n B^(s)_(α β; n) ⊗ C^(n)_m, where C comes from the CG engine for the
χ-rephased physical irrep. The virtual space is ordered as
(sector, degeneracy index, irrep component), component fastest, so the
virtual representation is ⊕_a 1_(n_a) ⊗ D_a.
"""

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from .clebsch_gordan import CGTensor, compute_cg
from .config import DEFAULTS, Defaults
from .errors import (
    ClassMismatch,
    DimensionMismatch,
    InvalidInput,
    LengthMismatch,
    MissingCG,
)
from .groups import GroupBundle, Irrep, resolve_group
from .numerics import PAULI, SIGMA_X, SIGMA_Y, SIGMA_Z, max_abs, rng_for, unit_disk
from .output import complex_array, to_plain

logger = logging.getLogger(__name__)

BlockKey = Tuple[int, str, str, int]

SPIN1_BASIS_NOTE = (
    "spin-1 in {|x>, |y>, |z>}: |x> = (|-1> - |1>)/sqrt2, "
    "|y> = i(|-1> + |1>)/sqrt2, |z> = |0>"
)


@dataclass(frozen=True)
class BondSector:
    """One irrep block ``label`` with degeneracy ``degeneracy`` in the bond."""

    label: str
    degeneracy: int
    dim: int

    @property
    def size(self) -> int:
        return self.degeneracy * self.dim


@dataclass(frozen=True, eq=False)
class BoundaryVector:
    """Boundary vector of an open chain, optionally split as junk ⊗ protected."""

    vector: np.ndarray
    junk: Optional[np.ndarray] = None
    protected: Optional[np.ndarray] = None

    @classmethod
    def split(cls, junk: np.ndarray, protected: np.ndarray) -> "BoundaryVector":
        junk = np.asarray(junk, dtype=complex)
        protected = np.asarray(protected, dtype=complex)
        junk = junk / np.linalg.norm(junk)
        protected = protected / np.linalg.norm(protected)
        return cls(vector=np.kron(junk, protected), junk=junk, protected=protected)

    @classmethod
    def from_vector(cls, vector: Sequence[complex]) -> "BoundaryVector":
        return cls(vector=np.asarray(vector, dtype=complex))

    @property
    def is_split(self) -> bool:
        return self.junk is not None and self.protected is not None

    @property
    def dim(self) -> int:
        return self.vector.shape[0]

    def normalized(self) -> "BoundaryVector":
        norm = np.linalg.norm(self.vector)
        if norm == 0:
            raise InvalidInput("Cannot normalize a zero boundary vector")
        return replace(self, vector=self.vector / norm)


@dataclass(frozen=True)
class Factorization:
    """Junk blocks B_i and Pauli labels with A^i = B_i ⊗ σ_(label_i)."""

    junk: Tuple[np.ndarray, ...]
    paulis: Tuple[str, ...]
    residual: float


@dataclass(frozen=True, eq=False)
class SymmetricMPS:
    """Site tensors with the decomposition that produced them.

    ``tensors`` has shape (sites, d, D, D); a single site means the chain is
    translation invariant.
    """

    tensors: np.ndarray
    sectors: Tuple[BondSector, ...] = ()
    group: Optional[str] = None
    phys_irreps: Tuple[str, ...] = ()
    basis_labels: Tuple[str, ...] = ()
    omega: Optional[str] = None
    chi_label: Optional[str] = None
    basis_note: str = ""
    blocks: Tuple[Dict[BlockKey, np.ndarray], ...] = ()
    cgs: Dict[BlockKey, CGTensor] = field(default_factory=dict)
    phys_dims: Tuple[int, ...] = ()
    gauge: Dict[str, Any] = field(default_factory=dict)

    @property
    def n_sites(self) -> int:
        return self.tensors.shape[0]

    @property
    def translation_invariant(self) -> bool:
        return self.n_sites == 1

    @property
    def phys_dim(self) -> int:
        return self.tensors.shape[1]

    @property
    def bond_dim(self) -> int:
        return self.tensors.shape[2]

    @property
    def A(self) -> np.ndarray:
        """Tensors of the first site, shape (d, D, D)."""
        return self.tensors[0]

    def site(self, k: int) -> np.ndarray:
        if self.translation_invariant:
            return self.tensors[0]
        return self.tensors[k]

    def basis_index(self, label: str) -> int:
        try:
            return self.basis_labels.index(label)
        except ValueError:
            raise InvalidInput(
                f"Unknown physical basis label '{label}' "
                f"(known: {', '.join(self.basis_labels)})"
            ) from None

    def reconstruct(self) -> np.ndarray:
        """Re-assemble every site from the stored B blocks and CG tensors."""
        if not self.blocks or not self.cgs:
            raise InvalidInput("This MPS carries no B/CG decomposition")
        return np.stack(
            [
                assemble_site(blocks, self.cgs, self.phys_dims, self.sectors)
                for blocks in self.blocks
            ]
        )

    def reconstruction_residual(self) -> float:
        return max_abs(self.reconstruct() - self.tensors)

    def gauge_transform(self, S: np.ndarray) -> "SymmetricMPS":
        """Conjugate every tensor as S⁻¹ A S; the B/CG record no longer applies."""
        S = np.asarray(S, dtype=complex)
        if S.shape != (self.bond_dim, self.bond_dim):
            raise DimensionMismatch(
                f"Gauge matrix must be {self.bond_dim}x{self.bond_dim}"
            )
        S_inv = np.linalg.inv(S)
        tensors = np.einsum("ab,sibc,cd->siad", S_inv, self.tensors, S)
        return replace(
            self, tensors=tensors, blocks=(), cgs={}, gauge={"transformed": True}
        )

    def transfer_matrix(self, site: int = 0) -> np.ndarray:
        return transfer_matrix(self.site(site))

    def normalized(self) -> "SymmetricMPS":
        """Scale each site so its transfer matrix has spectral radius one."""
        scaled = []
        for k in range(self.n_sites):
            radius = np.max(np.abs(np.linalg.eigvals(self.transfer_matrix(k))))
            scaled.append(self.site(k) / np.sqrt(radius))
        return replace(self, tensors=np.stack(scaled))


def transfer_matrix(A: np.ndarray, B: Optional[np.ndarray] = None) -> np.ndarray:
    """Σ_i A^i ⊗ conj(B^i), acting on row-major vec(X) as X ↦ Σ A^i X B^i†."""
    B = A if B is None else B
    return np.einsum("iab,icd->acbd", A, B.conj()).reshape(
        A.shape[1] * B.shape[1], A.shape[2] * B.shape[2]
    )


def split_labels(text: str) -> List[str]:
    """Split a comma list of irrep labels, ignoring commas inside parentheses."""
    labels, depth, current = [], 0, []
    for char in text:
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
        if char == "," and depth == 0:
            labels.append("".join(current).strip())
            current = []
        else:
            current.append(char)
    labels.append("".join(current).strip())
    return [label for label in labels if label]


def parse_virtual_spec(text: str) -> List[Tuple[str, int]]:
    """``"2~_(0):2,2~_(1)"`` → [("2~_(0)", 2), ("2~_(1)", 1)]."""
    spec = []
    for item in split_labels(text):
        label, sep, count = item.rpartition(":")
        if not sep:
            label, count = item, "1"
        try:
            spec.append((label.strip(), int(count)))
        except ValueError:
            raise InvalidInput(f"Bad virtual sector '{item}'") from None
    return spec


def _sector_offsets(sectors: Sequence[BondSector]) -> Dict[str, int]:
    offsets, position = {}, 0
    for sector in sectors:
        offsets[sector.label] = position
        position += sector.size
    return offsets


def assemble_site(
    blocks: Mapping[BlockKey, np.ndarray],
    cgs: Mapping[BlockKey, CGTensor],
    phys_dims: Sequence[int],
    sectors: Sequence[BondSector],
) -> np.ndarray:
    """A^(s, m) from B blocks and CG tensors for one site."""
    offsets = _sector_offsets(sectors)
    by_label = {sector.label: sector for sector in sectors}
    phys_offsets = np.concatenate([[0], np.cumsum(phys_dims)]).astype(int)
    D = sum(sector.size for sector in sectors)
    A = np.zeros((int(phys_offsets[-1]), D, D), dtype=complex)
    for key, B in blocks.items():
        slot, alpha, beta, _ = key
        cg = cgs[key]
        a, b = by_label[alpha], by_label[beta]
        rows = slice(offsets[alpha], offsets[alpha] + a.size)
        cols = slice(offsets[beta], offsets[beta] + b.size)
        for m in range(phys_dims[slot]):
            A[phys_offsets[slot] + m, rows, cols] += np.kron(B, cg.block(m))
    return A


def _trivial_irrep(bundle: GroupBundle) -> Irrep:
    for rep in bundle.one_dimensional():
        if max_abs(rep.matrices - 1.0) < 1e-12:
            return rep
    raise InvalidInput(f"Group {bundle.name} lists no trivial irrep")


def preset_labels(
    bundle: GroupBundle, phys_irreps: Sequence[str]
) -> Tuple[Tuple[str, ...], str]:
    """Basis labels and note from a matching physical preset, or generic ones."""
    for preset in bundle.presets.values():
        if tuple(phys_irreps) == preset.irreps and preset.basis_labels:
            return preset.basis_labels, preset.basis_note
    labels = []
    for label in phys_irreps:
        dim = bundle.irrep(label).dim
        labels.extend([label] if dim == 1 else [f"{label}:{m}" for m in range(dim)])
    return tuple(labels), ""


def _resolve_sectors(
    bundle: GroupBundle, virtual_spec: Sequence[Tuple[str, int]], omega: str
) -> Tuple[BondSector, ...]:
    sectors, seen = [], set()
    for label, degeneracy in virtual_spec:
        rep = bundle.irrep(label)
        if rep.class_label != omega:
            raise ClassMismatch(
                f"Virtual irrep {label} is in class '{rep.class_label}', "
                f"expected '{omega}'"
            )
        if degeneracy < 1:
            raise InvalidInput(
                f"Degeneracy of {label} must be positive, got {degeneracy}"
            )
        if label in seen:
            raise InvalidInput(f"Virtual irrep {label} is listed twice")
        seen.add(label)
        sectors.append(BondSector(label=label, degeneracy=int(degeneracy), dim=rep.dim))
    if not sectors:
        raise InvalidInput("The virtual space needs at least one sector")
    return tuple(sectors)


def _draw_blocks(
    cgs: Mapping[BlockKey, CGTensor],
    sectors: Sequence[BondSector],
    B_blocks: Union[str, Mapping[BlockKey, Any]],
    seed: int,
    site: int,
) -> Dict[BlockKey, np.ndarray]:
    by_label = {sector.label: sector for sector in sectors}
    index = {sector.label: k for k, sector in enumerate(sectors)}
    if isinstance(B_blocks, Mapping):
        unknown = [key for key in B_blocks if tuple(key) not in cgs]
        if unknown:
            raise MissingCG(f"No CG tensor for B block(s) {unknown}")
    blocks = {}
    for key in cgs:
        slot, alpha, beta, copy = key
        shape = (by_label[alpha].degeneracy, by_label[beta].degeneracy)
        if isinstance(B_blocks, Mapping):
            if key not in B_blocks:
                blocks[key] = np.zeros(shape, dtype=complex)
                continue
            B = np.atleast_2d(np.asarray(B_blocks[key], dtype=complex))
            if B.shape != shape:
                raise DimensionMismatch(
                    f"B block {key} has shape {B.shape}, expected {shape}"
                )
            blocks[key] = B
        elif B_blocks == "random":
            rng = rng_for(seed, site, slot, index[alpha], index[beta], copy)
            blocks[key] = unit_disk(rng, shape)
        elif B_blocks == "identity":
            blocks[key] = np.eye(*shape, dtype=complex)
        else:
            raise InvalidInput(
                "B blocks must be 'random', 'identity' or a mapping, "
                f"got {B_blocks!r}"
            )
    return blocks


def build_mps(
    group: Union[str, GroupBundle],
    phys_irreps: Sequence[str],
    omega: str,
    chi: Optional[str],
    virtual_spec: Sequence[Tuple[str, int]],
    B_blocks: Union[str, Mapping[BlockKey, Any]] = "random",
    seed: Optional[int] = None,
    sites: int = 1,
    defaults: Defaults = DEFAULTS,
) -> SymmetricMPS:
    """Assemble a symmetric MPS from physical irreps and a virtual sector list.

    Args:
        group: Built-in group name or a loaded bundle
        phys_irreps: Labels of the class-e irreps making up the site space
        omega: Cohomology class of the virtual irreps
        chi: Label of the one-dimensional irrep used to rephase the physical
            irreps, ``None`` for the trivial irrep
        virtual_spec: (irrep label, degeneracy) pairs defining the bond
        B_blocks: ``"random"``, ``"identity"`` or a mapping from
            (slot, alpha, beta, copy) to degeneracy-space matrices
        seed: Seed for random B blocks, defaults to ``defaults.b_seed``
        sites: Number of independent sites; 1 gives a translation-invariant chain
        defaults: Tolerances and seeds

    Returns:
        SymmetricMPS with its B/CG record
    """
    bundle = group if isinstance(group, GroupBundle) else resolve_group(group)
    seed = defaults.b_seed if seed is None else seed
    if sites < 1:
        raise InvalidInput(f"sites must be at least 1, got {sites}")
    if not phys_irreps:
        raise InvalidInput("At least one physical irrep is required")

    phys = [bundle.irrep(label) for label in phys_irreps]
    for rep in phys:
        if rep.class_label != "e":
            raise ClassMismatch(
                f"Physical irrep {rep.label} must be linear (class 'e')"
            )
    sectors = _resolve_sectors(bundle, virtual_spec, omega)
    chi_rep = _trivial_irrep(bundle) if chi is None else bundle.irrep(chi)
    if chi_rep.dim != 1:
        raise InvalidInput(f"Rephasing irrep {chi_rep.label} is not one-dimensional")

    labels = {sector.label for sector in sectors}
    candidates = bundle.irreps_of_class(omega)
    cgs: Dict[BlockKey, CGTensor] = {}
    for slot, rep in enumerate(phys):
        shifted = rep.rephased(chi_rep)
        for sector in sectors:
            alpha = bundle.irrep(sector.label)
            fused = compute_cg(shifted, alpha, candidates, defaults.cg_seed, defaults)
            for cg in fused:
                if cg.beta_label in labels:
                    cgs[(slot, sector.label, cg.beta_label, cg.copy_index)] = cg
    logger.debug("Collected %d CG blocks for %s", len(cgs), bundle.name)

    phys_dims = tuple(rep.dim for rep in phys)
    blocks = tuple(
        _draw_blocks(cgs, sectors, B_blocks, seed, site) for site in range(sites)
    )
    tensors = np.stack([assemble_site(b, cgs, phys_dims, sectors) for b in blocks])
    basis_labels, note = preset_labels(bundle, phys_irreps)
    return SymmetricMPS(
        tensors=tensors,
        sectors=sectors,
        group=bundle.name,
        phys_irreps=tuple(phys_irreps),
        basis_labels=basis_labels,
        omega=omega,
        chi_label=chi_rep.label,
        basis_note=note,
        blocks=blocks,
        cgs=cgs,
        phys_dims=phys_dims,
        gauge={
            "cg_seed": defaults.cg_seed,
            "b_seed": seed,
            "B": B_blocks if isinstance(B_blocks, str) else "explicit",
            "phase_rule": "largest-magnitude CG entry real positive",
        },
    )


def aklt_mps() -> SymmetricMPS:
    """AKLT tensors A^i = σ_i in the x, y, z basis."""
    return SymmetricMPS(
        tensors=np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])[None],
        sectors=(BondSector("2~", 1, 2),),
        group="Z2xZ2",
        phys_irreps=("1_(1,0)", "1_(1,1)", "1_(0,1)"),
        basis_labels=("x", "y", "z"),
        omega="a",
        chi_label="1_(0,0)",
        basis_note=SPIN1_BASIS_NOTE,
        phys_dims=(1, 1, 1),
    )


def cluster_mps() -> SymmetricMPS:
    """Cluster-state tensors in the computational basis."""
    A0 = np.array([[1, 0], [1, 0]], dtype=complex)
    A1 = np.array([[0, 1], [0, -1]], dtype=complex)
    return SymmetricMPS(
        tensors=np.stack([A0, A1])[None],
        basis_labels=("0", "1"),
        basis_note="qubit in {|0>, |1>}",
        phys_dims=(2,),
    )


def evaluate_amplitude(
    mps: SymmetricMPS,
    config: Sequence[int],
    boundary: Union[str, Tuple[Any, Any]] = "periodic",
) -> complex:
    """Tr[Π A^(i_k)] or ⟨L| Π A^(i_k) |R⟩ for a configuration of basis indices."""
    config = list(config)
    if not config:
        raise LengthMismatch("Configuration is empty")
    if not mps.translation_invariant and len(config) != mps.n_sites:
        raise LengthMismatch(
            f"Configuration has {len(config)} sites, the chain has {mps.n_sites}"
        )
    for index in config:
        if not 0 <= index < mps.phys_dim:
            raise InvalidInput(
                f"Physical index {index} out of range 0..{mps.phys_dim - 1}"
            )

    product = np.eye(mps.bond_dim, dtype=complex)
    for k, index in enumerate(config):
        product = product @ mps.site(k)[index]

    if isinstance(boundary, str):
        if boundary != "periodic":
            raise InvalidInput(f"Unknown boundary '{boundary}'")
        return complex(np.trace(product))
    left, right = (
        b.vector if isinstance(b, BoundaryVector) else np.asarray(b)
        for b in boundary
    )
    if left.shape != (mps.bond_dim,) or right.shape != (mps.bond_dim,):
        raise DimensionMismatch(f"Boundary vectors must have length {mps.bond_dim}")
    return complex(np.vdot(left, product @ right))


def operator_schmidt_rank(
    A: np.ndarray, left_dim: int, right_dim: int, tol: float = 1e-10
) -> int:
    """Rank of ``A`` as an operator on C^left ⊗ C^right across the tensor cut."""
    A = np.asarray(A)
    if A.shape != (left_dim * right_dim, left_dim * right_dim):
        raise DimensionMismatch(
            f"Matrix of shape {A.shape} does not split as {left_dim}x{right_dim}"
        )
    reshuffled = (
        A.reshape(left_dim, right_dim, left_dim, right_dim)
        .transpose(0, 2, 1, 3)
        .reshape(left_dim**2, right_dim**2)
    )
    values = scipy.linalg.svdvals(reshuffled)
    if values.size == 0 or values[0] == 0:
        return 0
    return int(np.count_nonzero(values > tol * values[0]))


def protected_factorization(
    mps: SymmetricMPS, site: int = 0, tol: float = 1e-10
) -> Optional[Factorization]:
    """Split each A^i as B_i ⊗ σ_a with the Pauli acting on the last qubit.

    Returns:
        The junk blocks and Pauli labels, or ``None`` if some A^i does not
        factor this way
    """
    A = mps.site(site)
    D = mps.bond_dim
    if D % 2:
        return None
    junk, labels, worst = [], [], 0.0
    for Ai in A:
        blocks = Ai.reshape(D // 2, 2, D // 2, 2)
        best = None
        for name in ("X", "Y", "Z"):
            pauli = PAULI[name]
            B = np.einsum("ajbk,kj->ab", blocks, pauli) / 2
            residual = max_abs(Ai - np.kron(B, pauli))
            if max_abs(B) > tol and (best is None or residual < best[2]):
                best = (B, name, residual)
        if best is None or best[2] > tol:
            return None
        junk.append(best[0])
        labels.append(best[1])
        worst = max(worst, best[2])
    return Factorization(junk=tuple(junk), paulis=tuple(labels), residual=worst)


# --- JSON round trip --------------------------------------------------------


def mps_to_dict(mps: SymmetricMPS) -> Dict[str, Any]:
    """JSON-ready export: structure, B blocks, dense tensors and gauge record."""
    blocks = [
        {
            "site": site,
            "phys": key[0],
            "alpha": key[1],
            "beta": key[2],
            "n": key[3],
            "matrix": matrix,
        }
        for site, site_blocks in enumerate(mps.blocks)
        for key, matrix in site_blocks.items()
    ]
    return to_plain(
        {
            "group": mps.group,
            "phys_irreps": list(mps.phys_irreps),
            "phys_dims": list(mps.phys_dims),
            "basis_labels": list(mps.basis_labels),
            "basis_note": mps.basis_note,
            "omega": mps.omega,
            "chi": mps.chi_label,
            "virtual_spec": [
                {"label": s.label, "degeneracy": s.degeneracy, "dim": s.dim}
                for s in mps.sectors
            ],
            "sites": mps.n_sites,
            "tensors": mps.tensors,
            "blocks": blocks,
            "gauge": mps.gauge,
        }
    )


def mps_from_dict(data: Mapping[str, Any]) -> SymmetricMPS:
    """Rebuild an exported MPS (the CG record is not restored)."""
    try:
        tensors = complex_array(data["tensors"])
    except KeyError:
        raise InvalidInput("MPS file has no 'tensors' entry") from None
    if tensors.ndim == 3:
        tensors = tensors[None]
    if tensors.ndim != 4 or tensors.shape[2] != tensors.shape[3]:
        raise InvalidInput(f"MPS tensors must be (sites, d, D, D), got {tensors.shape}")
    sectors = tuple(
        BondSector(s["label"], int(s["degeneracy"]), int(s["dim"]))
        for s in data.get("virtual_spec", [])
    )
    n_sites = tensors.shape[0]
    blocks: List[Dict[BlockKey, np.ndarray]] = []
    if data.get("blocks"):
        blocks = [{} for _ in range(n_sites)]
    for entry in data.get("blocks", []):
        key = (int(entry["phys"]), entry["alpha"], entry["beta"], int(entry["n"]))
        blocks[int(entry["site"])][key] = complex_array(entry["matrix"])
    return SymmetricMPS(
        tensors=tensors,
        sectors=sectors,
        group=data.get("group"),
        phys_irreps=tuple(data.get("phys_irreps", ())),
        basis_labels=tuple(data.get("basis_labels", ())),
        omega=data.get("omega"),
        chi_label=data.get("chi"),
        basis_note=data.get("basis_note", ""),
        blocks=tuple(blocks),
        phys_dims=tuple(data.get("phys_dims", ())),
        gauge=dict(data.get("gauge", {})),
    )


def load_mps_json(path: Union[str, Path]) -> SymmetricMPS:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInput(f"Failed to read MPS file {path}: {e}") from None
    return mps_from_dict(data)
