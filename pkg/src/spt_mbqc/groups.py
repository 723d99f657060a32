"""Finite cover groups, their irreps, factor systems and characters.

Groups are built by closing a set of faithful generator matrices under
multiplication. Two matrices are the same element when their entries agree
after rounding to ``element_decimals`` places. Irreps are given by generator
images and materialized over every element through the recorded words.
"""

import json
import logging
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from cachetools import LRUCache, cached

from .config import DEFAULTS
from .errors import (
    InvalidInput,
    NonIntegerMultiplicity,
    NonUnitaryGenerator,
    NotScalarOnKernel,
    OrderExceeded,
    UnknownGroup,
)
from .numerics import max_abs, unitarity_defect

logger = logging.getLogger(__name__)

BUILTIN_GROUPS = {
    "Z2xZ2": "z2xz2.json",
    "D4": "d4.json",
    "A4": "a4.json",
    "S4": "s4.json",
}


def _freeze(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    array.setflags(write=False)
    return array


def element_key(matrix: np.ndarray, decimals: int = 9) -> bytes:
    """Hashable identity of a group element given by a matrix.

    Entries are rounded and negative zeros are folded into zero.
    """
    rounded = np.round(np.asarray(matrix, dtype=complex), decimals)
    return (rounded.real + 0.0).tobytes() + (rounded.imag + 0.0).tobytes()


@dataclass(frozen=True, eq=False)
class GroupTable:
    """Enumerated finite group.

    Element ids are ``0 .. order-1`` in breadth-first order from the identity,
    so ``words[g]`` is a shortest generator word for ``g``.
    """

    name: str
    mult: np.ndarray
    identity: int
    generators: Tuple[Tuple[str, int], ...]
    words: Tuple[Tuple[str, ...], ...]
    parents: Tuple[int, ...]
    last_generator: Tuple[int, ...]
    matrices: np.ndarray
    center_kernel: Optional[int] = None

    @property
    def order(self) -> int:
        return self.mult.shape[0]

    @property
    def elements(self) -> Tuple[int, ...]:
        return tuple(range(self.order))

    @property
    def generator_names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.generators)

    @property
    def inverses(self) -> np.ndarray:
        return np.argmax(self.mult == self.identity, axis=1)

    def generator(self, name: str) -> int:
        """Element id of the named generator."""
        for gen_name, element in self.generators:
            if gen_name == name:
                return element
        raise InvalidInput(f"Unknown generator '{name}' for group {self.name}")

    def element_from_word(self, word: Union[str, Sequence[str]]) -> int:
        """Multiply out a generator word (names, or one space-separated string)."""
        if isinstance(word, str):
            word = word.split()
        element = self.identity
        for name in word:
            element = int(self.mult[element, self.generator(name)])
        return element

    def word_string(self, element: int) -> str:
        return " ".join(self.words[element]) or "e"

    def with_center_kernel(self, element: Optional[int]) -> "GroupTable":
        return GroupTable(
            name=self.name,
            mult=self.mult,
            identity=self.identity,
            generators=self.generators,
            words=self.words,
            parents=self.parents,
            last_generator=self.last_generator,
            matrices=self.matrices,
            center_kernel=element,
        )

    def associativity_defects(self) -> int:
        """Number of triples violating (g1 g2) g3 = g1 (g2 g3)."""
        m = self.mult
        left = m[m[:, :, None], np.arange(self.order)[None, None, :]]
        right = m[np.arange(self.order)[:, None, None], m[None, :, :]]
        return int(np.count_nonzero(left != right))

    def conjugacy_classes(self) -> List[Tuple[int, ...]]:
        """Conjugacy classes ordered by their smallest element id."""
        inv = self.inverses
        seen = set()
        classes = []
        for g in range(self.order):
            if g in seen:
                continue
            orbit = sorted(
                {int(self.mult[self.mult[h, g], inv[h]]) for h in range(self.order)}
            )
            seen.update(orbit)
            classes.append(tuple(orbit))
        return classes


@dataclass(frozen=True, eq=False)
class Irrep:
    """Linear irrep of a cover group, i.e. a projective irrep of the quotient."""

    label: str
    dim: int
    matrices: np.ndarray
    class_label: str
    onedim_character: Optional[np.ndarray] = None

    def __call__(self, element: int) -> np.ndarray:
        return self.matrices[element]

    @property
    def character(self) -> np.ndarray:
        return np.trace(self.matrices, axis1=1, axis2=2)

    def rephased(self, chi: "Irrep", label: Optional[str] = None) -> "Irrep":
        """Irrep with matrices conj(χ(g))·D(g) for a one-dimensional ``chi``."""
        if chi.dim != 1:
            raise InvalidInput(f"Rephasing needs a 1D irrep, got {chi.label}")
        scalars = chi.matrices[:, 0, 0].conj()
        matrices = scalars[:, None, None] * self.matrices
        return make_irrep(
            label or f"{self.label}x{chi.label}*", matrices, self.class_label
        )


def make_irrep(label: str, matrices: np.ndarray, class_label: str) -> Irrep:
    matrices = _freeze(np.asarray(matrices, dtype=complex))
    dim = matrices.shape[1]
    onedim = _freeze(matrices[:, 0, 0].copy()) if dim == 1 else None
    return Irrep(
        label=label,
        dim=dim,
        matrices=matrices,
        class_label=class_label,
        onedim_character=onedim,
    )


@dataclass(frozen=True, eq=False)
class FactorSystem:
    """Factor system ω on the quotient group, indexed by coset.

    ``section[c]`` is the cover element chosen for coset ``c`` and
    ``quotient_mult`` is the quotient multiplication table.
    """

    omega: np.ndarray
    section: Tuple[int, ...]
    quotient_mult: np.ndarray
    class_label: str


@dataclass(frozen=True)
class PhysicalPreset:
    irreps: Tuple[str, ...]
    basis_note: str = ""
    basis_labels: Tuple[str, ...] = ()


@dataclass(frozen=True, eq=False)
class GroupBundle:
    """A group table with its irreps and named physical representations."""

    name: str
    cover_name: str
    table: GroupTable
    irreps: Tuple[Irrep, ...]
    presets: Dict[str, PhysicalPreset] = field(default_factory=dict)

    def irrep(self, label: str) -> Irrep:
        for rep in self.irreps:
            if rep.label == label:
                return rep
        known = ", ".join(rep.label for rep in self.irreps)
        raise InvalidInput(f"Unknown irrep '{label}' for {self.name} (known: {known})")

    def irreps_of_class(self, class_label: str) -> List[Irrep]:
        return [rep for rep in self.irreps if rep.class_label == class_label]

    def one_dimensional(self) -> List[Irrep]:
        return [rep for rep in self.irreps if rep.dim == 1]

    def preset(self, name: str) -> PhysicalPreset:
        try:
            return self.presets[name]
        except KeyError:
            raise InvalidInput(
                f"Unknown physical preset '{name}' for {self.name} "
                f"(known: {', '.join(self.presets) or 'none'})"
            ) from None


def enumerate_group(
    generator_matrices: Sequence[np.ndarray],
    max_order: int = DEFAULTS.max_order,
    names: Optional[Sequence[str]] = None,
    name: str = "G",
    decimals: int = DEFAULTS.element_decimals,
    tol: float = DEFAULTS.group_tol,
) -> GroupTable:
    """Close unitary generator matrices into a finite group.

    Args:
        generator_matrices: Square unitary matrices of one dimension
        max_order: Give up once more distinct elements than this appear
        names: Generator names, defaults to ``g0, g1, ...``
        name: Name stored on the table
        decimals: Rounding used to decide element identity
        tol: Unitarity tolerance

    Returns:
        GroupTable with words, multiplication table and faithful matrices
    """
    gens = [np.asarray(g, dtype=complex) for g in generator_matrices]
    if not gens:
        raise InvalidInput("At least one generator matrix is required")
    dim = gens[0].shape[0]
    for index, gen in enumerate(gens):
        if gen.ndim != 2 or gen.shape != (dim, dim):
            raise InvalidInput(
                f"Generator {index} has shape {gen.shape}, expected {(dim, dim)}"
            )
        if unitarity_defect(gen) > tol:
            raise NonUnitaryGenerator(f"Generator {index} is not unitary to {tol}")
    names = list(names) if names is not None else [f"g{k}" for k in range(len(gens))]
    if len(names) != len(gens) or len(set(names)) != len(names):
        raise InvalidInput("Generator names must be unique and match the generators")

    identity = np.eye(dim, dtype=complex)
    matrices = [identity]
    words: List[Tuple[str, ...]] = [()]
    parents = [0]
    last_gen = [-1]
    index_of = {element_key(identity, decimals): 0}

    cursor = 0
    while cursor < len(matrices):
        current = matrices[cursor]
        for gen_index, gen in enumerate(gens):
            product = current @ gen
            key = element_key(product, decimals)
            if key in index_of:
                continue
            if len(matrices) >= max_order:
                raise OrderExceeded(
                    f"Closure passed max_order={max_order}; the generators do not "
                    "span a finite group of that size"
                )
            index_of[key] = len(matrices)
            matrices.append(product)
            words.append(words[cursor] + (names[gen_index],))
            parents.append(cursor)
            last_gen.append(gen_index)
        cursor += 1

    stack = np.array(matrices)
    order = len(matrices)
    mult = np.empty((order, order), dtype=np.int64)
    for row in range(order):
        products = np.einsum("ij,njk->nik", stack[row], stack)
        for col in range(order):
            mult[row, col] = index_of[element_key(products[col], decimals)]

    generators = tuple(
        (gen_name, index_of[element_key(gen, decimals)])
        for gen_name, gen in zip(names, gens)
    )
    logger.debug("Enumerated %s with order %d", name, order)
    return GroupTable(
        name=name,
        mult=_freeze(mult),
        identity=0,
        generators=generators,
        words=tuple(words),
        parents=tuple(parents),
        last_generator=tuple(last_gen),
        matrices=_freeze(stack),
    )


def materialize(table: GroupTable, images: Mapping[str, np.ndarray]) -> np.ndarray:
    """Extend generator images to every element along the recorded words."""
    names = table.generator_names
    missing = [n for n in names if n not in images]
    if missing:
        raise InvalidInput(f"Missing generator images for: {', '.join(missing)}")
    imgs = [np.atleast_2d(np.asarray(images[n], dtype=complex)) for n in names]
    dim = imgs[0].shape[0]
    out = np.empty((table.order, dim, dim), dtype=complex)
    out[table.identity] = np.eye(dim)
    for element in range(table.order):
        if element == table.identity:
            continue
        out[element] = out[table.parents[element]] @ imgs[table.last_generator[element]]
    return out


def homomorphism_residual(table: GroupTable, matrices: np.ndarray) -> float:
    """max over pairs of |D(g)D(h) − D(gh)| on the cover."""
    products = np.einsum("aij,bjk->abik", matrices, matrices)
    return max_abs(products - matrices[table.mult])


def classify_irrep(
    table: GroupTable, rep: Irrep, tol: float = DEFAULTS.group_tol
) -> str:
    """Cohomology class from the sign of the central kernel element."""
    if table.center_kernel is None:
        raise InvalidInput(
            f"Group {table.name} has no designated central kernel element"
        )
    image = rep(table.center_kernel)
    eye = np.eye(rep.dim)
    if max_abs(image - eye) < tol:
        return "e"
    if max_abs(image + eye) < tol:
        return "a"
    raise NotScalarOnKernel(
        f"Irrep {rep.label} does not map the kernel element to ±identity"
    )


def quotient_section(
    table: GroupTable,
) -> Tuple[Tuple[int, ...], np.ndarray, np.ndarray]:
    """Coset representatives modulo the central kernel element.

    Returns:
        (section, coset index of every element, quotient multiplication table)
    """
    z = table.center_kernel
    coset_of = np.full(table.order, -1, dtype=np.int64)
    section: List[int] = []
    for g in range(table.order):
        if coset_of[g] >= 0:
            continue
        coset_of[g] = len(section)
        if z is not None:
            coset_of[table.mult[z, g]] = len(section)
        # ids are breadth-first, so the first member met has the shorter word
        section.append(g)
    sec = np.array(section)
    qmult = coset_of[table.mult[sec[:, None], sec[None, :]]]
    return tuple(section), coset_of, qmult


def factor_system(
    table: GroupTable,
    rep: Irrep,
    threshold: float = DEFAULTS.omega_entry_threshold,
) -> FactorSystem:
    """Factor system of ``rep`` seen as a projective irrep of the quotient."""
    section, _, qmult = quotient_section(table)
    size = len(section)
    sec = np.array(section)
    omega = np.empty((size, size), dtype=complex)
    for c1 in range(size):
        for c2 in range(size):
            product = rep(sec[c1]) @ rep(sec[c2])
            target = rep(sec[qmult[c1, c2]])
            flat_p, flat_t = product.ravel(), target.ravel()
            pivot = int(np.flatnonzero(np.abs(flat_p) > threshold)[0])
            omega[c1, c2] = flat_p[pivot] / flat_t[pivot]
    omega, qmult = _freeze(omega), _freeze(qmult)
    if table.center_kernel is not None:
        label = classify_irrep(table, rep)
    else:
        label = gauge_invariant_class(FactorSystem(omega, section, qmult, "e"))
    return FactorSystem(
        omega=omega, section=section, quotient_mult=qmult, class_label=label
    )


def projective_closure_residual(
    table: GroupTable, rep: Irrep, fs: FactorSystem
) -> float:
    """max |D(g1)D(g2) − ω(g1,g2) D(g1g2)| over the quotient section."""
    sec = np.array(fs.section)
    mats = rep.matrices[sec]
    products = np.einsum("aij,bjk->abik", mats, mats)
    expected = fs.omega[:, :, None, None] * mats[fs.quotient_mult]
    return max_abs(products - expected)


def cocycle_residual(fs: FactorSystem) -> float:
    """max |ω(g1,g2g3)ω(g2,g3) − ω(g1,g2)ω(g1g2,g3)| over all triples."""
    w, m = fs.omega, fs.quotient_mult
    n = w.shape[0]
    g1 = np.arange(n)[:, None, None]
    g2 = np.arange(n)[None, :, None]
    g3 = np.arange(n)[None, None, :]
    lhs = w[g1, m[g2, g3]] * w[g2, g3]
    rhs = w[g1, g2] * w[m[g1, g2], g3]
    return max_abs(lhs - rhs)


def rephase_factor_system(
    fs: FactorSystem, beta: Sequence[complex], tol: float = DEFAULTS.group_tol
) -> FactorSystem:
    """Gauge transform ω(g1,g2) → ω(g1,g2)β(g1)β(g2)/β(g1g2)."""
    beta = np.asarray(beta, dtype=complex)
    if beta.shape != (fs.omega.shape[0],):
        raise InvalidInput(
            f"beta needs one entry per quotient element ({fs.omega.shape[0]}), "
            f"got {beta.shape}"
        )
    if max_abs(np.abs(beta) - 1.0) > tol:
        raise InvalidInput("beta must have unit modulus everywhere")
    omega = fs.omega * beta[:, None] * beta[None, :] / beta[fs.quotient_mult]
    return FactorSystem(
        omega=_freeze(omega),
        section=fs.section,
        quotient_mult=fs.quotient_mult,
        class_label=fs.class_label,
    )


def gauge_invariant_class(fs: FactorSystem, tol: float = DEFAULTS.group_tol) -> str:
    """Return "a" when some commuting pair has ω(g,h) ≠ ω(h,g), otherwise "e"."""
    m = fs.quotient_mult
    commuting = m == m.T
    ratio = fs.omega / fs.omega.T
    if np.any(np.abs(ratio[commuting] - 1.0) > tol):
        return "a"
    return "e"


def character_norm(table: GroupTable, rep: Irrep) -> float:
    """(1/|G|) Σ |χ(g)|², equal to one for irreps."""
    return float(np.sum(np.abs(rep.character) ** 2).real / table.order)


def orthogonality_residual(table: GroupTable, irreps: Sequence[Irrep]) -> float:
    """Max deviation of the character inner products from δ_ab."""
    chars = np.array([rep.character for rep in irreps])
    gram = chars @ chars.conj().T / table.order
    return max_abs(gram - np.eye(len(irreps)))


def character_table(
    table: GroupTable, irreps: Sequence[Irrep]
) -> Tuple[List[Tuple[int, ...]], np.ndarray]:
    """Characters evaluated on one representative per conjugacy class."""
    classes = table.conjugacy_classes()
    reps = [cls[0] for cls in classes]
    values = np.array([[rep.character[g] for g in reps] for rep in irreps])
    return classes, values


def fusion_multiplicities(
    i: Irrep,
    alpha: Irrep,
    irreps: Sequence[Irrep],
    tol: float = DEFAULTS.multiplicity_tol,
) -> Dict[str, int]:
    """Multiplicities n^β of i ⊗ α = ⊕ n^β β from characters.

    Only non-zero multiplicities are returned.
    """
    order = i.matrices.shape[0]
    product = i.character * alpha.character
    result: Dict[str, int] = {}
    covered = 0
    for beta in irreps:
        value = np.sum(product * beta.character.conj()) / order
        nearest = round(value.real)
        if abs(value - nearest) > tol:
            raise NonIntegerMultiplicity(
                f"Multiplicity of {beta.label} in {i.label} x {alpha.label} "
                f"is {value:.6g}"
            )
        if nearest:
            result[beta.label] = int(nearest)
            covered += int(nearest) * beta.dim
    if covered != i.dim * alpha.dim:
        raise InvalidInput(
            f"Irrep set accounts for dimension {covered} of {i.label} x {alpha.label} "
            f"(needs {i.dim * alpha.dim})"
        )
    return result


def identify_irrep(
    rep: Irrep, irreps: Iterable[Irrep], tol: float = 1e-8
) -> Optional[str]:
    """Label of the irrep with the same character, if any."""
    for candidate in irreps:
        if candidate.dim != rep.dim:
            continue
        if max_abs(candidate.character - rep.character) < tol:
            return candidate.label
    return None


# --- group specification files ---------------------------------------------


def _parse_scalar(value) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise InvalidInput(f"Complex entries are [re, im], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    return complex(value)


def parse_matrix(value) -> np.ndarray:
    """Matrix from JSON: nested rows of numbers or [re, im] pairs, or a scalar."""
    sequence = isinstance(value, (list, tuple))
    if sequence and value and isinstance(value[0], (list, tuple)):
        rows = [[_parse_scalar(entry) for entry in row] for row in value]
        widths = {len(row) for row in rows}
        if len(widths) != 1:
            raise InvalidInput("Ragged matrix in group specification")
        return np.array(rows, dtype=complex)
    return np.array([[_parse_scalar(value)]], dtype=complex)


def group_from_spec(spec: Mapping, tol: float = DEFAULTS.group_tol) -> GroupBundle:
    """Build a GroupBundle from a parsed group specification mapping."""
    try:
        name = spec["name"]
        gen_mats = [parse_matrix(m) for m in spec["generator_matrices"]]
        irrep_specs = spec["irreps"]
    except KeyError as e:
        raise InvalidInput(f"Group specification is missing key {e}") from None

    names = spec.get("generator_names") or [f"g{k}" for k in range(len(gen_mats))]
    table = enumerate_group(
        gen_mats,
        max_order=int(spec.get("max_order", DEFAULTS.max_order)),
        names=names,
        name=spec.get("cover_name", name),
        tol=tol,
    )
    kernel_word = spec.get("center_kernel_word")
    if kernel_word:
        table = table.with_center_kernel(table.element_from_word(kernel_word))

    irreps: List[Irrep] = []
    by_label: Dict[str, Irrep] = {}
    for entry in irrep_specs:
        label = entry["label"]
        declared = entry.get("class", "e")
        if "tensor_product" in entry:
            try:
                left, right = (by_label[lbl] for lbl in entry["tensor_product"])
            except KeyError as e:
                raise InvalidInput(
                    f"Irrep {label} refers to {e} before it is defined"
                ) from None
            matrices = np.einsum("gij,gkl->gikjl", left.matrices, right.matrices)
            dim = left.dim * right.dim
            matrices = matrices.reshape(table.order, dim, dim)
        else:
            images = {
                gen: parse_matrix(m) for gen, m in entry["generator_images"].items()
            }
            for gen, image in images.items():
                if unitarity_defect(image) > tol:
                    raise InvalidInput(
                        f"Image of {gen} in irrep {label} is not unitary"
                    )
            matrices = materialize(table, images)
        residual = homomorphism_residual(table, matrices)
        if residual > tol:
            raise InvalidInput(
                f"Irrep {label} images do not respect the group law "
                f"(residual {residual:.3g})"
            )
        rep = make_irrep(label, matrices, declared)
        irreps.append(rep)
        by_label[label] = rep

    presets = {
        preset_name: PhysicalPreset(
            irreps=tuple(p["irreps"]),
            basis_note=p.get("basis_note", ""),
            basis_labels=tuple(p.get("basis_labels", ())),
        )
        for preset_name, p in spec.get("physical_presets", {}).items()
    }
    return GroupBundle(
        name=name,
        cover_name=spec.get("cover_name", name),
        table=table,
        irreps=tuple(irreps),
        presets=presets,
    )


def load_group_file(path: Union[str, Path]) -> GroupBundle:
    """Read a JSON group specification from disk."""
    try:
        spec = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInput(f"Failed to read group file {path}: {e}") from None
    return group_from_spec(spec)


@cached(cache=LRUCache(maxsize=16))
def load_builtin(name: str) -> GroupBundle:
    """Cached bundle for one of the built-in groups."""
    try:
        filename = BUILTIN_GROUPS[name]
    except KeyError:
        raise UnknownGroup(
            f"Unknown group '{name}' (built-ins: {', '.join(BUILTIN_GROUPS)})"
        ) from None
    text = resources.files("spt_mbqc").joinpath("data", filename).read_text()
    return group_from_spec(json.loads(text))


def builtin_group(name: str) -> Tuple[GroupTable, List[Irrep]]:
    """Cover table and every listed irrep of a built-in group."""
    bundle = load_builtin(name)
    return bundle.table, list(bundle.irreps)


def resolve_group(
    name: Optional[str] = None, path: Optional[Union[str, Path]] = None
) -> GroupBundle:
    """Built-in by name, ``Dn`` for the cover of D_n, or a group file at ``path``."""
    if path is not None:
        return load_group_file(path)
    if name is None:
        raise InvalidInput("Give a built-in group name or a group file")
    if name not in BUILTIN_GROUPS:
        match = re.fullmatch(r"D(\d+)", name)
        if match:
            return dihedral_cover(int(match.group(1)))
    return load_builtin(name)


# --- dihedral covers -------------------------------------------------------


@cached(cache=LRUCache(maxsize=8))
def dihedral_cover(n: int) -> GroupBundle:
    """Order-4n cover of D_n (n even) with its class e and class a irreps.

    The two-dimensional irreps send a to diag(e^{-ikη/2}, e^{ikη/2}) with
    η = 2π/n; x goes to σ_y for even k and to −iσ_y for odd k, so that the
    cover relation a^n = x² holds in every irrep.
    """
    if n < 2 or n % 2:
        raise InvalidInput(f"dihedral_cover needs an even n >= 2, got {n}")
    eta = 2 * np.pi / n
    sigma_y = np.array([[0, -1j], [1j, 0]])

    def rotation(k: int) -> np.ndarray:
        return np.diag([np.exp(-0.5j * k * eta), np.exp(0.5j * k * eta)])

    table = enumerate_group(
        [rotation(1), -1j * sigma_y], names=["a", "x"], name=f"Dic{n}"
    )
    table = table.with_center_kernel(table.element_from_word(" ".join(["a"] * n)))

    irreps = []
    for p in (0, 1):
        for q in (0, 1):
            images = {"a": (-1) ** p, "x": (-1) ** q}
            irreps.append(make_irrep(f"1_({p},{q})", materialize(table, images), "e"))
    for k in range(2, n - 1, 2):
        images = {"a": rotation(k), "x": sigma_y}
        irreps.append(make_irrep(f"2_({k})", materialize(table, images), "e"))
    for k in range(1, n, 2):
        images = {"a": rotation(k), "x": -1j * sigma_y}
        irreps.append(make_irrep(f"2~_({k})", materialize(table, images), "a"))
    return GroupBundle(
        name=f"D{n}", cover_name=f"Dic{n}", table=table, irreps=tuple(irreps)
    )


# --- whole-group diagnostics -----------------------------------------------


@dataclass(frozen=True)
class IrrepCheck:
    label: str
    dim: int
    declared_class: str
    computed_class: str
    unitarity: float
    homomorphism: float
    projective_closure: float
    cocycle: float
    character_norm: float


@dataclass(frozen=True)
class GroupCheckReport:
    name: str
    order: int
    sum_dim_squared: int
    associativity_defects: int
    orthogonality: float
    irreps: Tuple[IrrepCheck, ...]
    tol: float

    @property
    def passed(self) -> bool:
        if self.sum_dim_squared != self.order or self.associativity_defects:
            return False
        if self.orthogonality > self.tol:
            return False
        for row in self.irreps:
            if row.declared_class != row.computed_class:
                return False
            worst = max(
                row.unitarity, row.homomorphism, row.projective_closure, row.cocycle
            )
            if worst > self.tol or abs(row.character_norm - 1.0) > self.tol:
                return False
        return True


def check_group(
    bundle: GroupBundle, tol: float = DEFAULTS.group_tol
) -> GroupCheckReport:
    """Run every consistency check on a group bundle."""
    table = bundle.table
    rows = []
    for rep in bundle.irreps:
        fs = factor_system(table, rep)
        unitarity = max(unitarity_defect(m) for m in rep.matrices)
        if table.center_kernel is not None:
            computed = classify_irrep(table, rep)
        else:
            computed = fs.class_label
        rows.append(
            IrrepCheck(
                label=rep.label,
                dim=rep.dim,
                declared_class=rep.class_label,
                computed_class=computed,
                unitarity=unitarity,
                homomorphism=homomorphism_residual(table, rep.matrices),
                projective_closure=projective_closure_residual(table, rep, fs),
                cocycle=cocycle_residual(fs),
                character_norm=character_norm(table, rep),
            )
        )
    return GroupCheckReport(
        name=bundle.name,
        order=table.order,
        sum_dim_squared=sum(rep.dim**2 for rep in bundle.irreps),
        associativity_defects=table.associativity_defects(),
        orthogonality=orthogonality_residual(table, bundle.irreps),
        irreps=tuple(rows),
        tol=tol,
    )
