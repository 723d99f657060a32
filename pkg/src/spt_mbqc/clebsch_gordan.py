"""Clebsch-Gordan matrices by group averaging.

For irreps ``i`` and ``alpha`` of a cover group the sum
Σ_g (D_i ⊗ D_α)(g) · S · D_β(g)† over an arbitrary seed ``S`` lands in the
intertwiner space from β into i ⊗ α. Normalizing its columns gives the CG
block for β. When β appears twice, two seeds are averaged and orthogonalized
against each other.

Convention: ``coeffs`` has rows indexed by (m_i, m_α) with m_α fastest and
satisfies (D_i ⊗ D_α)(g) · coeffs = coeffs · D_β(g).
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from cachetools import LRUCache, cached

from .config import DEFAULTS, Defaults
from .errors import (
    DegenerateSeed,
    DimensionMismatch,
    MultiplicityTooHigh,
    VerificationFailed,
)
from .groups import Irrep, fusion_multiplicities, load_builtin
from .numerics import gauge_fix, max_abs, rng_for, unit_disk

logger = logging.getLogger(__name__)

PHASE_RULE = "largest-magnitude entry real positive (first in row-major order on ties)"


@dataclass(frozen=True, eq=False)
class CGTensor:
    """Change-of-basis block for i ⊗ α → β, copy ``copy_index``."""

    i_label: str
    alpha_label: str
    beta_label: str
    copy_index: int
    coeffs: np.ndarray
    phase_convention: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    @property
    def alpha_dim(self) -> int:
        return int(self.phase_convention.get("alpha_dim", 0)) or self.coeffs.shape[0]

    def block(self, m_i: int) -> np.ndarray:
        """dim(α) × dim(β) slice for physical component ``m_i``."""
        da = self.alpha_dim
        return self.coeffs[m_i * da : (m_i + 1) * da, :]


@dataclass(frozen=True)
class CGReport:
    intertwining: float
    orthonormality: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.intertwining < self.tol and self.orthonormality < self.tol


def product_matrices(i: Irrep, alpha: Irrep) -> np.ndarray:
    """Stack of D_i(g) ⊗ D_α(g) over all elements."""
    order = i.matrices.shape[0]
    dim = i.dim * alpha.dim
    stacked = np.einsum("gij,gkl->gikjl", i.matrices, alpha.matrices)
    return stacked.reshape(order, dim, dim)


def average_intertwiner(
    Dprime: np.ndarray, D: np.ndarray, seed: np.ndarray
) -> np.ndarray:
    """Σ_g D'(g) · seed · D(g)†.

    Args:
        Dprime: Stack (|G|, n, n) of the product representation
        D: Stack (|G|, m, m) of the target (block-diagonal or single) representation
        seed: Arbitrary (n, m) matrix

    Returns:
        The averaged (n, m) matrix
    """
    Dprime, D, seed = np.asarray(Dprime), np.asarray(D), np.asarray(seed)
    if Dprime.ndim != 3 or D.ndim != 3 or Dprime.shape[0] != D.shape[0]:
        raise DimensionMismatch(
            "Representations must be stacks over the same group, "
            f"got {Dprime.shape} and {D.shape}"
        )
    if seed.shape != (Dprime.shape[1], D.shape[1]):
        raise DimensionMismatch(
            f"Seed shape {seed.shape} does not match ({Dprime.shape[1]}, {D.shape[1]})"
        )
    return np.einsum("gij,jk,glk->il", Dprime, seed, D.conj())


def verify_cg(
    cg: CGTensor,
    i: Irrep,
    alpha: Irrep,
    beta: Irrep,
    tol: float = DEFAULTS.cg_residual_tol,
) -> CGReport:
    """Intertwining residual and column orthonormality defect of one block."""
    expected = (i.label, alpha.label, beta.label)
    if (cg.i_label, cg.alpha_label, cg.beta_label) != expected:
        raise DimensionMismatch(
            f"CG labels ({cg.i_label}, {cg.alpha_label}, {cg.beta_label}) do not match "
            f"({i.label}, {alpha.label}, {beta.label})"
        )
    C = cg.coeffs
    lhs = product_matrices(i, alpha) @ C
    rhs = C @ beta.matrices
    gram = C.conj().T @ C
    return CGReport(
        intertwining=max_abs(lhs - rhs),
        orthonormality=max_abs(gram - np.eye(C.shape[1])),
        tol=tol,
    )


def _normalize_columns(block: np.ndarray) -> np.ndarray:
    return block / np.linalg.norm(block, axis=0, keepdims=True)


def compute_cg(
    i: Irrep,
    alpha: Irrep,
    irrep_set: Sequence[Irrep],
    rng_seed: int = DEFAULTS.cg_seed,
    defaults: Defaults = DEFAULTS,
) -> List[CGTensor]:
    """All CG blocks for i ⊗ α, one per (β, copy).

    Args:
        i: Physical (possibly rephased) irrep
        alpha: Virtual irrep
        irrep_set: Candidate irreps β
        rng_seed: Seed of the counter-based stream used for seed matrices
        defaults: Tolerances and retry budget

    Returns:
        CGTensors ordered as ``irrep_set``, copies in increasing order
    """
    multiplicities = fusion_multiplicities(
        i, alpha, irrep_set, defaults.multiplicity_tol
    )
    too_high = {label: n for label, n in multiplicities.items() if n > 2}
    if too_high:
        raise MultiplicityTooHigh(
            f"{i.label} x {alpha.label} has multiplicity above 2: {too_high}"
        )

    Dprime = product_matrices(i, alpha)
    tensors: List[CGTensor] = []
    for beta_index, beta in enumerate(irrep_set):
        count = multiplicities.get(beta.label, 0)
        found: List[np.ndarray] = []
        for copy in range(count):
            block = _draw_block(
                Dprime, beta, found, rng_seed, beta_index, copy, defaults
            )
            found.append(block)
        for copy, block in enumerate(found, start=1):
            fixed, phase = gauge_fix(block, defaults.gauge_tie_tol)
            cg = CGTensor(
                i_label=i.label,
                alpha_label=alpha.label,
                beta_label=beta.label,
                copy_index=copy,
                coeffs=fixed,
                phase_convention={
                    "rule": PHASE_RULE,
                    "removed_phase": [phase.real, phase.imag],
                    "alpha_dim": alpha.dim,
                },
                seed=rng_seed,
            )
            report = verify_cg(cg, i, alpha, beta, defaults.cg_residual_tol)
            if not report.passed:
                raise VerificationFailed(
                    f"CG block {i.label} x {alpha.label} -> {beta.label} (n={copy}) "
                    f"failed verification: intertwining {report.intertwining:.3g}, "
                    f"orthonormality {report.orthonormality:.3g}"
                )
            tensors.append(cg)
    return tensors


def _draw_block(
    Dprime: np.ndarray,
    beta: Irrep,
    previous: Sequence[np.ndarray],
    rng_seed: int,
    beta_index: int,
    copy: int,
    defaults: Defaults,
) -> np.ndarray:
    shape = (Dprime.shape[1], beta.dim)
    for retry in range(defaults.cg_max_retries):
        seed = unit_disk(rng_for(rng_seed, beta_index, copy, retry), shape)
        block = average_intertwiner(Dprime, beta.matrices, seed)
        for other in previous:
            # Frobenius Gram-Schmidt; `other` has orthonormal columns
            overlap = np.vdot(other, block) / np.vdot(other, other)
            block = block - overlap * other
        if max_abs(block) >= defaults.cg_zero_tol:
            return _normalize_columns(block)
        logger.debug(
            "Averaged block for %s copy %d vanished on retry %d",
            beta.label,
            copy + 1,
            retry,
        )
    raise DegenerateSeed(
        f"Averaged CG block for {beta.label} (copy {copy + 1}) stayed below "
        f"{defaults.cg_zero_tol} after {defaults.cg_max_retries} seeds"
    )


def full_stack_defect(cgs: Sequence[CGTensor]) -> float:
    """max |U†U − 1| for all blocks of one (i, α) stacked side by side."""
    stack = np.hstack([cg.coeffs for cg in cgs])
    if stack.shape[0] != stack.shape[1]:
        return float("inf")
    return max_abs(stack.conj().T @ stack - np.eye(stack.shape[1]))


def find_cg(cgs: Sequence[CGTensor], beta_label: str) -> List[CGTensor]:
    return [cg for cg in cgs if cg.beta_label == beta_label]


@cached(cache=LRUCache(maxsize=256))
def cg_table(
    group: str, i_label: str, alpha_label: str, rng_seed: int = DEFAULTS.cg_seed
) -> Tuple[CGTensor, ...]:
    """Memoized CG blocks for a built-in group."""
    bundle = load_builtin(group)
    i, alpha = bundle.irrep(i_label), bundle.irrep(alpha_label)
    candidates = bundle.irreps_of_class(alpha.class_label)
    return tuple(compute_cg(i, alpha, candidates, rng_seed))


def cg_to_dict(
    cgs: Sequence[CGTensor],
    i_label: Optional[str] = None,
    alpha_label: Optional[str] = None,
) -> Dict[str, Any]:
    """JSON-ready CG table for one (i, α)."""
    return {
        "i": i_label or (cgs[0].i_label if cgs else None),
        "alpha": alpha_label or (cgs[0].alpha_label if cgs else None),
        "phase_convention": PHASE_RULE,
        "seed": cgs[0].seed if cgs else None,
        "blocks": [
            {"beta": cg.beta_label, "n": cg.copy_index, "coeffs": cg.coeffs}
            for cg in cgs
        ],
    }
