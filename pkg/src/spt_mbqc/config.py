"""Versioned defaults and resolved run configuration."""

from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Dict, List, Optional, Tuple

from .errors import InvalidInput

DEFAULTS_VERSION = "1"

DEFAULT_SCHEDULE: Tuple[Tuple[float, int], ...] = (
    (0.1, 2000),
    (0.03, 2000),
    (0.01, 2000),
    (0.003, 2000),
    (0.001, 2000),
)


@dataclass(frozen=True)
class Defaults:
    """Every tolerance, seed and solver parameter the toolkit uses.

    One instance is echoed into the header of every output file so a run can
    be audited and repeated.
    """

    version: str = DEFAULTS_VERSION

    # groups
    group_tol: float = 1e-10
    element_decimals: int = 9
    omega_entry_threshold: float = 1e-6
    max_order: int = 512
    multiplicity_tol: float = 1e-6

    # Clebsch-Gordan
    cg_residual_tol: float = 1e-9
    cg_zero_tol: float = 1e-8
    cg_max_retries: int = 5
    cg_seed: int = 0
    gauge_tie_tol: float = 1e-9

    # MPS
    mps_tol: float = 1e-12
    b_seed: int = 0
    transfer_gap: float = 1e-6
    extract_tol: float = 1e-8
    block_form_tol: float = 1e-9
    symmetric_tol: float = 1e-8
    intertwiner_tol: float = 1e-9

    # MBQC
    probability_tol: float = 1e-10
    rotation_tol: float = 1e-10
    protection_tol: float = 1e-12
    zero_amplitude: float = 1e-14
    split_tol: float = 1e-10
    max_attempts: int = 200
    measurement_seed: int = 0

    # Hamiltonian
    ham_tol: float = 1e-12

    # iTEBD
    chi: int = 8
    schedule: Tuple[Tuple[float, int], ...] = DEFAULT_SCHEDULE
    svd_cutoff: float = 1e-12
    converge_tol: float = 1e-10
    drift_tol: float = 1e-8
    stage_exit_tol: float = 1e-13
    check_interval: int = 20
    canonical_tol: float = 1e-8
    fidelity_gap: float = 1e-10
    itebd_seed: int = 0

    # phase scan
    scan_lambda_range: Tuple[float, float] = (-3.0, 3.0)
    scan_mu_range: Tuple[float, float] = (-3.0, 3.0)
    scan_step: float = 0.05

    # output
    float_digits: int = 17

    def as_table(self) -> Dict[str, Any]:
        """Return the flat key/value table written into output headers."""
        table = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = [list(v) if isinstance(v, tuple) else v for v in value]
            table[f.name] = value
        return table

    def with_overrides(self, **overrides: Any) -> "Defaults":
        """Return a copy with the non-None overrides applied.

        Args:
            **overrides: Field names mapped to new values; ``None`` is skipped

        Returns:
            New Defaults instance
        """
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise KeyError(f"Unknown default(s): {', '.join(sorted(unknown))}")
        updates = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **updates)


DEFAULTS = Defaults()


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved, re-runnable description of one CLI invocation."""

    command: str
    params: Dict[str, Any] = field(default_factory=dict)
    defaults: Defaults = DEFAULTS
    out: Optional[str] = None
    fmt: str = "json"

    def to_dict(self) -> Dict[str, Any]:
        """Serialize for output headers."""
        return {
            "command": self.command,
            "params": _plain(self.params),
            "defaults_version": self.defaults.version,
            "defaults": self.defaults.as_table(),
            "out": self.out,
            "format": self.fmt,
        }


def resolve(
    command: str,
    params: Optional[Dict[str, Any]] = None,
    tol: Optional[float] = None,
    chi: Optional[int] = None,
    seed: Optional[int] = None,
    out: Optional[str] = None,
    fmt: str = "json",
    base: Defaults = DEFAULTS,
) -> RunConfig:
    """Apply the common CLI flags to the defaults table.

    ``--tol`` sets the module tolerance that governs the command's acceptance
    check, ``--seed`` sets every seed so one flag reproduces a whole run.

    Args:
        command: Command name, e.g. ``"cg compute"``
        params: Command specific parameters
        tol: Optional tolerance override
        chi: Optional iTEBD bond dimension override
        seed: Optional seed override
        out: Output path
        fmt: Output format, ``json`` or ``csv``

    Returns:
        Resolved RunConfig
    """
    if fmt not in ("json", "csv"):
        raise InvalidInput(f"Unsupported format: {fmt}")

    overrides: Dict[str, Any] = {"chi": chi}
    if tol is not None:
        overrides.update(
            group_tol=tol,
            cg_residual_tol=tol,
            mps_tol=tol,
            ham_tol=tol,
            probability_tol=tol,
            rotation_tol=tol,
            protection_tol=tol,
        )
    if seed is not None:
        overrides.update(
            cg_seed=seed,
            b_seed=seed,
            measurement_seed=seed,
            itebd_seed=seed,
        )
    return RunConfig(
        command=command,
        params=dict(params or {}),
        defaults=base.with_overrides(**overrides),
        out=out,
        fmt=fmt,
    )


def _plain(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "__dataclass_fields__"):
        return _plain(asdict(value))
    return value


def schedule_from_string(text: str) -> List[Tuple[float, int]]:
    """Parse ``"0.1x500,0.01x200"`` into a list of (dt, steps)."""
    schedule = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        dt, _, steps = chunk.partition("x")
        try:
            schedule.append((float(dt), int(steps)))
        except ValueError:
            raise InvalidInput(
                f"Schedule stage must be 'dtxsteps', got '{chunk}'"
            ) from None
    if not schedule:
        raise InvalidInput("Empty schedule")
    return schedule
