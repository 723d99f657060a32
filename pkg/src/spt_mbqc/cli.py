"""Command-line interface using Typer."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np
import typer
from rich.console import Console
from rich.logging import RichHandler

from .clebsch_gordan import (
    CGTensor,
    cg_to_dict,
    compute_cg,
    full_stack_defect,
    verify_cg,
)
from .config import RunConfig, resolve, schedule_from_string
from .errors import InvalidInput, SptError, VerificationFailed
from .groups import (
    GroupBundle,
    character_table,
    check_group,
    parse_matrix,
    resolve_group,
)
from .hamiltonian import (
    aklt_energy,
    aklt_region,
    build_terms,
    h_matrix,
    hamiltonian,
    hamiltonian_to_dict,
    load_hamiltonian,
    verify_symmetry,
)
from .itebd import energy_density, fidelity_per_site, itebd_ground_state
from .mbqc import (
    compile_rotation,
    euler_zxz,
    identity_protection_test,
    parse_gates,
    success_rate,
)
from .mps import (
    SymmetricMPS,
    aklt_mps,
    build_mps,
    cluster_mps,
    load_mps_json,
    mps_to_dict,
    parse_virtual_spec,
    split_labels,
)
from .output import complex_array, write_json, write_jsonl
from .scan import phase_scan, write_scan
from .symmetry_checks import (
    check_block_form,
    check_onsite_invariance,
    check_parity,
    check_parity_time_commutation,
    check_time_reversal,
    compute_Lgamma,
    extract_virtual_rep,
    infer_gamma,
    solve_parity_matrix,
    solve_time_reversal_matrix,
    symmetry_action_for,
)
from .ui import TerminalUI, report_rows

app = typer.Typer(
    help="Symmetry-protected MPS toolkit: groups, CG tables, MBQC and iTEBD"
)
group_app = typer.Typer(help="Inspect and check symmetry groups")
cg_app = typer.Typer(help="Clebsch-Gordan coefficients")
mps_app = typer.Typer(help="Build and check symmetric MPS")
mbqc_app = typer.Typer(help="Measurement-based gates on MPS resource states")
ham_app = typer.Typer(help="A4-symmetric spin-1 Hamiltonian")
itebd_app = typer.Typer(help="Infinite-chain ground states")
app.add_typer(group_app, name="group")
app.add_typer(cg_app, name="cg")
app.add_typer(mps_app, name="mps")
app.add_typer(mbqc_app, name="mbqc")
app.add_typer(ham_app, name="ham")
app.add_typer(itebd_app, name="itebd")

PACKAGE_LOGGER = "spt_mbqc"
SCHEDULE_HELP = "Stages like '0.1x2000,0.01x2000'"


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Show debug logs"),
):
    """Symmetry-protected MPS toolkit."""
    logger = logging.getLogger(PACKAGE_LOGGER)
    logger.handlers.clear()
    logger.addHandler(RichHandler(console=Console(stderr=True), show_path=False))
    logger.setLevel(logging.DEBUG if verbose else logging.WARNING)


def _fail(ui: TerminalUI, e: Exception) -> None:
    ui.display_error(str(e))
    raise typer.Exit(code=e.exit_code if isinstance(e, SptError) else 1)


def _emit(ui: TerminalUI, config: RunConfig, result: Dict[str, Any]) -> None:
    """Write ``{"config", "result"}`` to ``--out`` when given."""
    if config.out is None:
        return
    payload = {"config": config.to_dict(), "result": result}
    path = write_json(payload, config.out, config.defaults.float_digits)
    ui.display_success(f"Wrote {path}")


def _out(path: Optional[Path]) -> Optional[str]:
    return str(path) if path is not None else None


def _load_group(name: Optional[str], file: Optional[Path]) -> GroupBundle:
    return resolve_group(name, file)


def _matrix_option(text: Optional[str], what: str) -> Optional[np.ndarray]:
    if text is None:
        return None
    try:
        return parse_matrix(json.loads(text))
    except json.JSONDecodeError as e:
        raise InvalidInput(f"{what} is not valid JSON: {e}") from None


def _default_spin1_sign(mps: SymmetricMPS) -> np.ndarray:
    """−1 on the x, y, z basis of spin 1, identity otherwise."""
    sign = -1.0 if tuple(mps.basis_labels) == ("x", "y", "z") else 1.0
    return sign * np.eye(mps.phys_dim)


def _load_mps(source: str) -> SymmetricMPS:
    if source == "aklt":
        return aklt_mps()
    if source == "cluster":
        return cluster_mps()
    return load_mps_json(source)


def _pair(text: str, what: str) -> Tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise InvalidInput(f"{what} must be 'min,max', got '{text}'") from None
    return lo, hi


def _grid(text: Optional[str]) -> Optional[Tuple[int, int]]:
    if text is None:
        return None
    try:
        n, m = (int(x) for x in text.lower().split("x"))
    except ValueError:
        raise InvalidInput(f"Grid must be 'NxM', got '{text}'") from None
    return n, m


# --- group -------------------------------------------------------------------


@group_app.command("info")
def group_info(
    name: Optional[str] = typer.Argument(
        None, help="Built-in group (Z2xZ2, D4, A4, S4, Dn)"
    ),
    file: Optional[Path] = typer.Option(None, "--file", help="Group JSON file"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write JSON summary"),
):
    """Show irreps, class labels and the character table."""
    ui = TerminalUI()

    try:
        bundle = _load_group(name, file)
        ui.display_group(bundle)
        classes, chars = character_table(bundle.table, bundle.irreps)
        config = resolve("group info", {"name": name, "file": file}, out=_out(out))
        words = [[bundle.table.word_string(g) for g in cls] for cls in classes]
        _emit(
            ui,
            config,
            {
                "name": bundle.name,
                "cover": bundle.cover_name,
                "order": bundle.table.order,
                "irreps": [
                    {"label": r.label, "dim": r.dim, "class": r.class_label}
                    for r in bundle.irreps
                ],
                "classes": words,
                "character_table": chars,
            },
        )
    except Exception as e:
        _fail(ui, e)


@group_app.command("check")
def group_check(
    name: Optional[str] = typer.Argument(None, help="Built-in group"),
    file: Optional[Path] = typer.Option(None, "--file", help="Group JSON file"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Residual tolerance"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write JSON report"),
):
    """Run unitarity, closure, completeness and class-label checks."""
    ui = TerminalUI()

    try:
        config = resolve(
            "group check", {"name": name, "file": file}, tol=tol, out=_out(out)
        )
        bundle = _load_group(name, file)
        with ui.spinner(f"Checking {bundle.name}..."):
            report = check_group(bundle, config.defaults.group_tol)
        ui.display_group_check(report)
        _emit(ui, config, {"report": report, "passed": report.passed})
        if not report.passed:
            raise VerificationFailed(f"{bundle.name} failed its consistency checks")
    except Exception as e:
        _fail(ui, e)


# --- cg ------------------------------------------------------------------------


@cg_app.command("compute")
def cg_compute(
    group: str = typer.Argument(..., help="Built-in group"),
    i: str = typer.Argument(..., help="Physical irrep label"),
    alpha: str = typer.Argument(..., help="Virtual irrep label"),
    file: Optional[Path] = typer.Option(
        None, "--file", help="Group JSON file instead of a built-in"
    ),
    seed: Optional[int] = typer.Option(
        None, "--seed", help="Seed of the averaging matrices"
    ),
    tol: Optional[float] = typer.Option(None, "--tol", help="Intertwining tolerance"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write CG JSON"),
):
    """Compute every CG block of i ⊗ α."""
    ui = TerminalUI()

    try:
        config = resolve(
            "cg compute",
            {"group": group, "i": i, "alpha": alpha},
            tol=tol,
            seed=seed,
            out=_out(out),
        )
        defaults = config.defaults
        bundle = _load_group(None if file else group, file)
        i_rep, alpha_rep = bundle.irrep(i), bundle.irrep(alpha)
        candidates = bundle.irreps_of_class(alpha_rep.class_label)
        cgs = compute_cg(i_rep, alpha_rep, candidates, defaults.cg_seed, defaults)
        rows = []
        for cg in cgs:
            beta = bundle.irrep(cg.beta_label)
            report = verify_cg(cg, i_rep, alpha_rep, beta, defaults.cg_residual_tol)
            name = f"{cg.beta_label} #{cg.copy_index}"
            rows.append((f"{name} intertwining", report.intertwining))
        defect = full_stack_defect(cgs)
        rows.append(("stack unitarity defect", defect))
        passed = defect < defaults.cg_residual_tol
        ui.display_report(f"{i} ⊗ {alpha}", rows, passed=passed)
        _emit(
            ui,
            config,
            {
                "group": bundle.name,
                **cg_to_dict(cgs, i, alpha),
                "stack_unitarity_defect": defect,
            },
        )
        if not passed:
            raise VerificationFailed(
                f"CG stack unitarity defect {defect:.3e} exceeds tolerance"
            )
    except Exception as e:
        _fail(ui, e)


@cg_app.command("verify")
def cg_verify(
    path: Path = typer.Argument(..., help="CG JSON written by 'cg compute'"),
    group: Optional[str] = typer.Option(None, "--group", help="Built-in group"),
    file: Optional[Path] = typer.Option(None, "--file", help="Group JSON file"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Intertwining tolerance"),
):
    """Check a stored CG table against the group."""
    ui = TerminalUI()

    try:
        config = resolve("cg verify", {"path": path}, tol=tol)
        data = json.loads(Path(path).read_text())
        data = data.get("result", data)
        bundle = _load_group(group or data.get("group"), file)
        i_rep, alpha_rep = bundle.irrep(data["i"]), bundle.irrep(data["alpha"])
        rows, passed = [], True
        for block in data["blocks"]:
            cg = CGTensor(
                i_label=i_rep.label,
                alpha_label=alpha_rep.label,
                beta_label=block["beta"],
                copy_index=int(block["n"]),
                coeffs=complex_array(block["coeffs"]),
            )
            beta = bundle.irrep(cg.beta_label)
            report = verify_cg(
                cg, i_rep, alpha_rep, beta, config.defaults.cg_residual_tol
            )
            name = f"{cg.beta_label} #{cg.copy_index}"
            rows.append((f"{name} intertwining", report.intertwining))
            rows.append((f"{name} orthonormality", report.orthonormality))
            passed = passed and report.passed
        ui.display_report(f"{i_rep.label} ⊗ {alpha_rep.label}", rows, passed=passed)
        if not passed:
            raise VerificationFailed("Stored CG table does not intertwine")
    except (KeyError, json.JSONDecodeError) as e:
        _fail(ui, InvalidInput(f"Malformed CG file: {e}"))
    except Exception as e:
        _fail(ui, e)


# --- mps -----------------------------------------------------------------------


@mps_app.command("build")
def mps_build(
    group: str = typer.Argument(..., help="Built-in group"),
    virtual: str = typer.Option(..., "--virtual", help="Sectors as 'label:n,label:n'"),
    phys: Optional[str] = typer.Option(
        None, "--phys", help="Physical irreps, comma separated"
    ),
    preset: Optional[str] = typer.Option(
        None, "--preset", help="Named physical preset, e.g. spin1"
    ),
    omega: str = typer.Option("a", "--omega", help="Class of the virtual irreps"),
    chi: Optional[str] = typer.Option(
        None, "--chi-irrep", help="One-dimensional irrep χ"
    ),
    blocks: str = typer.Option("random", "--blocks", help="random or identity"),
    sites: int = typer.Option(1, "--sites", help="Sites with independent B blocks"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed of the B blocks"),
    tol: Optional[float] = typer.Option(
        None, "--tol", help="On-site residual tolerance"
    ),
    out: Optional[Path] = typer.Option(None, "--out", help="Write MPS JSON"),
):
    """Assemble A^(i,m) from B blocks and CG coefficients."""
    ui = TerminalUI()

    try:
        params = {
            "group": group,
            "virtual": virtual,
            "phys": phys,
            "preset": preset,
            "omega": omega,
            "chi": chi,
            "blocks": blocks,
            "sites": sites,
        }
        config = resolve("mps build", params, tol=tol, seed=seed, out=_out(out))
        bundle = _load_group(group, None)
        if preset is not None:
            labels = bundle.preset(preset).irreps
        elif phys is not None:
            labels = tuple(split_labels(phys))
        else:
            raise InvalidInput("Give --phys or --preset")
        with ui.spinner("Computing CG blocks..."):
            mps = build_mps(
                bundle,
                labels,
                omega,
                chi,
                parse_virtual_spec(virtual),
                blocks,
                seed=config.defaults.b_seed,
                sites=sites,
                defaults=config.defaults,
            )
        onsite = check_onsite_invariance(
            mps, symmetry_action_for(mps), config.defaults.mps_tol
        )
        ui.display_report(
            f"{group} MPS (d={mps.phys_dim}, D={mps.bond_dim}, sites={mps.n_sites})",
            [
                ("reconstruction residual", mps.reconstruction_residual()),
                ("on-site residual", onsite.residual),
            ],
            passed=onsite.passed,
        )
        _emit(ui, config, mps_to_dict(mps))
        if not onsite.passed:
            raise VerificationFailed(
                f"On-site residual {onsite.residual:.3e} exceeds {onsite.tol}"
            )
    except Exception as e:
        _fail(ui, e)


@mps_app.command("check-onsite")
def mps_check_onsite(
    source: str = typer.Argument(..., help="MPS JSON file, or 'aklt'"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Residual tolerance"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write JSON report"),
):
    """Residual of Σ_j u_ij A^j = χ V⁻¹ A^i V for the recorded symmetry."""
    ui = TerminalUI()

    try:
        config = resolve(
            "mps check-onsite", {"source": source}, tol=tol, out=_out(out)
        )
        mps = _load_mps(source)
        report = check_onsite_invariance(
            mps, symmetry_action_for(mps), config.defaults.mps_tol
        )
        rows = [(f"generator {g}", r) for g, r in report.per_generator.items()]
        ui.display_report("On-site symmetry", rows, passed=report.passed)
        _emit(ui, config, {"report": report, "passed": report.passed})
        if not report.passed:
            raise VerificationFailed(
                f"On-site residual {report.residual:.3e} exceeds {report.tol}"
            )
    except Exception as e:
        _fail(ui, e)


@mps_app.command("check-parity")
def mps_check_parity(
    source: str = typer.Argument(..., help="MPS JSON file, or 'aklt'"),
    w: Optional[str] = typer.Option(
        None, "--w", help="Physical parity matrix as JSON"
    ),
    n_matrix: Optional[str] = typer.Option(
        None, "--N", help="Virtual parity matrix as JSON"
    ),
    alpha: int = typer.Option(1, "--alpha", help="Parity sign α(P)"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Residual tolerance"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write JSON report"),
):
    """Parity condition, β(P) and the L_γ block form of N."""
    ui = TerminalUI()

    try:
        config = resolve(
            "mps check-parity",
            {"source": source, "alpha": alpha},
            tol=tol,
            out=_out(out),
        )
        defaults = config.defaults
        mps = _load_mps(source)
        w_mat = _matrix_option(w, "--w")
        w_mat = _default_spin1_sign(mps) if w_mat is None else w_mat
        N = _matrix_option(n_matrix, "--N")
        N = solve_parity_matrix(mps, w_mat, alpha) if N is None else N
        report = check_parity(mps, w_mat, N, alpha, defaults.symmetric_tol)
        rows = report_rows(report, ["residual", "alpha", "beta"])
        result: Dict[str, Any] = {"N": N, "report": report, "passed": report.passed}
        if mps.group and mps.sectors:
            try:
                gamma = infer_gamma(N, mps.group, mps.sectors)
                L = compute_Lgamma(mps.group, mps.sectors, gamma, seed=defaults.b_seed)
                block = check_block_form(N, L.L, mps.sectors, defaults.block_form_tol)
                rows += [("gamma", gamma), ("block form residual", block.residual)]
                result["block_form"] = {
                    "gamma": gamma,
                    "L": L.L,
                    "holds": block.holds,
                    "blocks": block.blocks,
                }
            except SptError as e:
                ui.display_warning(f"Block form not available: {e}")
        ui.display_report("Parity", rows, passed=report.passed)
        _emit(ui, config, result)
        if not report.passed:
            raise VerificationFailed(
                f"Parity residual {report.residual:.3e} exceeds {report.tol}"
            )
    except Exception as e:
        _fail(ui, e)


@mps_app.command("check-time-reversal")
def mps_check_time_reversal(
    source: str = typer.Argument(..., help="MPS JSON file, or 'aklt'"),
    v: Optional[str] = typer.Option(
        None, "--v", help="Physical time-reversal matrix as JSON"
    ),
    m_matrix: Optional[str] = typer.Option(
        None, "--M", help="Virtual time-reversal matrix as JSON"
    ),
    w: Optional[str] = typer.Option(
        None, "--w", help="Physical parity matrix for the commutation check"
    ),
    tol: Optional[float] = typer.Option(None, "--tol", help="Residual tolerance"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write JSON report"),
):
    """Time-reversal condition, β(T) and the M N† M N† phase."""
    ui = TerminalUI()

    try:
        config = resolve(
            "mps check-time-reversal", {"source": source}, tol=tol, out=_out(out)
        )
        mps = _load_mps(source)
        v_mat = _matrix_option(v, "--v")
        v_mat = _default_spin1_sign(mps) if v_mat is None else v_mat
        M = _matrix_option(m_matrix, "--M")
        M = solve_time_reversal_matrix(mps, v_mat) if M is None else M
        report = check_time_reversal(mps, v_mat, M, config.defaults.symmetric_tol)
        rows = report_rows(report, ["residual", "beta"])
        result: Dict[str, Any] = {"M": M, "report": report, "passed": report.passed}
        w_mat = _matrix_option(w, "--w")
        w_mat = _default_spin1_sign(mps) if w_mat is None else w_mat
        try:
            N = solve_parity_matrix(mps, w_mat, 1)
            commutation = check_parity_time_commutation(M, N)
            rows += [
                ("M N† M N† phase", commutation.phase),
                ("commutation residual", commutation.residual),
            ]
            result["commutation"] = commutation
        except SptError as e:
            ui.display_warning(f"Parity/time-reversal commutation not checked: {e}")
        ui.display_report("Time reversal", rows, passed=report.passed)
        _emit(ui, config, result)
        if not report.passed:
            raise VerificationFailed(
                f"Time-reversal residual {report.residual:.3e} exceeds {report.tol}"
            )
    except Exception as e:
        _fail(ui, e)


@mps_app.command("extract-sym")
def mps_extract_sym(
    source: str = typer.Argument(..., help="MPS JSON file, or 'aklt'"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write JSON result"),
):
    """Recover V(g) and χ(g) from the tensors alone."""
    ui = TerminalUI()

    try:
        config = resolve("mps extract-sym", {"source": source}, out=_out(out))
        mps = _load_mps(source)
        sym = symmetry_action_for(mps)
        rep = extract_virtual_rep(mps, sym.u, config.defaults)
        passed = rep.residual < config.defaults.extract_tol
        rows = [(f"χ({g})", c) for g, c in rep.chi.items()]
        rows += [("residual", rep.residual), ("transfer gap", rep.gap)]
        ui.display_report("Extracted virtual representation", rows, passed=passed)
        for g, V in rep.V.items():
            ui.display_matrix(f"V({g})", V)
        _emit(
            ui,
            config,
            {"V": rep.V, "chi": rep.chi, "residual": rep.residual, "gap": rep.gap},
        )
        if not passed:
            raise VerificationFailed(
                f"Extracted representation residual {rep.residual:.3e}"
            )
    except Exception as e:
        _fail(ui, e)


# --- mbqc ------------------------------------------------------------------------


@mbqc_app.command("run")
def mbqc_run(
    state: str = typer.Option("aklt", "--state", "--chain", help="aklt or cluster"),
    gates: Optional[str] = typer.Option(
        None, "--gate", "--gates", help="Rotations like 'rz:0.3,rx:1.2'"
    ),
    euler: Optional[str] = typer.Option(
        None, "--euler", help="Z-X-Z Euler angles 'a,b,g'"
    ),
    padding: int = typer.Option(
        0, "--padding", help="Identity measurements between rotations"
    ),
    max_attempts: Optional[int] = typer.Option(
        None, "--max-attempts", help="Repeat-until-success budget"
    ),
    seed: Optional[int] = typer.Option(None, "--seed", help="Measurement seed"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Allowed infidelity"),
    out: Optional[Path] = typer.Option(
        None, "--out", help="Write the transcript as JSON lines"
    ),
):
    """Compile a single-qubit rotation by adaptive measurements."""
    ui = TerminalUI()

    try:
        config = resolve(
            "mbqc run",
            {"state": state, "gates": gates, "euler": euler, "padding": padding},
            tol=tol,
            seed=seed,
        )
        defaults = config.defaults
        if euler is not None:
            target = euler_zxz(*(float(x) for x in euler.split(",")))
        elif gates is not None:
            target = parse_gates(gates)
        else:
            raise InvalidInput("Give --gate or --euler")
        attempts = defaults.max_attempts if max_attempts is None else max_attempts
        result = compile_rotation(
            state, target, attempts, defaults.measurement_seed, padding, defaults
        )
        ui.display_transcript(result.transcript)
        ui.display_report(
            f"{state} rotation",
            [
                ("fidelity", result.fidelity),
                ("byproduct", str(result.byproduct)),
                ("measurements", len(result.transcript)),
                ("attempts", result.attempts),
            ],
            passed=result.passed,
        )
        if out is not None:
            header = {
                "config": config.to_dict(),
                "fidelity": result.fidelity,
                "byproduct": str(result.byproduct),
            }
            records = [header] + [r.to_dict() for r in result.transcript]
            path = write_jsonl(records, out, defaults.float_digits)
            ui.display_success(f"Wrote {path}")
        if not result.passed:
            raise VerificationFailed(
                f"Rotation fidelity {result.fidelity:.17g} below 1 - {result.tol}"
            )
    except ValueError as e:
        _fail(ui, InvalidInput(str(e)))
    except Exception as e:
        _fail(ui, e)


@mbqc_app.command("identity-test")
def mbqc_identity_test(
    group: str = typer.Argument(..., help="Z2xZ2, A4 or S4"),
    sites: int = typer.Option(8, "--sites", help="Sites measured"),
    degeneracy: Optional[int] = typer.Option(
        None, "--degeneracy", help="Degeneracy of every sector"
    ),
    seed: Optional[int] = typer.Option(
        None, "--seed", help="Seed of B blocks and outcomes"
    ),
    out: Optional[Path] = typer.Option(
        None, "--out", help="Write the transcript as JSON lines"
    ),
):
    """Check that Pauli-basis measurements leave the protected qubit intact."""
    ui = TerminalUI()

    try:
        config = resolve(
            "mbqc identity-test",
            {"group": group, "sites": sites, "degeneracy": degeneracy},
            seed=seed,
        )
        report = identity_protection_test(
            group,
            B_seed=config.defaults.b_seed,
            n_sites=sites,
            measurement_seed=config.defaults.measurement_seed,
            degeneracy=degeneracy,
            defaults=config.defaults,
        )
        ui.display_transcript(report.transcript)
        fields = [
            "fidelity",
            "byproduct",
            "factorization_residual",
            "probability_defect",
            "control_split_lost",
            "control_schmidt_rank",
        ]
        ui.display_report(
            f"{group} identity protection",
            report_rows(report, fields),
            passed=report.passed,
        )
        if out is not None:
            header = {
                "config": config.to_dict(),
                "fidelity": report.fidelity,
                "passed": report.passed,
            }
            records = [header] + [r.to_dict() for r in report.transcript]
            path = write_jsonl(records, out, config.defaults.float_digits)
            ui.display_success(f"Wrote {path}")
        if not report.passed:
            raise VerificationFailed(
                f"Protected fidelity {report.fidelity:.17g} below 1 - {report.tol}"
            )
    except Exception as e:
        _fail(ui, e)


@mbqc_app.command("success-rate")
def mbqc_success_rate(
    trials: int = typer.Option(10000, "--trials", help="Single-rotation attempts"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Measurement seed"),
):
    """Monte-Carlo success probability of one AKLT rotation attempt."""
    ui = TerminalUI()

    try:
        config = resolve("mbqc success-rate", {"trials": trials}, seed=seed)
        with ui.spinner(f"Sampling {trials} attempts..."):
            rate = success_rate(
                trials, config.defaults.measurement_seed, config.defaults
            )
        ui.display_report(
            "AKLT rotation attempts", [("trials", trials), ("success rate", rate)]
        )
    except Exception as e:
        _fail(ui, e)


# --- ham -----------------------------------------------------------------------


@ham_app.command("build")
def ham_build(
    lam: float = typer.Option(0.0, "--lambda", help="Coefficient of H_c"),
    mu: float = typer.Option(0.0, "--mu", help="Coefficient of H_q"),
    out: Optional[Path] = typer.Option(
        None, "--out", help="Write the 9x9 term as JSON"
    ),
):
    """Build H_AKLT + λ H_c + μ H_q."""
    ui = TerminalUI()

    try:
        config = resolve("ham build", {"lambda": lam, "mu": mu}, out=_out(out))
        term = hamiltonian(lam, mu)
        rows = [(f"eigenvalue {k}", e) for k, e in enumerate(term.eigenvalues)]
        ui.display_report(term.label, rows)
        _emit(ui, config, hamiltonian_to_dict(term))
    except Exception as e:
        _fail(ui, e)


@ham_app.command("verify")
def ham_verify(
    lam: float = typer.Option(0.0, "--lambda", help="Coefficient of H_c"),
    mu: float = typer.Option(0.0, "--mu", help="Coefficient of H_q"),
    file: Optional[Path] = typer.Option(
        None, "--file", help="Hamiltonian JSON to verify instead"
    ),
    tol: Optional[float] = typer.Option(None, "--tol", help="Commutator tolerance"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write JSON report"),
):
    """A4 and bond-swap commutators of the bond terms."""
    ui = TerminalUI()

    try:
        config = resolve(
            "ham verify",
            {"lambda": lam, "mu": mu, "file": file},
            tol=tol,
            out=_out(out),
        )
        if file:
            terms = [load_hamiltonian(file)]
        else:
            terms = [*build_terms(), hamiltonian(lam, mu)]
        reports = [verify_symmetry(term, tol=config.defaults.ham_tol) for term in terms]
        for report in reports:
            ui.display_report(
                report.label,
                [
                    ("A4 residual", report.group_residual),
                    ("swap residual", report.swap_residual),
                    ("R_z(π/2) residual", report.so3_rz_residual),
                ],
                passed=report.passed,
            )
        _emit(ui, config, {"reports": reports})
        if not all(r.passed for r in reports):
            raise VerificationFailed("A bond term breaks A4 or inversion symmetry")
    except Exception as e:
        _fail(ui, e)


@ham_app.command("h-matrix")
def ham_h_matrix(
    lam: float = typer.Option(0.0, "--lambda", help="Coefficient of H_c"),
    mu: float = typer.Option(0.0, "--mu", help="Coefficient of H_q"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write JSON result"),
):
    """The 3x3 spin-2 block whose positivity keeps AKLT the ground state."""
    ui = TerminalUI()

    try:
        config = resolve("ham h-matrix", {"lambda": lam, "mu": mu}, out=_out(out))
        h, min_eig = h_matrix(lam, mu)
        inside = aklt_region(lam, mu)
        ui.display_matrix(f"h(λ={lam:g}, μ={mu:g})", h)
        ui.display_report(
            "AKLT region",
            [
                ("min eigenvalue", min_eig),
                ("inside region", inside),
                ("AKLT energy per bond", aklt_energy(mu)),
            ],
        )
        _emit(ui, config, {"h": h, "min_eig": min_eig, "in_region_analytic": inside})
    except Exception as e:
        _fail(ui, e)


# --- itebd / scan ----------------------------------------------------------------


@itebd_app.command("run")
def itebd_run(
    lam: float = typer.Option(0.0, "--lambda", help="Coefficient of H_c"),
    mu: float = typer.Option(0.0, "--mu", help="Coefficient of H_q"),
    file: Optional[Path] = typer.Option(
        None, "--file", help="Hamiltonian JSON instead of (λ, μ)"
    ),
    chi: Optional[int] = typer.Option(None, "--chi", help="Bond dimension"),
    schedule: Optional[str] = typer.Option(None, "--schedule", help=SCHEDULE_HELP),
    seed: Optional[int] = typer.Option(
        None, "--seed", help="Seed of the initial state"
    ),
    out: Optional[Path] = typer.Option(None, "--out", help="Write JSON result"),
):
    """Imaginary-time ground state, energy per site and AKLT fidelity."""
    ui = TerminalUI()

    try:
        stages = schedule_from_string(schedule) if schedule else None
        config = resolve(
            "itebd run",
            {"lambda": lam, "mu": mu, "file": file, "schedule": stages},
            chi=chi,
            seed=seed,
            out=_out(out),
        )
        defaults = config.defaults
        term = load_hamiltonian(file) if file else hamiltonian(lam, mu)
        with ui.spinner(f"Running iTEBD on {term.label}..."):
            state = itebd_ground_state(
                term, schedule=stages, seed=defaults.itebd_seed, defaults=defaults
            )
        energy = energy_density(state, term, defaults.canonical_tol)
        fidelity = fidelity_per_site(state, aklt_mps(), defaults.fidelity_gap)
        rows = [
            ("energy per site", energy),
            ("fidelity per site", fidelity),
            ("chi", state.chi),
            ("converged", state.converged),
        ]
        if not file:
            rows.append(("AKLT energy", aklt_energy(mu)))
        ui.display_report(term.label, rows)
        _emit(
            ui,
            config,
            {
                "energy_per_site": energy,
                "fidelity_per_site": fidelity,
                "state": state.to_dict(),
            },
        )
    except ValueError as e:
        _fail(ui, InvalidInput(str(e)))
    except Exception as e:
        _fail(ui, e)


@app.command()
def scan(
    lambda_range: str = typer.Option(
        "-3,3", "--lambda-range", help="λ range 'min,max'"
    ),
    mu_range: str = typer.Option("-3,3", "--mu-range", help="μ range 'min,max'"),
    grid: Optional[str] = typer.Option(
        None, "--grid", help="Points 'NxM'; default spacing 0.05"
    ),
    chi: Optional[int] = typer.Option(None, "--chi", help="Bond dimension"),
    schedule: Optional[str] = typer.Option(None, "--schedule", help=SCHEDULE_HELP),
    seed: Optional[int] = typer.Option(None, "--seed", help="Scan seed"),
    jobs: int = typer.Option(1, "--jobs", help="Worker processes"),
    out: Path = typer.Option(Path("scan.csv"), "--out", help="Output file"),
    fmt: str = typer.Option("csv", "--format", help="csv or json"),
):
    """AKLT fidelity per site over a (λ, μ) grid, with a plot script."""
    ui = TerminalUI()

    try:
        stages = schedule_from_string(schedule) if schedule else None
        lams = _pair(lambda_range, "--lambda-range")
        mus = _pair(mu_range, "--mu-range")
        shape = _grid(grid)
        config = resolve(
            "scan",
            {
                "lambda_range": lams,
                "mu_range": mus,
                "grid": shape,
                "schedule": stages,
                "jobs": jobs,
            },
            chi=chi,
            seed=seed,
            out=str(out),
            fmt=fmt,
        )
        defaults = config.defaults
        result = phase_scan(
            lams,
            mus,
            shape,
            schedule=stages,
            seed=defaults.itebd_seed,
            jobs=jobs,
            progress_callback=ui.update_scan_progress,
            defaults=defaults,
        )
        ui.display_scan_summary(result)
        for point in result.failures:
            ui.display_warning(f"λ={point.lam:g}, μ={point.mu:g}: {point.error}")
        if fmt == "csv":
            header = {"config": config.to_dict()}
            csv_path, script = write_scan(result, out, header, defaults.float_digits)
            ui.display_success(f"Wrote {csv_path} and {script}")
        else:
            _emit(ui, config, {"params": result.params, "points": list(result.points)})
    except ValueError as e:
        _fail(ui, InvalidInput(str(e)))
    except Exception as e:
        _fail(ui, e)


if __name__ == "__main__":
    app()
