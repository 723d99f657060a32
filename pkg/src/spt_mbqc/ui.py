"""Terminal UI module using Rich."""

from contextlib import contextmanager
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from rich.console import Console
from rich.panel import Panel
from rich.progress import (
    BarColumn,
    Progress,
    SpinnerColumn,
    TaskProgressColumn,
    TextColumn,
)
from rich.table import Table

from .groups import GroupBundle, GroupCheckReport, character_table


def _num(value: Any) -> str:
    if isinstance(value, complex) or np.iscomplexobj(value):
        value = complex(value)
        if abs(value.imag) < 1e-12:
            return f"{value.real:.4g}"
        return f"{value.real:.4g}{value.imag:+.4g}i"
    if isinstance(value, float):
        if value and (abs(value) < 1e-3 or abs(value) >= 1e4):
            return f"{value:.3e}"
        return f"{value:.6g}"
    return str(value)


def _verdict(passed: bool) -> str:
    if passed:
        return "[bold green]✓ pass[/bold green]"
    return "[bold red]✗ fail[/bold red]"


class TerminalUI:
    """Display toolkit results in the terminal using Rich."""

    def __init__(self, console: Optional[Console] = None):
        """Initialize console."""
        self.console = console or Console()
        self._progress = None
        self._scan_task = None

    def update_scan_progress(self, current: int, total: int, label: str) -> None:
        """Update phase scan progress.

        Args:
            current: Number of grid points finished
            total: Total number of grid points
            label: Point that just finished
        """
        if self._progress is None:
            self._progress = Progress(
                SpinnerColumn(),
                TextColumn("[progress.description]{task.description}"),
                BarColumn(),
                TaskProgressColumn(),
                console=self.console,
            )
            self._progress.start()
            self._scan_task = self._progress.add_task(
                "[cyan]Scanning (λ, μ) grid...", total=total
            )

        self._progress.update(
            self._scan_task,
            completed=current,
            description=f"[cyan]Scanning (λ, μ) grid[/cyan] [dim]{label}[/dim]",
        )

        if current >= total:
            self._progress.stop()
            self._progress = None
            self._scan_task = None

    def display_group(self, bundle: GroupBundle) -> None:
        """Display the irreps of a group and its character table.

        Args:
            bundle: Loaded group
        """
        table = bundle.table
        self.console.print(
            Panel(
                f"[bold cyan]{bundle.name}[/bold cyan] "
                f"[dim](cover {bundle.cover_name}, order {table.order})[/dim]",
                border_style="cyan",
            )
        )
        counts: Dict[str, int] = {}
        irreps = Table(
            title="Irreducible representations",
            show_header=True,
            header_style="bold magenta",
            border_style="blue",
        )
        irreps.add_column("Label", style="cyan", no_wrap=True)
        irreps.add_column("Dim", justify="right", style="green")
        irreps.add_column("Class", justify="center", style="yellow")
        for rep in bundle.irreps:
            counts[rep.class_label] = counts.get(rep.class_label, 0) + 1
            irreps.add_row(rep.label, str(rep.dim), rep.class_label)
        self.console.print(irreps)

        classes, chars = character_table(table, bundle.irreps)
        characters = Table(
            title="Character table",
            show_header=True,
            header_style="bold magenta",
            border_style="blue",
        )
        characters.add_column("Irrep", style="cyan", no_wrap=True)
        for cls in classes:
            characters.add_column(
                f"{table.word_string(cls[0]) or 'e'} ({len(cls)})", justify="right"
            )
        for rep, row in zip(bundle.irreps, chars):
            characters.add_row(rep.label, *(_num(c) for c in row))
        self.console.print(characters)
        summary = ", ".join(f"{k}:{v}" for k, v in sorted(counts.items()))
        self.console.print(
            f"\n[bold green]✓[/bold green] {len(bundle.irreps)} irreps, "
            f"classes {{{summary}}}\n"
        )

    def display_group_check(self, report: GroupCheckReport) -> None:
        """Display per-irrep residuals of a group consistency check."""
        table = Table(
            title=f"Consistency checks for {report.name}",
            show_header=True,
            header_style="bold magenta",
            border_style="blue",
        )
        table.add_column("Irrep", style="cyan", no_wrap=True)
        table.add_column("Class", justify="center")
        table.add_column("Unitarity", justify="right")
        table.add_column("Homomorphism", justify="right")
        table.add_column("Closure", justify="right")
        table.add_column("Cocycle", justify="right")
        table.add_column("‖χ‖²", justify="right")
        for row in report.irreps:
            cls = row.declared_class
            if row.computed_class != row.declared_class:
                cls = f"[red]{row.declared_class}→{row.computed_class}[/red]"
            table.add_row(
                row.label,
                cls,
                _num(row.unitarity),
                _num(row.homomorphism),
                _num(row.projective_closure),
                _num(row.cocycle),
                _num(row.character_norm),
            )
        self.console.print(table)
        self.display_report(
            "Group totals",
            [
                ("order", report.order),
                ("Σ dim²", report.sum_dim_squared),
                ("associativity defects", report.associativity_defects),
                ("orthogonality residual", report.orthogonality),
            ],
            report.passed,
        )

    def display_report(
        self,
        title: str,
        rows: Sequence[Tuple[str, Any]],
        passed: Optional[bool] = None,
    ) -> None:
        """Display a two-column table of named quantities.

        Args:
            title: Table title
            rows: (name, value) pairs
            passed: Optional overall verdict printed under the table
        """
        table = Table(
            title=title,
            show_header=True,
            header_style="bold magenta",
            border_style="blue",
        )
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", justify="right", style="white")
        for name, value in rows:
            table.add_row(name, _num(value))
        self.console.print(table)
        if passed is not None:
            self.console.print(f"  {_verdict(passed)}\n")

    def display_matrix(self, title: str, matrix: np.ndarray) -> None:
        table = Table(title=title, show_header=False, border_style="blue")
        for _ in range(matrix.shape[1]):
            table.add_column(justify="right")
        for row in matrix:
            table.add_row(*(_num(x) for x in row))
        self.console.print(table)

    def display_transcript(self, records: Sequence[Any]) -> None:
        """Display measurement records as a table, one row per site."""
        table = Table(
            title="Measurement transcript",
            show_header=True,
            header_style="bold magenta",
            border_style="blue",
        )
        table.add_column("Site", justify="right", style="cyan")
        table.add_column("Basis", style="yellow")
        table.add_column("Outcome", justify="center")
        table.add_column("p", justify="right", style="green")
        table.add_column("Byproduct", style="bold blue")
        for record in records:
            table.add_row(
                str(record.site),
                record.basis,
                f"{record.outcome} ({record.label})",
                f"{record.p:.4f}",
                record.byproduct_after,
            )
        self.console.print(table)

    def display_scan_summary(self, result: Any) -> None:
        """Display counts of a phase scan.

        Args:
            result: ScanResult
        """
        points = result.points
        inside = [p for p in points if p.in_region_analytic]
        matched = [p for p in inside if p.fidelity_per_site >= 1 - 1e-6]
        self.console.print("\n[bold green]━━━ Scan Summary ━━━[/bold green]")
        self.console.print(f"  Grid points: [bold]{len(points)}[/bold]")
        self.console.print(f"  Inside analytic AKLT region: [bold]{len(inside)}[/bold]")
        self.console.print(
            f"  With fidelity ≥ 1 − 1e-6 there: [bold]{len(matched)}[/bold]"
        )
        failures = result.failures
        if failures:
            self.console.print(f"  [yellow]Not converged: {len(failures)}[/yellow]")
        self.console.print("")

    def display_json(self, text: str) -> None:
        """Print JSON text verbatim."""
        self.console.out(text, highlight=False)

    def display_error(self, message: str) -> None:
        """Display error message.

        Args:
            message: Error message to display
        """
        self.console.print(f"[bold red]✗ Error:[/bold red] {message}")

    def display_warning(self, message: str) -> None:
        """Display warning message.

        Args:
            message: Warning message to display
        """
        self.console.print(f"[yellow]⚠ Warning:[/yellow] {message}")

    def display_info(self, message: str) -> None:
        """Display info message.

        Args:
            message: Info message to display
        """
        self.console.print(f"[blue]ℹ Info:[/blue] {message}")

    def display_success(self, message: str) -> None:
        """Display success message.

        Args:
            message: Success message to display
        """
        self.console.print(f"[bold green]✓[/bold green] {message}")

    @contextmanager
    def spinner(self, message: str):
        """Context manager for displaying a spinner during long operations.

        Args:
            message: Message to display with the spinner

        Example:
            with ui.spinner("Running iTEBD..."):
                state = itebd_ground_state(H)
        """
        status = self.console.status(f"[cyan]{message}[/cyan]", spinner="dots")
        status.start()
        try:
            yield
        finally:
            status.stop()


def report_rows(report: Any, names: List[str]) -> List[Tuple[str, Any]]:
    """(name, value) pairs for selected attributes of a report dataclass."""
    return [(name.replace("_", " "), getattr(report, name)) for name in names]
