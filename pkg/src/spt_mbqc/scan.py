"""(λ, μ) phase scan of the AKLT fidelity per site."""

import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .config import DEFAULTS, Defaults
from .errors import InvalidInput, NoConvergence
from .hamiltonian import aklt_region, h_matrix, hamiltonian
from .itebd import energy_density, fidelity_per_site, itebd_ground_state
from .mps import aklt_mps
from .output import csv_text, write_text

logger = logging.getLogger(__name__)

COLUMNS = (
    "lambda",
    "mu",
    "energy_per_site",
    "fidelity_per_site",
    "min_eig_h",
    "in_region_analytic",
    "converged",
)

ProgressCallback = Callable[[int, int, str], None]


@dataclass(frozen=True)
class ScanPoint:
    lam: float
    mu: float
    energy_per_site: float
    fidelity_per_site: float
    min_eig_h: float
    in_region_analytic: bool
    converged: bool
    error: Optional[str] = None

    def row(self) -> Tuple[Any, ...]:
        return (
            self.lam,
            self.mu,
            self.energy_per_site,
            self.fidelity_per_site,
            self.min_eig_h,
            self.in_region_analytic,
            self.converged,
        )


def grid_axis(
    bounds: Tuple[float, float], count: Optional[int], step: float
) -> np.ndarray:
    lo, hi = bounds
    if hi < lo:
        raise InvalidInput(f"Empty range [{lo}, {hi}]")
    if count is None:
        count = int(round((hi - lo) / step)) + 1
    if count < 1:
        raise InvalidInput(f"Grid needs at least one point, got {count}")
    return np.linspace(lo, hi, count)


def scan_grid(
    lambda_range: Tuple[float, float],
    mu_range: Tuple[float, float],
    grid: Optional[Tuple[int, int]] = None,
    step: float = DEFAULTS.scan_step,
) -> List[Tuple[float, float]]:
    """Grid points in row order: λ outer, μ inner."""
    n, m = grid if grid is not None else (None, None)
    lams = grid_axis(lambda_range, n, step)
    mus = grid_axis(mu_range, m, step)
    return [(float(lam), float(mu)) for lam in lams for mu in mus]


def point_seed(seed: int, index: int) -> int:
    """Independent per-point seed derived from the scan seed and grid index."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def boundary_distance(lam: float, mu: float) -> float:
    """Euclidean distance to the nearest line μ = ±2√3λ − 2."""
    slope = 2 * np.sqrt(3.0)
    nearest = min(abs(mu + 2 - slope * lam), abs(mu + 2 + slope * lam))
    return float(nearest / np.sqrt(1 + slope**2))


def run_point(
    index: int,
    lam: float,
    mu: float,
    chi: int,
    schedule: Sequence[Tuple[float, int]],
    seed: int,
    defaults: Defaults = DEFAULTS,
) -> ScanPoint:
    """Ground state, energy and AKLT fidelity at one (λ, μ)."""
    H = hamiltonian(lam, mu)
    _, min_eig = h_matrix(lam, mu)
    error = None
    try:
        state = itebd_ground_state(
            H,
            chi=chi,
            schedule=schedule,
            seed=point_seed(seed, index),
            defaults=defaults,
        )
    except NoConvergence as e:
        logger.warning("No convergence at lambda=%g, mu=%g: %s", lam, mu, e)
        state, error = e.state, str(e)
    energy = energy_density(state, H, tol=np.inf)
    fidelity = fidelity_per_site(state, aklt_mps(), gap_tol=defaults.fidelity_gap)
    return ScanPoint(
        lam=lam,
        mu=mu,
        energy_per_site=energy,
        fidelity_per_site=fidelity,
        min_eig_h=min_eig,
        in_region_analytic=aklt_region(lam, mu),
        converged=state.converged,
        error=error,
    )


@dataclass(frozen=True)
class ScanResult:
    points: Tuple[ScanPoint, ...]
    params: Dict[str, Any]

    def rows(self) -> List[Tuple[Any, ...]]:
        return [point.row() for point in self.points]

    @property
    def failures(self) -> List[ScanPoint]:
        return [point for point in self.points if point.error is not None]


def phase_scan(
    lambda_range: Tuple[float, float] = DEFAULTS.scan_lambda_range,
    mu_range: Tuple[float, float] = DEFAULTS.scan_mu_range,
    grid: Optional[Tuple[int, int]] = None,
    chi: Optional[int] = None,
    schedule: Optional[Sequence[Tuple[float, int]]] = None,
    seed: Optional[int] = None,
    jobs: int = 1,
    progress_callback: Optional[ProgressCallback] = None,
    defaults: Defaults = DEFAULTS,
) -> ScanResult:
    """Run iTEBD on every grid point.

    Args:
        lambda_range: (min, max) of λ
        mu_range: (min, max) of μ
        grid: (n, m) points along λ and μ; derived from ``defaults.scan_step`` when None
        chi: Bond dimension
        schedule: Imaginary-time schedule
        seed: Scan seed; point k uses an independent stream derived from (seed, k)
        jobs: Worker processes, 1 runs in-process
        progress_callback: Called as (done, total, label) after each point
        defaults: Tolerances and solver parameters

    Returns:
        ScanResult with points in grid order regardless of completion order
    """
    chi = defaults.chi if chi is None else chi
    schedule = tuple(defaults.schedule if schedule is None else schedule)
    seed = defaults.itebd_seed if seed is None else seed
    points = scan_grid(lambda_range, mu_range, grid, defaults.scan_step)
    total = len(points)
    results: List[Optional[ScanPoint]] = [None] * total
    logger.info("Scanning %d points with chi=%d on %d worker(s)", total, chi, jobs)

    if jobs <= 1:
        for index, (lam, mu) in enumerate(points):
            results[index] = run_point(index, lam, mu, chi, schedule, seed, defaults)
            if progress_callback:
                progress_callback(index + 1, total, f"λ={lam:.3f}, μ={mu:.3f}")
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            future_to_index = {
                executor.submit(
                    run_point, index, lam, mu, chi, schedule, seed, defaults
                ): index
                for index, (lam, mu) in enumerate(points)
            }
            for done, future in enumerate(as_completed(future_to_index), start=1):
                index = future_to_index[future]
                results[index] = future.result()
                if progress_callback:
                    lam, mu = points[index]
                    progress_callback(done, total, f"λ={lam:.3f}, μ={mu:.3f}")

    params = {
        "lambda_range": list(lambda_range),
        "mu_range": list(mu_range),
        "grid": [len(set(p[0] for p in points)), len(set(p[1] for p in points))],
        "chi": chi,
        "schedule": [list(stage) for stage in schedule],
        "seed": seed,
    }
    return ScanResult(points=tuple(results), params=params)


def scan_csv(
    result: ScanResult, header: Optional[Mapping[str, Any]] = None, digits: int = 17
) -> str:
    return csv_text(COLUMNS, result.rows(), header=header, digits=digits)


def plot_script(csv_name: str) -> str:
    """Matplotlib script drawing the fidelity heatmap and the analytic boundary."""
    return f'''"""AKLT fidelity per site over the (lambda, mu) plane."""

import csv

import matplotlib.pyplot as plt
import numpy as np

with open({csv_name!r}) as handle:
    rows = list(csv.DictReader(line for line in handle if not line.startswith("#")))

lams = sorted({{float(r["lambda"]) for r in rows}})
mus = sorted({{float(r["mu"]) for r in rows}})
grid = np.full((len(mus), len(lams)), np.nan)
for r in rows:
    row, col = mus.index(float(r["mu"])), lams.index(float(r["lambda"]))
    grid[row, col] = float(r["fidelity_per_site"])

fig, ax = plt.subplots(figsize=(6, 5))
mesh = ax.pcolormesh(lams, mus, grid, shading="nearest", vmin=0.0, vmax=1.0)
fig.colorbar(mesh, ax=ax, label="fidelity per site")
line = np.linspace(min(lams), max(lams), 200)
ax.plot(line, 2 * np.sqrt(3) * line - 2, "w--", linewidth=1)
ax.plot(line, -2 * np.sqrt(3) * line - 2, "w--", linewidth=1)
ax.set_xlim(min(lams), max(lams))
ax.set_ylim(min(mus), max(mus))
ax.set_xlabel("lambda")
ax.set_ylabel("mu")
fig.tight_layout()
fig.savefig({Path(csv_name).with_suffix(".png").name!r}, dpi=150)
'''


def write_scan(
    result: ScanResult,
    out: Union[str, Path],
    header: Optional[Mapping[str, Any]] = None,
    digits: int = 17,
) -> Tuple[Path, Path]:
    """Write the CSV and a sibling ``<name>_plot.py`` script."""
    csv_path = write_text(scan_csv(result, header, digits), out)
    script_path = csv_path.with_name(csv_path.stem + "_plot.py")
    write_text(plot_script(csv_path.name), script_path)
    return csv_path, script_path
