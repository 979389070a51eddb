"""
Parameter sweeps, figure presets and CSV/JSON output.

A :class:`SweepGrid` is the Cartesian product ``alphas x thetas x phis``;
every cell is one trajectory on ``n_samples`` points of ``[0, tau_max]``.
Results are assembled in lexicographic grid order no matter how many
workers computed them, so the files written are byte-identical across runs
and worker counts.

CSV layout (UTF-8, LF, comma separated)::

    alpha,theta_deg,phi_deg,tau,sigma11,sigma22,re_sigma12,im_sigma12,lambda_plus,entropy,rate,coherence

Every number is written as ``%.11e`` (12 significant digits); the divergent
rate at the start of a superposition is the literal ``inf``.
"""

import csv
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import NamedTuple

import numpy as np

from ddqpc import measures
from ddqpc.dynamics import (CLOSED_FORM, DEFAULT_STEP, INTEGRATED, ModelParams, QubitState,
                            Trajectory, closed_form_trajectory, integrate_rate_equations)
from ddqpc.errors import ParameterError, SweepError

__all__ = [
    "CSV_HEADER",
    "FIGURE_PRESETS",
    "SweepGrid",
    "SweepRow",
    "Curve",
    "SweepResult",
    "figure_preset",
    "run_sweep",
    "write_csv",
    "write_json_summary",
    "read_csv",
    "summarize",
    "format_number",
    "count_coherence_zeros",
]

CSV_HEADER = ("alpha", "theta_deg", "phi_deg", "tau", "sigma11", "sigma22", "re_sigma12",
              "im_sigma12", "lambda_plus", "entropy", "rate", "coherence")

FIGURE_ALPHAS = (0.1, 1.0, 10.0, 100.0, 1000.0)
ZERO_FLOOR = 1e-12


@dataclass(frozen=True)
class SweepGrid:
    alphas: tuple
    thetas_deg: tuple = (0.0,)
    phis_deg: tuple = (0.0,)
    epsilon_norm: float = 0.0
    tau_max: float = 10.0
    n_samples: int = 1000
    method: str = CLOSED_FORM
    log_base: object = 2
    step: float = DEFAULT_STEP
    primary_outputs: tuple = ("entropy",)
    label: str = ""

    def __post_init__(self):
        for name in ("alphas", "thetas_deg", "phis_deg", "primary_outputs"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        for name in ("alphas", "thetas_deg", "phis_deg"):
            values = getattr(self, name)
            if not values:
                raise ParameterError(f"{name} must be non-empty")
            object.__setattr__(self, name, tuple(float(v) for v in values))
        if any(not (math.isfinite(a) and a >= 0) for a in self.alphas):
            raise ParameterError("alphas must be finite and >= 0")
        if not (math.isfinite(self.tau_max) and self.tau_max > 0):
            raise ParameterError("tau_max must be > 0")
        if int(self.n_samples) != self.n_samples or self.n_samples < 2:
            raise ParameterError("n_samples must be an integer >= 2")
        object.__setattr__(self, "n_samples", int(self.n_samples))
        if self.method not in (CLOSED_FORM, INTEGRATED):
            raise ParameterError(f"method must be {CLOSED_FORM!r} or {INTEGRATED!r}")
        if self.method == CLOSED_FORM and self.epsilon_norm != 0:
            raise ParameterError("closed-form method requires epsilon_norm == 0")
        measures.log_scale(self.log_base)
        unknown = set(self.primary_outputs) - set(CSV_HEADER)
        if unknown:
            raise ParameterError(f"unknown primary outputs {sorted(unknown)}")

    @property
    def tau_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.tau_max, self.n_samples)

    def cells(self):
        return list(itertools.product(self.alphas, self.thetas_deg, self.phis_deg))

    def to_dict(self) -> dict:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "SweepGrid":
        return cls(**data)


FIGURE_PRESETS = {
    "fig2": dict(alphas=FIGURE_ALPHAS, thetas_deg=(0.0,)),
    "fig3": dict(alphas=(0.01, 1.0), thetas_deg=(0.0,),
                 primary_outputs=("entropy", "coherence")),
    "fig4": dict(alphas=FIGURE_ALPHAS, thetas_deg=(90.0,)),
    "fig5": dict(alphas=FIGURE_ALPHAS, thetas_deg=(90.0,),
                 primary_outputs=("entropy", "coherence")),
    "fig6": dict(alphas=FIGURE_ALPHAS, thetas_deg=(30.0,)),
}


def figure_preset(name: str) -> SweepGrid:
    """Grid for one of the preset entropy/coherence figure data sets.

    All presets use phi = 0, tau in [0, 10] with 1000 samples and the closed
    form.
    """
    try:
        preset = FIGURE_PRESETS[name]
    except KeyError:
        raise ParameterError(f"unknown figure preset {name!r}; "
                             f"choose from {sorted(FIGURE_PRESETS)}") from None
    return SweepGrid(phis_deg=(0.0,), tau_max=10.0, n_samples=1000, method=CLOSED_FORM,
                     label=name, **preset)


class SweepRow(NamedTuple):
    alpha: float
    theta_deg: float
    phi_deg: float
    tau: float
    sample: measures.MeasureSample
    state: QubitState


@dataclass(frozen=True, eq=False)
class Curve:
    alpha: float
    theta_deg: float
    phi_deg: float
    trajectory: Trajectory
    measures: measures.TrajectoryMeasures

    def rows(self):
        traj, m = self.trajectory, self.measures
        for i in range(len(traj)):
            yield SweepRow(self.alpha, self.theta_deg, self.phi_deg, float(traj.tau_grid[i]),
                           m.sample(i), traj.state(i))


@dataclass(frozen=True, eq=False)
class SweepResult:
    grid: SweepGrid
    curves: list = field(default_factory=list)

    @property
    def rows(self) -> list:
        return [row for curve in self.curves for row in curve.rows()]

    def __len__(self):
        return sum(len(c.trajectory) for c in self.curves)


def _trajectory(grid: SweepGrid, params: ModelParams) -> Trajectory:
    if grid.method == CLOSED_FORM:
        return closed_form_trajectory(params, grid.tau_grid)
    # integrate on a sub-grid that lands exactly on every output sample
    spacing = grid.tau_max / (grid.n_samples - 1)
    sub = max(1, math.ceil(spacing / grid.step - 1e-9))
    traj = integrate_rate_equations(params, grid.tau_max, spacing / sub, record_every=sub)
    # k * sub * (spacing / sub) differs from linspace in the last bits; report the sample grid
    return replace(traj, tau_grid=grid.tau_grid)


def _run_cell(grid: SweepGrid, cell) -> Curve:
    alpha, theta, phi = cell
    params = ModelParams(alpha, grid.epsilon_norm, theta, phi)
    traj = _trajectory(grid, params)
    return Curve(alpha, theta, phi, traj, measures.trajectory_measures(traj, grid.log_base))


def run_sweep(grid: SweepGrid, workers: int = 1) -> SweepResult:
    """Compute every cell of ``grid``.

    Cells may run on ``workers`` threads; the result order is always the
    grid's lexicographic order.  If any cell fails, :class:`SweepError` is
    raised after all cells have run, listing every failure.
    """
    cells = grid.cells()

    def attempt(cell):
        try:
            return _run_cell(grid, cell), None
        except Exception as exc:  # collected and re-raised as SweepError
            return None, exc

    if workers <= 1:
        outcomes = [attempt(c) for c in cells]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(attempt, cells))
    failures = [(cell, exc) for cell, (_, exc) in zip(cells, outcomes) if exc is not None]
    if failures:
        raise SweepError(failures)
    return SweepResult(grid, [curve for curve, _ in outcomes])


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def format_number(value: float) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if math.isnan(value):
        return "nan"
    return f"{value:.11e}"


def _csv_lines(result: SweepResult):
    yield ",".join(CSV_HEADER)
    for curve in result.curves:
        t, m = curve.trajectory, curve.measures
        head = ",".join(format_number(v) for v in (curve.alpha, curve.theta_deg, curve.phi_deg))
        cols = (t.tau_grid, t.sigma11, t.sigma22, t.sigma12_re, t.sigma12_im,
                m.lambda_plus, m.entropy, m.rate, m.coherence)
        for values in zip(*cols):
            yield head + "," + ",".join(format_number(float(v)) for v in values)


def write_csv(result: SweepResult, destination) -> int:
    """Write all rows to ``destination`` (path or text stream); return the data row count."""
    text = "\n".join(_csv_lines(result)) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        path = Path(destination)
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write CSV to {path}: {exc.strerror or exc}") from exc
    return len(result)


def read_csv(source) -> list:
    """Parse a file written by :func:`write_csv` into a list of float dicts."""
    with open(source, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        return [{k: float(v) for k, v in row.items()} for row in reader]


def count_coherence_zeros(tau, re, im, floor=ZERO_FLOOR) -> int:
    """Count touching zeros of ``sigma12`` in a sampled curve.

    Each interior local minimum of ``|sigma12|^2`` is checked against the
    piecewise-linear path of ``sigma12`` in the complex plane through its
    two neighbours; a zero is counted when that path passes within
    ``sqrt(floor)`` of the origin.
    """
    z = np.asarray(re, dtype=float) + 1j * np.asarray(im, dtype=float)
    c2 = np.abs(z) ** 2
    count = 0
    for i in range(1, len(z) - 1):
        if not (c2[i] <= c2[i - 1] and c2[i] < c2[i + 1]):
            continue
        best = c2[i]
        for a, b in ((z[i - 1], z[i]), (z[i], z[i + 1])):
            d = b - a
            denom = abs(d) ** 2
            if denom == 0:
                continue
            s = min(1.0, max(0.0, -((a.conjugate() * d).real) / denom))
            best = min(best, abs(a + s * d) ** 2)
        if best <= floor:
            count += 1
    return count


def summarize(result: SweepResult) -> dict:
    curves = []
    for curve in result.curves:
        t, m = curve.trajectory, curve.measures
        finite = m.rate[np.isfinite(m.rate)]
        curves.append({
            "alpha": curve.alpha,
            "theta_deg": curve.theta_deg,
            "phi_deg": curve.phi_deg,
            "final_entropy": float(m.entropy[-1]),
            "max_rate": float(finite.max()) if len(finite) else None,
            "coherence_zero_count": count_coherence_zeros(t.tau_grid, t.sigma12_re,
                                                          t.sigma12_im),
        })
    return {"grid": result.grid.to_dict(), "curves": curves}


def write_json_summary(result: SweepResult, destination) -> dict:
    """Write the per-curve summary plus the echoed grid as JSON; return it."""
    summary = summarize(result)
    text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    path = Path(destination)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write JSON summary to {path}: {exc.strerror or exc}") from exc
    return summary
