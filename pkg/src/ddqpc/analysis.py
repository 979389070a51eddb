"""
Coupling-dependence studies built on the closed-form dynamics.

* optimal coupling for a localized start (:func:`scan_coupling`,
  :func:`optimize_coupling`, :func:`ds_dalpha`)
* coherence cycling in the oscillatory regime (:func:`detect_cycling`)
* superposition-start asymptotics (:func:`small_tau_rate_check`,
  :func:`crossover_check`)
* the entropy monotonicity property (:func:`monotonicity_scan`)

All evaluations assume aligned levels (``epsilon_norm == 0``).
"""

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np
from scipy import optimize

from ddqpc import measures
from ddqpc.dynamics import (Branch, ModelParams, closed_form_state, closed_form_trajectory,
                            omega_branch)
from ddqpc.errors import ParameterError, SingularPointError

__all__ = [
    "CouplingScanResult",
    "OptimalCoupling",
    "DsDalpha",
    "CyclingReport",
    "SmallTauReport",
    "CrossoverReport",
    "Violation",
    "entropy_at",
    "scan_coupling",
    "optimize_coupling",
    "ds_dalpha",
    "find_coherence_zeros",
    "detect_cycling",
    "small_tau_rate_check",
    "crossover_check",
    "find_decreases",
    "random_cases",
    "monotonicity_scan",
]

ZERO_FLOOR = 1e-12        # |sigma12|^2 at or below this counts as a coherence zero
OPTIMUM_XTOL = 1e-4       # absolute tolerance on the refined optimal alpha
MIN_SAMPLES_PER_PERIOD = 50


def entropy_at(theta_deg, phi_deg, alpha, tau, log_base=2) -> float:
    """Entanglement entropy of the closed-form state at one ``(alpha, tau)``."""
    state = closed_form_state(ModelParams(alpha, 0.0, theta_deg, phi_deg), tau)
    return measures.entropy_of_entanglement(state, log_base)


def _determinant(theta_deg, phi_deg, alpha, tau):
    return closed_form_state(ModelParams(alpha, 0.0, theta_deg, phi_deg), tau).determinant


# ---------------------------------------------------------------------------
# optimal coupling
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CouplingScanResult:
    tau: float
    alpha_grid: np.ndarray
    entropy_values: np.ndarray
    alpha_star: float
    ds_dalpha: Optional[np.ndarray] = None

    @property
    def argmax(self) -> int:
        return int(np.argmax(self.entropy_values))


@dataclass(frozen=True)
class OptimalCoupling:
    alpha_star: float
    entropy_star: float
    on_boundary: bool
    scan: CouplingScanResult = field(repr=False)


class DsDalpha(tuple):
    """``(analytic, finite_difference)`` estimates of ``dS/dalpha``."""

    def __new__(cls, analytic, finite_difference):
        return super().__new__(cls, (analytic, finite_difference))

    analytic = property(lambda self: self[0])
    finite_difference = property(lambda self: self[1])


def scan_coupling(theta_deg, phi_deg, tau, alpha_grid, log_base=2,
                  with_derivative=False) -> CouplingScanResult:
    """Evaluate ``S(alpha; tau)`` over a grid and report the argmax.

    Ties go to the smaller coupling.  With ``with_derivative`` the scan also
    stores :func:`ds_dalpha` (finite-difference form) at each grid point.
    """
    if not tau > 0:
        raise ParameterError(f"tau must be > 0, got {tau!r}")
    grid = np.asarray(alpha_grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise ParameterError("alpha_grid must be a non-empty 1-d sequence")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ParameterError("alpha_grid must be positive and strictly increasing")
    values = np.array([entropy_at(theta_deg, phi_deg, a, tau, log_base) for a in grid])
    best = int(np.argmax(values))
    derivative = None
    if with_derivative:
        derivative = np.array([_ds_dalpha_fd(theta_deg, phi_deg, tau, a, min(1e-4, a / 2),
                                             log_base) for a in grid])
    return CouplingScanResult(float(tau), grid, values, float(grid[best]), derivative)


def optimize_coupling(theta_deg, phi_deg, tau, alpha_min=0.1, alpha_max=20.0,
                      n_grid=400, log_base=2) -> OptimalCoupling:
    """Dense linear grid on ``[alpha_min, alpha_max]`` followed by golden-section
    refinement inside the bracket formed by the argmax's grid neighbours.

    An argmax on the grid boundary is reported as such and not refined; this
    is what happens for superposition starts, where entropy keeps growing with
    the coupling.
    """
    if not 0 < alpha_min < alpha_max:
        raise ParameterError("need 0 < alpha_min < alpha_max")
    if n_grid < 3:
        raise ParameterError("n_grid must be >= 3")
    scan = scan_coupling(theta_deg, phi_deg, tau, np.linspace(alpha_min, alpha_max, n_grid),
                         log_base)
    i = scan.argmax
    grid = scan.alpha_grid
    if i == 0 or i == len(grid) - 1:
        return OptimalCoupling(float(grid[i]), float(scan.entropy_values[i]), True, scan)
    lo, mid, hi = grid[i - 1], grid[i], grid[i + 1]
    if not (scan.entropy_values[i - 1] < scan.entropy_values[i] > scan.entropy_values[i + 1]):
        # plateau on the grid; the grid point is as good as the bracket allows
        return OptimalCoupling(float(mid), float(scan.entropy_values[i]), False, scan)
    res = optimize.minimize_scalar(lambda a: -entropy_at(theta_deg, phi_deg, a, tau, log_base),
                                   bracket=(lo, mid, hi), method="golden",
                                   options={"xtol": OPTIMUM_XTOL / hi})
    alpha_star = float(res.x)
    s_star = -float(res.fun)
    if s_star < scan.entropy_values[i]:
        alpha_star, s_star = float(mid), float(scan.entropy_values[i])
    return OptimalCoupling(alpha_star, s_star, False, scan)


def _ds_dalpha_fd(theta_deg, phi_deg, tau, alpha, delta, log_base):
    up = entropy_at(theta_deg, phi_deg, alpha + delta, tau, log_base)
    down = entropy_at(theta_deg, phi_deg, alpha - delta, tau, log_base)
    return (up - down) / (2.0 * delta)


def ds_dalpha(theta_deg, phi_deg, tau, alpha, delta_alpha=1e-4, log_base=2) -> DsDalpha:
    """Two estimates of ``dS/dalpha`` at fixed ``tau``.

    ``analytic`` chains ``dS/d det = log(lambda_+/lambda_-) / (2 lambda_+ - 1)``
    with a central difference of ``det(sigma)`` in alpha;
    ``finite_difference`` differentiates the entropy directly.
    """
    if not alpha > delta_alpha > 0:
        raise ParameterError("need alpha > delta_alpha > 0")
    scale = measures.log_scale(log_base)
    state = closed_form_state(ModelParams(alpha, 0.0, theta_deg, phi_deg), tau)
    lp, lm = measures.eigenvalues(state)
    if abs(2.0 * lp - 1.0) < measures.TAYLOR_RADIUS:
        raise SingularPointError(f"lambda_+ = {lp!r} is within 1e-8 of 1/2")
    if lm < measures.PURE_THRESHOLD:
        raise SingularPointError("state is pure; dS/d(det) diverges")
    factor = (math.log(lp) - math.log(lm)) / (2.0 * lp - 1.0) / scale
    d_det = (_determinant(theta_deg, phi_deg, alpha + delta_alpha, tau)
             - _determinant(theta_deg, phi_deg, alpha - delta_alpha, tau)) / (2.0 * delta_alpha)
    return DsDalpha(factor * d_det,
                    _ds_dalpha_fd(theta_deg, phi_deg, tau, alpha, delta_alpha, log_base))


# ---------------------------------------------------------------------------
# coherence cycling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CyclingReport:
    alpha: float
    branch: Branch
    zero_times: tuple
    period_estimate: Optional[float]

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "branch": self.branch.value,
                "zero_times": list(self.zero_times), "period_estimate": self.period_estimate}


def _zero_spacing(alpha):
    """Spacing ``4 pi / sqrt(64 - alpha^2)`` of coherence zeros for a localized start."""
    return 4.0 * math.pi / math.sqrt(64.0 - alpha * alpha)


def find_coherence_zeros(params: ModelParams, tau_max: float, spacing: float,
                         floor: float = ZERO_FLOOR) -> list:
    """Times in ``(0, tau_max)`` where ``|sigma12(tau)|^2`` touches zero.

    Interior local minima of ``|sigma12|^2`` on a uniform grid are refined
    with a bounded Brent search between the neighbouring grid points; a
    refined minimum at or below ``floor`` is a zero.  The end point is never
    a zero, so a coherence that has simply decayed below ``floor`` by
    ``tau_max`` is not reported.
    """
    n = int(math.ceil(tau_max / spacing)) + 1
    tau = np.linspace(0.0, tau_max, n)
    traj = closed_form_trajectory(params, tau)
    c2 = traj.sigma12_re**2 + traj.sigma12_im**2

    def coh2(t):
        s = closed_form_state(params, t)
        return s.coherence_sq

    zeros = []
    for i in range(1, n - 1):
        if not (c2[i] <= c2[i - 1] and c2[i] < c2[i + 1]):
            continue
        res = optimize.minimize_scalar(coh2, bounds=(tau[i - 1], tau[i + 1]), method="bounded",
                                       options={"xatol": 1e-12})
        t_min, v_min = float(res.x), float(res.fun)
        if c2[i] < v_min:
            t_min, v_min = float(tau[i]), float(c2[i])
        if v_min <= floor and t_min > 0:
            zeros.append(t_min)
    return zeros


def detect_cycling(alpha, theta_deg=0.0, phi_deg=0.0, tau_max=10.0,
                   resolution=None) -> CyclingReport:
    """Locate the zeros of the coherence and estimate the cycling period.

    ``resolution`` is the scan spacing in tau; it defaults to 1/100 of the
    expected zero spacing and must give at least 50 samples per spacing.
    Only the oscillatory branch (``alpha < 8``) cycles; the critical and
    overdamped branches return an empty report carrying their branch tag.
    """
    if not tau_max > 0:
        raise ParameterError(f"tau_max must be > 0, got {tau_max!r}")
    branch, _ = omega_branch(alpha)
    if branch is not Branch.OSCILLATORY:
        return CyclingReport(float(alpha), branch, (), None)
    expected = _zero_spacing(alpha)
    if resolution is None:
        resolution = min(0.01, expected / 100.0)
    if not 0 < resolution <= expected / MIN_SAMPLES_PER_PERIOD:
        raise ParameterError(f"resolution {resolution!r} gives fewer than "
                             f"{MIN_SAMPLES_PER_PERIOD} samples per period {expected:.4g}")
    params = ModelParams(alpha, 0.0, theta_deg, phi_deg)
    zeros = find_coherence_zeros(params, tau_max, resolution)
    period = float(np.mean(np.diff(zeros))) if len(zeros) >= 2 else None
    return CyclingReport(float(alpha), branch, tuple(zeros), period)


# ---------------------------------------------------------------------------
# superposition asymptotics
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SmallTauReport:
    tau: np.ndarray
    ratios: np.ndarray
    mean_ratio: float
    max_deviation: float
    passed: bool


def small_tau_rate_check(theta_deg, alpha, tau_window=(0.001, 0.01), phi_deg=0.0,
                         n_points=50, tolerance=0.2, log_base=2) -> SmallTauReport:
    """Test ``R ~ alpha log(lambda_+/lambda_-) exp(-alpha tau / 2)`` at small tau.

    Reports the ratio of the rate to that expression across the window and
    its largest relative deviation from the window mean; the law holds when
    the deviation stays within ``tolerance``.
    """
    if abs(math.sin(math.radians(theta_deg))) < 1e-12:
        raise ParameterError("small-tau law applies to superpositions only (theta != 0, 180)")
    lo, hi = tau_window
    if not 0 < lo < hi <= 0.1:
        raise ParameterError("tau_window must satisfy 0 < start < end <= 0.1")
    scale = measures.log_scale(log_base)
    params = ModelParams(alpha, 0.0, theta_deg, phi_deg)
    taus = np.linspace(lo, hi, n_points)
    ratios = np.empty(n_points)
    for k, t in enumerate(taus):
        state = closed_form_state(params, t)
        rate = measures.entanglement_rate_analytic(state, alpha, log_base)
        lp, lm = measures.eigenvalues(state)
        law = alpha * (math.log(lp) - math.log(lm)) / scale * math.exp(-alpha * t / 2.0)
        ratios[k] = rate / law
    mean = float(np.mean(ratios))
    dev = float(np.max(np.abs(ratios - mean)) / abs(mean))
    return SmallTauReport(taus, ratios, mean, dev, dev <= tolerance)


@dataclass(frozen=True)
class CrossoverReport:
    theta_deg: float
    alphas: tuple
    small_tau: float
    large_tau: float
    small_tau_entropy: tuple
    large_tau_entropy: tuple
    increasing_at_small_tau: bool
    decreasing_at_large_tau: bool

    @property
    def passed(self) -> bool:
        return self.increasing_at_small_tau and self.decreasing_at_large_tau


def crossover_check(theta_deg, alphas=(10.0, 100.0, 1000.0), small_tau=0.01,
                    large_tau=5.0, phi_deg=0.0, log_base=2) -> CrossoverReport:
    """Check that an intermediate-angle start behaves like a superposition at
    small tau (entropy grows with coupling) and like a localized start at
    large tau (entropy falls with coupling)."""
    if not 0 < theta_deg < 90:
        raise ParameterError(f"theta_deg must lie strictly between 0 and 90, got {theta_deg!r}")
    alphas = tuple(float(a) for a in alphas)
    small = tuple(entropy_at(theta_deg, phi_deg, a, small_tau, log_base) for a in alphas)
    large = tuple(entropy_at(theta_deg, phi_deg, a, large_tau, log_base) for a in alphas)
    inc = all(b > a for a, b in zip(small, small[1:]))
    dec = all(b < a for a, b in zip(large, large[1:]))
    return CrossoverReport(float(theta_deg), alphas, small_tau, large_tau, small, large, inc, dec)


# ---------------------------------------------------------------------------
# monotonicity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    case: int
    index: int
    tau: float
    drop: float
    params: Optional[ModelParams] = None


def find_decreases(series, tolerance=1e-9) -> list:
    """Indices ``i`` with ``series[i+1] < series[i] - tolerance``."""
    s = np.asarray(series, dtype=float)
    return np.flatnonzero(np.diff(s) < -tolerance).tolist()


def random_cases(n_random, seed=0) -> list:
    """Initial states uniform on the Bloch sphere, alpha log-uniform in [1e-2, 1e3]."""
    rng = np.random.default_rng(seed)
    u = rng.random((n_random, 3))
    theta = np.degrees(np.arccos(1.0 - 2.0 * u[:, 0]))
    phi = 360.0 * u[:, 1]
    alpha = 10.0 ** (-2.0 + 5.0 * u[:, 2])
    return [ModelParams(float(a), 0.0, float(t), float(p)) for a, t, p in zip(alpha, theta, phi)]


def monotonicity_scan(n_random=200, seed=0, tau_max=10.0, n_points=2000, tolerance=1e-9,
                      cases: Optional[Iterable[ModelParams]] = None,
                      log_base=2) -> list:
    """Scan entropy curves for decreases larger than ``tolerance``.

    Uses ``n_random`` seeded random cases unless explicit ``cases`` are given.
    Returns every offending adjacent pair as a :class:`Violation`.
    """
    if cases is None:
        if n_random < 1:
            raise ParameterError("n_random must be >= 1")
        cases = random_cases(n_random, seed)
    if not (math.isfinite(tau_max) and tau_max > 0):
        raise ParameterError(f"tau_max must be > 0, got {tau_max!r}")
    if n_points < 2:
        raise ParameterError(f"n_points must be >= 2, got {n_points!r}")
    if not tolerance >= 0:
        raise ParameterError(f"tolerance must be >= 0, got {tolerance!r}")
    tau = np.linspace(0.0, tau_max, n_points)
    out = []
    for k, params in enumerate(cases):
        m = measures.trajectory_measures(closed_form_trajectory(params, tau), log_base)
        for i in find_decreases(m.entropy, tolerance):
            out.append(Violation(k, i, float(tau[i]),
                                 float(m.entropy[i] - m.entropy[i + 1]), params))
    return out
