"""
Reduced dynamics of a double-dot charge qubit monitored by a point contact.

Everything is expressed in normalized units: time ``tau = Omega0 * t`` and
detector coupling ``alpha = Gamma_d / Omega0``.  In these units the rate
equations for the double-dot density matrix are::

    d sigma11 / d tau = i (sigma12 - sigma21)
    d sigma22 / d tau = -d sigma11 / d tau
    d sigma12 / d tau = i eps sigma12 + i (sigma11 - sigma22) - (alpha / 2) sigma12

with ``eps = (E2 - E1) / Omega0``.  For aligned levels (``eps == 0``) the
system is solved in closed form; for any ``eps`` a fixed-step RK4 integrator
is available.  The two routes cross-check each other in the test-suite.

The closed form is written on three branches of ``w = sqrt(alpha**2 - 64)``:
overdamped (``alpha > 8``, real ``w``), oscillatory (``alpha < 8``,
imaginary ``w``) and critical (``alpha == 8`` within a small window, where a
truncated Maclaurin series replaces ``sinh(x)/x`` and ``cosh(x)``).
"""

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numba import njit

from ddqpc.errors import NonPhysicalStateError, ParameterError

__all__ = [
    "DEFAULT_STEP",
    "CRITICAL_WINDOW",
    "Branch",
    "OmegaBranch",
    "QubitState",
    "ModelParams",
    "PhysicalParams",
    "PhysicalConversion",
    "Trajectory",
    "initial_state",
    "omega_branch",
    "closed_form_state",
    "closed_form_trajectory",
    "rate_rhs",
    "integrate_rate_equations",
    "params_from_physical",
]

DEFAULT_STEP = 1e-4
# |alpha**2 - 64| below this switches to the series expansion
CRITICAL_WINDOW = 1e-6

CLOSED_FORM = "closed-form"
INTEGRATED = "integrated"


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QubitState:
    """Double-dot density matrix at one instant.

    ``sigma21`` is never stored; it is the complex conjugate of ``sigma12``.
    """

    sigma11: float
    sigma22: float
    sigma12_re: float
    sigma12_im: float

    @property
    def sigma12(self) -> complex:
        return complex(self.sigma12_re, self.sigma12_im)

    @property
    def sigma21(self) -> complex:
        return complex(self.sigma12_re, -self.sigma12_im)

    @property
    def coherence_sq(self) -> float:
        """``|sigma12|**2``."""
        return self.sigma12_re**2 + self.sigma12_im**2

    @property
    def trace(self) -> float:
        return self.sigma11 + self.sigma22

    @property
    def determinant(self) -> float:
        """``sigma11 sigma22 - |sigma12|**2``; zero for pure states."""
        return self.sigma11 * self.sigma22 - self.coherence_sq

    def matrix(self) -> np.ndarray:
        """Full 2x2 Hermitian density matrix."""
        return np.array([[self.sigma11, self.sigma12],
                         [self.sigma21, self.sigma22]], dtype=complex)

    def check(self, tol: float = 1e-12) -> "QubitState":
        """Raise :class:`NonPhysicalStateError` unless trace, diagonal positivity
        and the determinant bound hold within ``tol``.  Returns ``self``."""
        problems = []
        if abs(self.trace - 1.0) > tol:
            problems.append(f"trace {self.trace!r} != 1")
        if self.sigma11 < -tol or self.sigma22 < -tol:
            problems.append("negative population")
        if self.determinant < -tol:
            problems.append(f"determinant {self.determinant!r} < 0")
        if problems:
            raise NonPhysicalStateError("; ".join(problems))
        return self


@dataclass(frozen=True)
class ModelParams:
    """Normalized model parameters plus the initial Bloch angles (degrees)."""

    alpha: float
    epsilon_norm: float = 0.0
    theta_deg: float = 0.0
    phi_deg: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "epsilon_norm", "theta_deg", "phi_deg"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
        if self.alpha < 0:
            raise ParameterError(f"alpha must be >= 0, got {self.alpha!r}")


@dataclass(frozen=True)
class PhysicalParams:
    """Point-contact and double-dot parameters in physical units (hbar = 1).

    The transmission with the right dot occupied is fixed to zero.
    """

    T1: float
    Vd: float
    Omega0: float = 1.0
    E1: float = 0.0
    E2: float = 0.0

    @property
    def gamma_d(self) -> float:
        return self.T1 * self.Vd / (2.0 * math.pi)

    @property
    def epsilon(self) -> float:
        return self.E2 - self.E1


class PhysicalConversion(NamedTuple):
    params: ModelParams
    gamma_d: float
    current_left: float
    current_right: float


class Branch(str, enum.Enum):
    OSCILLATORY = "oscillatory"
    CRITICAL = "critical"
    OVERDAMPED = "overdamped"


class OmegaBranch(NamedTuple):
    branch: Branch
    magnitude: float


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled solution ``sigma(tau)`` stored column-wise.

    Use :meth:`state` or :attr:`states` to get :class:`QubitState` values.
    """

    params: ModelParams
    tau_grid: np.ndarray
    sigma11: np.ndarray
    sigma22: np.ndarray
    sigma12_re: np.ndarray
    sigma12_im: np.ndarray
    method: str

    def __len__(self):
        return len(self.tau_grid)

    def state(self, index: int) -> QubitState:
        return QubitState(float(self.sigma11[index]), float(self.sigma22[index]),
                          float(self.sigma12_re[index]), float(self.sigma12_im[index]))

    @property
    def states(self) -> list:
        return [self.state(i) for i in range(len(self))]

    @property
    def sigma12(self) -> np.ndarray:
        return self.sigma12_re + 1j * self.sigma12_im

    @property
    def final(self) -> QubitState:
        return self.state(-1)


# ---------------------------------------------------------------------------
# initial state, branches, parameter conversion
# ---------------------------------------------------------------------------

def initial_state(theta_deg: float, phi_deg: float) -> QubitState:
    """Pure state with ``sigma11 = cos^2(theta/2)`` and
    ``sigma12 = sin(theta/2) cos(theta/2) exp(-i phi)``; angles in degrees."""
    half = math.radians(theta_deg % 360.0) / 2.0
    phi = math.radians(phi_deg % 360.0)
    c, s = math.cos(half), math.sin(half)
    amp = s * c
    return QubitState(c * c, s * s, amp * math.cos(phi) + 0.0, 0.0 - amp * math.sin(phi))


def omega_branch(alpha: float) -> OmegaBranch:
    """Classify the dynamics by the sign of ``alpha**2 - 64``.

    Returns the branch and ``sqrt(|alpha**2 - 64|)``.

    >>> omega_branch(10.0)
    OmegaBranch(branch=<Branch.OVERDAMPED: 'overdamped'>, magnitude=6.0)
    """
    if not alpha >= 0:
        raise ParameterError(f"alpha must be >= 0, got {alpha!r}")
    disc = alpha * alpha - 64.0
    if abs(disc) <= CRITICAL_WINDOW:
        return OmegaBranch(Branch.CRITICAL, 0.0)
    kind = Branch.OVERDAMPED if disc > 0 else Branch.OSCILLATORY
    return OmegaBranch(kind, math.sqrt(abs(disc)))


def params_from_physical(phys: PhysicalParams, theta_deg: float = 0.0,
                         phi_deg: float = 0.0) -> PhysicalConversion:
    """Convert physical parameters to normalized ones.

    Currents are returned in units with ``e = 1``; the right-dot current is
    zero because its transmission is zero.
    """
    if not phys.Omega0 > 0:
        raise ParameterError(f"Omega0 must be > 0, got {phys.Omega0!r}")
    if not 0.0 <= phys.T1 <= 1.0:
        raise ParameterError(f"T1 must lie in [0, 1], got {phys.T1!r}")
    if not phys.Vd >= 0:
        raise ParameterError(f"Vd must be >= 0, got {phys.Vd!r}")
    gamma_d = phys.gamma_d
    params = ModelParams(alpha=gamma_d / phys.Omega0,
                         epsilon_norm=phys.epsilon / phys.Omega0,
                         theta_deg=theta_deg, phi_deg=phi_deg)
    return PhysicalConversion(params, gamma_d, gamma_d, 0.0)


# ---------------------------------------------------------------------------
# closed form (eps = 0)
# ---------------------------------------------------------------------------

def _damped_terms(alpha, tau):
    """Return ``(c, s, d)`` with

    c = exp(-alpha tau/4) cosh(w tau/4)
    s = exp(-alpha tau/4) sinh(w tau/4) / w
    d = exp(-alpha tau/2)

    evaluated without overflow on every branch.
    """
    tau = np.asarray(tau, dtype=float)
    branch, mag = omega_branch(alpha)
    d = np.exp(-0.5 * alpha * tau)
    if branch is Branch.OVERDAMPED:
        # exp(-(alpha -+ w) tau/4); alpha - w rewritten to avoid cancellation
        slow = np.exp(-(64.0 / (alpha + mag)) * tau / 4.0)
        frac = -np.expm1(-mag * tau / 2.0)   # 1 - exp(-w tau/2)
        c = slow * (1.0 - 0.5 * frac)
        s = slow * frac / (2.0 * mag)
    elif branch is Branch.OSCILLATORY:
        env = np.exp(-0.25 * alpha * tau)
        c = env * np.cos(mag * tau / 4.0)
        s = env * np.sin(mag * tau / 4.0) / mag
    else:
        env = np.exp(-0.25 * alpha * tau)
        q = (alpha * alpha - 64.0) * tau * tau / 16.0   # signed (w tau/4)**2
        c = env * (1.0 + q / 2.0 + q * q / 24.0)
        s = env * (tau / 4.0) * (1.0 + q / 6.0 + q * q / 120.0)
    return c, s, d


def _closed_form_arrays(params, tau):
    if params.epsilon_norm != 0:
        raise ParameterError("closed form requires epsilon_norm == 0 "
                             f"(got {params.epsilon_norm!r}); use integrate_rate_equations")
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0) or not np.all(np.isfinite(tau)):
        raise ParameterError("tau must be finite and >= 0")
    init = initial_state(params.theta_deg, params.phi_deg)
    alpha = float(params.alpha)
    z0 = init.sigma11 - init.sigma22
    x0, y0 = init.sigma12_re, init.sigma12_im
    c, s, d = _damped_terms(alpha, tau)
    # population imbalance z and Im sigma12 form a damped oscillator;
    # Re sigma12 decouples and just dephases
    dz = z0 * (c + alpha * s - 1.0) - 16.0 * y0 * s
    y = 4.0 * z0 * s + y0 * (c - alpha * s)
    x = x0 * d
    s11 = init.sigma11 + 0.5 * dz
    s22 = init.sigma22 - 0.5 * dz
    return s11, s22, x, y


def closed_form_state(params: ModelParams, tau: float) -> QubitState:
    """Exact ``sigma(tau)`` for aligned levels.

    Parameters
    ----------
    params : ModelParams
        Must have ``epsilon_norm == 0``.
    tau : float
        Normalized time, ``>= 0``.

    Returns
    -------
    QubitState
    """
    s11, s22, x, y = _closed_form_arrays(params, float(tau))
    if tau == 0:
        return initial_state(params.theta_deg, params.phi_deg)
    return QubitState(float(s11), float(s22), float(x), float(y))


def _check_grid(tau_grid):
    tau_grid = np.asarray(tau_grid, dtype=float)
    if tau_grid.ndim != 1 or len(tau_grid) == 0:
        raise ParameterError("tau_grid must be a non-empty 1-d sequence")
    if tau_grid[0] != 0:
        raise ParameterError("tau_grid must start at 0")
    if np.any(np.diff(tau_grid) <= 0):
        raise ParameterError("tau_grid must be strictly increasing")
    return tau_grid


def closed_form_trajectory(params: ModelParams, tau_grid) -> Trajectory:
    """Vectorized :func:`closed_form_state` over a grid starting at 0."""
    tau_grid = _check_grid(tau_grid)
    s11, s22, x, y = (np.array(a, dtype=float) for a in _closed_form_arrays(params, tau_grid))
    init = initial_state(params.theta_deg, params.phi_deg)
    s11[0], s22[0], x[0], y[0] = init.sigma11, init.sigma22, init.sigma12_re, init.sigma12_im
    return Trajectory(params, tau_grid, s11, s22, x, y, CLOSED_FORM)


# ---------------------------------------------------------------------------
# rate equations + RK4
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _deriv(s11, s22, x, y, alpha, eps):
    # i (sigma12 - sigma21) = i * 2i * Im sigma12
    d11 = -2.0 * y
    dx = -eps * y - 0.5 * alpha * x
    dy = eps * x + (s11 - s22) - 0.5 * alpha * y
    return d11, -d11, dx, dy


@njit(cache=True, nogil=True)
def _rk4_step(u, alpha, eps, h):
    a1, b1, c1, e1 = _deriv(u[0], u[1], u[2], u[3], alpha, eps)
    hh = 0.5 * h
    a2, b2, c2, e2 = _deriv(u[0] + hh * a1, u[1] + hh * b1, u[2] + hh * c1, u[3] + hh * e1,
                            alpha, eps)
    a3, b3, c3, e3 = _deriv(u[0] + hh * a2, u[1] + hh * b2, u[2] + hh * c2, u[3] + hh * e2,
                            alpha, eps)
    a4, b4, c4, e4 = _deriv(u[0] + h * a3, u[1] + h * b3, u[2] + h * c3, u[3] + h * e3,
                            alpha, eps)
    w = h / 6.0
    u[0] += w * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    u[1] += w * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
    u[2] += w * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
    u[3] += w * (e1 + 2.0 * e2 + 2.0 * e3 + e4)


@njit(cache=True, nogil=True)
def _rk4_kernel(u0, alpha, eps, step, n_steps, tail, every, out):
    u = u0.copy()
    out[0, :] = u
    row = 1
    for k in range(1, n_steps + 1):
        _rk4_step(u, alpha, eps, step)
        if k % every == 0:
            out[row, :] = u
            row += 1
    if tail > 0.0:
        _rk4_step(u, alpha, eps, tail)
        out[row, :] = u
        row += 1
    elif n_steps % every != 0:
        out[row, :] = u
        row += 1
    return row


def rate_rhs(state: QubitState, alpha: float, epsilon_norm: float = 0.0):
    """Right-hand side of the rate equations with ``Omega0 = 1``.

    Returns ``(d sigma11, d sigma22, d sigma12)`` per unit tau; the last entry
    is complex.
    """
    d11, d22, dx, dy = _deriv(state.sigma11, state.sigma22, state.sigma12_re,
                              state.sigma12_im, float(alpha), float(epsilon_norm))
    return d11, d22, complex(dx, dy)


def integrate_rate_equations(params: ModelParams, tau_end: float,
                             step: float = DEFAULT_STEP, record_every: int = 1) -> Trajectory:
    """Fixed-step classical RK4 from the pure initial state.

    Samples are recorded every ``record_every`` steps (every step by default)
    and always at ``tau_end``; a shorter final step lands exactly on
    ``tau_end`` when it is not a multiple of ``step``.  No trace
    renormalization is applied.
    """
    if not (math.isfinite(tau_end) and tau_end > 0):
        raise ParameterError(f"tau_end must be > 0, got {tau_end!r}")
    if not (math.isfinite(step) and step > 0):
        raise ParameterError(f"step must be > 0, got {step!r}")
    if step > tau_end:
        raise ParameterError(f"step {step!r} exceeds tau_end {tau_end!r}")
    every = int(record_every)
    if every < 1:
        raise ParameterError("record_every must be >= 1")

    ratio = tau_end / step
    n_steps = int(round(ratio)) if abs(ratio - round(ratio)) < 1e-9 * ratio else int(math.floor(ratio))
    tail = tau_end - n_steps * step
    if tail <= 1e-9 * step:
        tail = 0.0

    recorded = np.arange(0, n_steps + 1, every)
    extra = tail > 0 or recorded[-1] != n_steps
    tau_grid = recorded * step
    if extra:
        tau_grid = np.append(tau_grid, tau_end)
    else:
        tau_grid[-1] = tau_end

    init = initial_state(params.theta_deg, params.phi_deg)
    u0 = np.array([init.sigma11, init.sigma22, init.sigma12_re, init.sigma12_im])
    out = np.empty((len(tau_grid), 4))
    rows = _rk4_kernel(u0, float(params.alpha), float(params.epsilon_norm), float(step),
                       n_steps, float(tail), every, out)
    assert rows == len(tau_grid)
    return Trajectory(params, tau_grid, out[:, 0].copy(), out[:, 1].copy(),
                      out[:, 2].copy(), out[:, 3].copy(), INTEGRATED)
