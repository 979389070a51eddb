"""
Entanglement and coherence measures for the double-dot reduced state.

The composite double-dot + detector state is pure, so the von Neumann
entropy of the 2x2 reduced matrix is the entropy of entanglement.  Entropies
default to bits (log base 2), where a maximally entangled qubit scores 1.
Pass ``log_base="e"`` for nats.

The entanglement rate ``dS/dtau`` has a closed expression in terms of the
eigenvalues, since ``d det(sigma) / d tau = alpha |sigma12|^2`` along any
trajectory of the rate equations::

    R = alpha |sigma12|^2 log(lambda_+ / lambda_-) / (2 lambda_+ - 1)

It has a removable 0/0 at ``lambda_+ = 1/2`` (handled by its Taylor limit)
and diverges as ``lambda_+ -> 1`` with ``sigma12 != 0``, which is reported
as ``math.inf``.
"""

import math
from dataclasses import dataclass

import numpy as np

from ddqpc.dynamics import QubitState, Trajectory
from ddqpc.errors import NonPhysicalStateError, ParameterError

__all__ = [
    "MeasureSample",
    "TrajectoryMeasures",
    "eigenvalues",
    "entropy_of_entanglement",
    "entanglement_rate_analytic",
    "entanglement_rate_from_eigenvalues",
    "entanglement_rate_numeric",
    "central_difference",
    "coherence",
    "measure_trajectory",
    "trajectory_measures",
    "log_scale",
]

# roundoff window on the eigenvalue radicand, and the hard failure limit
CLAMP_WINDOW = 1e-12
NONPHYSICAL_LIMIT = 1e-9
# |2 lambda_+ - 1| below this uses the Taylor limit of the rate
TAYLOR_RADIUS = 1e-8
# lambda_- below this (with sigma12 != 0) is the divergent start of a superposition
PURE_THRESHOLD = 1e-12


def log_scale(log_base) -> float:
    """Natural log of the base, i.e. the divisor turning nats into that base."""
    if log_base in (2, "2", 2.0):
        return math.log(2.0)
    if log_base in ("e", math.e):
        return 1.0
    raise ParameterError(f"log_base must be 2 or 'e', got {log_base!r}")


@dataclass(frozen=True)
class MeasureSample:
    tau: float
    lambda_plus: float
    lambda_minus: float
    entropy: float
    rate: float
    coherence: float


@dataclass(frozen=True, eq=False)
class TrajectoryMeasures:
    """Column-wise measures for a whole trajectory."""

    tau: np.ndarray
    lambda_plus: np.ndarray
    lambda_minus: np.ndarray
    entropy: np.ndarray
    rate: np.ndarray
    coherence: np.ndarray

    def __len__(self):
        return len(self.tau)

    def sample(self, index: int) -> MeasureSample:
        return MeasureSample(*(float(getattr(self, f)[index]) for f in
                               ("tau", "lambda_plus", "lambda_minus", "entropy", "rate",
                                "coherence")))


# ---------------------------------------------------------------------------
# vectorized kernels
# ---------------------------------------------------------------------------

def _eigen_arrays(s11, s22, re, im):
    s11, s22, re, im = (np.asarray(a, dtype=float) for a in (s11, s22, re, im))
    coh2 = re * re + im * im
    det = s11 * s22 - coh2
    rad = 1.0 - 4.0 * det
    bad = (rad < -NONPHYSICAL_LIMIT) | (rad > 1.0 + NONPHYSICAL_LIMIT) | ~np.isfinite(rad)
    if np.any(bad):
        idx = np.flatnonzero(np.atleast_1d(bad))
        raise NonPhysicalStateError(
            f"non-physical density matrix at grid index {idx.tolist()[:10]} "
            f"(eigenvalue radicand {np.atleast_1d(rad)[idx[0]]!r})", idx)
    root = np.sqrt(np.clip(rad, 0.0, 1.0))
    lp = 0.5 * (1.0 + root)
    # det / lambda_+ keeps full relative precision for nearly pure states
    lm = np.minimum(np.clip(det, 0.0, None) / lp, lp)
    return lp, lm, root, coh2


def _entropy_nats(lp, lm):
    with np.errstate(divide="ignore", invalid="ignore"):
        minus = np.where(lm > 0, lm * np.log(np.where(lm > 0, lm, 1.0)), 0.0)
        plus = lp * np.log1p(-lm)
    return 0.0 - (plus + minus)


def _rate_nats(alpha, coh2, lp, lm, root):
    lp, lm, root, coh2 = np.broadcast_arrays(*(np.asarray(a, dtype=float)
                                               for a in (lp, lm, root, coh2)))
    out = np.empty(lp.shape)
    zero = coh2 == 0
    diverge = ~zero & (lm < PURE_THRESHOLD)
    taylor = ~zero & ~diverge & (root < TAYLOR_RADIUS)
    general = ~(zero | diverge | taylor)
    out[zero] = 0.0
    out[diverge] = math.inf
    out[taylor] = 2.0 * alpha * coh2[taylor]
    g = general
    out[g] = alpha * coh2[g] * (np.log(lp[g]) - np.log(lm[g])) / root[g]
    return out


# ---------------------------------------------------------------------------
# pointwise API
# ---------------------------------------------------------------------------

def eigenvalues(state: QubitState):
    """Return ``(lambda_plus, lambda_minus)`` of the density matrix, largest first.

    Raises :class:`NonPhysicalStateError` when the radicand
    ``1 - 4 det`` falls outside ``[0, 1]`` by more than 1e-9.
    """
    lp, lm, _, _ = _eigen_arrays(state.sigma11, state.sigma22, state.sigma12_re,
                                 state.sigma12_im)
    return float(lp), float(lm)


def entropy_of_entanglement(state: QubitState, log_base=2) -> float:
    """Von Neumann entropy of ``state`` (``0 log 0 = 0``)."""
    scale = log_scale(log_base)
    lp, lm, _, _ = _eigen_arrays(state.sigma11, state.sigma22, state.sigma12_re,
                                 state.sigma12_im)
    return float(_entropy_nats(lp, lm)) / scale


def entanglement_rate_from_eigenvalues(lambda_plus: float, coherence_sq: float,
                                       alpha: float, log_base=2) -> float:
    """Rate formula evaluated directly from ``lambda_+`` and ``|sigma12|^2``."""
    if alpha < 0:
        raise ParameterError(f"alpha must be >= 0, got {alpha!r}")
    scale = log_scale(log_base)
    lp = float(lambda_plus)
    lm = 1.0 - lp
    rate = _rate_nats(float(alpha), coherence_sq, lp, lm, 2.0 * lp - 1.0)
    return float(rate) / scale


def entanglement_rate_analytic(state: QubitState, alpha: float, log_base=2) -> float:
    """``dS/dtau`` from the eigenvalue formula; ``math.inf`` at the divergence."""
    if alpha < 0:
        raise ParameterError(f"alpha must be >= 0, got {alpha!r}")
    scale = log_scale(log_base)
    lp, lm, root, coh2 = _eigen_arrays(state.sigma11, state.sigma22, state.sigma12_re,
                                       state.sigma12_im)
    return float(_rate_nats(float(alpha), coh2, lp, lm, root)) / scale


def coherence(state: QubitState) -> float:
    """Euclidean norm of the off-diagonal part, ``sqrt(2) |sigma12|``."""
    return math.sqrt(2.0) * math.hypot(state.sigma12_re, state.sigma12_im)


def central_difference(values, tau, index: int) -> float:
    """``(v[i+1] - v[i-1]) / (tau[i+1] - tau[i-1])`` at an interior index."""
    n = len(values)
    if not 0 < index < n - 1:
        raise ParameterError(f"index {index} is not interior to a grid of {n} points")
    return (values[index + 1] - values[index - 1]) / (tau[index + 1] - tau[index - 1])


def entanglement_rate_numeric(trajectory: Trajectory, index: int, log_base=2) -> float:
    """Central-difference estimate of ``dS/dtau`` at an interior grid point.

    The trajectory grid must be uniform.
    """
    n = len(trajectory)
    if not 0 < index < n - 1:
        raise ParameterError(f"index {index} is not interior to a grid of {n} points")
    spacing = np.diff(trajectory.tau_grid)
    if not np.allclose(spacing, spacing[0], rtol=1e-9, atol=0.0):
        raise ParameterError("numeric rate requires a uniform tau grid")
    window = slice(index - 1, index + 2)
    s = [entropy_of_entanglement(trajectory.state(i), log_base)
         for i in range(index - 1, index + 2)]
    return central_difference(s, trajectory.tau_grid[window], 1)


# ---------------------------------------------------------------------------
# trajectory-level API
# ---------------------------------------------------------------------------

def trajectory_measures(trajectory: Trajectory, log_base=2) -> TrajectoryMeasures:
    """Eigenvalues, entropy, analytic rate and coherence at every grid point."""
    scale = log_scale(log_base)
    lp, lm, root, coh2 = _eigen_arrays(trajectory.sigma11, trajectory.sigma22,
                                       trajectory.sigma12_re, trajectory.sigma12_im)
    entropy = _entropy_nats(lp, lm) / scale
    rate = _rate_nats(float(trajectory.params.alpha), coh2, lp, lm, root) / scale
    return TrajectoryMeasures(np.asarray(trajectory.tau_grid, dtype=float), lp, lm,
                              entropy, rate, math.sqrt(2.0) * np.sqrt(coh2))


def measure_trajectory(trajectory: Trajectory, log_base=2) -> list:
    """List of :class:`MeasureSample`, one per grid point."""
    m = trajectory_measures(trajectory, log_base)
    return [m.sample(i) for i in range(len(m))]
