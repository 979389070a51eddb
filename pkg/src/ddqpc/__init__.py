"""Entanglement dynamics of a double-dot charge qubit coupled to a point-contact detector."""

from ddqpc.analysis import (crossover_check, detect_cycling, ds_dalpha, entropy_at,
                            monotonicity_scan, optimize_coupling, scan_coupling, small_tau_rate_check)
from ddqpc.dynamics import (Branch, ModelParams, PhysicalParams, QubitState, Trajectory,
                            closed_form_state, closed_form_trajectory, initial_state,
                            integrate_rate_equations, omega_branch, params_from_physical,
                            rate_rhs)
from ddqpc.errors import (DDQPCError, NonPhysicalStateError, NumericalError, ParameterError,
                          SingularPointError, SweepError)
from ddqpc.measures import (MeasureSample, coherence, eigenvalues, entanglement_rate_analytic,
                            entanglement_rate_numeric, entropy_of_entanglement,
                            measure_trajectory, trajectory_measures)
from ddqpc.sweep import (FIGURE_PRESETS, SweepGrid, SweepResult, figure_preset, run_sweep, write_csv,
                         write_json_summary)

__version__ = "0.1.0"
