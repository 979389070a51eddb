"""
Coherence cycling under weak damping
====================================

For alpha < 8 the coherence |sigma12| touches zero periodically, and the
entropy stalls at each touch.  The zeros sit at 4 k pi / sqrt(64 - alpha^2).
"""

import math

import numpy as np

from ddqpc import ModelParams, closed_form_trajectory, detect_cycling, trajectory_measures

for alpha in (0.01, 1, 4, 7, 7.9, 8, 9):
    rep = detect_cycling(alpha, tau_max=40 if alpha > 7 else 10)
    period = "-" if rep.period_estimate is None else f"{rep.period_estimate:.4f}"
    print(f"alpha={alpha:<5g} {rep.branch.value:<12} zeros={len(rep.zero_times):<3} period={period}")

# entropy plateaus line up with the zeros
alpha = 0.01
tau = np.linspace(0, 5, 5001)
m = trajectory_measures(closed_form_trajectory(ModelParams(alpha), tau))
print("\nzero     analytic  S there   R there")
for z in detect_cycling(alpha, tau_max=5).zero_times:
    k = round(z / (math.pi / 2))
    i = np.argmin(abs(tau - z))
    print(f"{z:.5f}  {4 * k * math.pi / math.sqrt(64 - alpha**2):.5f}   {m.entropy[i]:.4f}    "
          f"{m.rate[i]:.1e}")
