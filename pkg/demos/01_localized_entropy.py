"""
Entanglement from a localized start
===================================

The electron starts on the left dot (theta = 0).  Entropy grows from zero,
fastest for moderate coupling, and weak or very strong coupling both slow it.
"""

import numpy as np

from ddqpc import ModelParams, closed_form_trajectory, trajectory_measures

tau = np.linspace(0, 10, 1001)

# one curve per coupling, reported at a few times
print("alpha   S(0.5)   S(1)     S(2)     S(10)")
for alpha in (0.1, 1, 5, 10, 100, 1000):
    m = trajectory_measures(closed_form_trajectory(ModelParams(alpha), tau))
    picks = [m.entropy[np.searchsorted(tau, t)] for t in (0.5, 1, 2, 10)]
    print(f"{alpha:<7g}" + " ".join(f"{s:.4f}  " for s in picks))

# the rate is bounded and vanishes at tau = 0 for this start
m = trajectory_measures(closed_form_trajectory(ModelParams(5.0), tau))
print(f"\nalpha=5: R(0) = {m.rate[0]:g}, max R = {m.rate.max():.3f} bits per unit tau")
