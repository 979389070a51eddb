"""
Superposition starts
====================

Starting in an equal superposition (theta = 90) the rate diverges at tau = 0
and entropy grows without bound in alpha at short times.  A partial
superposition (theta = 30) shows the crossover between the two regimes.
"""

from ddqpc import crossover_check, entropy_at, small_tau_rate_check

print("theta=90, tau=0.01")
for alpha in (1, 10, 100, 1000):
    print(f"  alpha={alpha:<5g} S={entropy_at(90, 0, alpha, 0.01):.5f}")

rep = small_tau_rate_check(90, 100, (0.001, 0.01))
print(f"\nsmall-tau law at alpha=100: ratio {rep.mean_ratio:.4f}, spread {rep.max_deviation:.1e}")

x = crossover_check(30)
print("\ntheta=30        alpha=10  alpha=100 alpha=1000")
print("  S(tau=0.01)   " + "  ".join(f"{s:.4f}" for s in x.small_tau_entropy))
print("  S(tau=5)      " + "  ".join(f"{s:.4f}" for s in x.large_tau_entropy))
print(f"  crossover holds: {x.passed}")
