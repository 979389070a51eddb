"""
Optimal coupling at tau = 1
===========================

A coarse scan over alpha, then golden-section refinement.  alpha = 5 gets
within a fraction of a percent of the best achievable entropy.
"""

from ddqpc import ds_dalpha, entropy_at, optimize_coupling, scan_coupling

scan = scan_coupling(0, 0, 1.0, [0.1, 1, 2, 3, 4, 5, 6, 8, 10, 15, 20])
for a, s in zip(scan.alpha_grid, scan.entropy_values):
    print(f"alpha={a:<5g} S={s:.5f} " + "#" * int(60 * s))

opt = optimize_coupling(0, 0, 1.0)
s5 = entropy_at(0, 0, 5.0, 1.0)
print(f"\nalpha* = {opt.alpha_star:.4f}, S* = {opt.entropy_star:.6f} bits")
print(f"S(5) / S* = {s5 / opt.entropy_star:.5f}")
print(f"dS/dalpha at 5: {ds_dalpha(0, 0, 1.0, 5.0).analytic:+.2e}")

# the optimum drifts with the observation time
for tau in (0.5, 1, 2, 4):
    o = optimize_coupling(0, 0, tau)
    print(f"tau={tau:<4g} alpha*={o.alpha_star:.3f} S*={o.entropy_star:.4f}")
