"""
Regenerating the figure data
============================

Each preset writes a CSV plus a JSON summary.  Run from the repository root;
output lands in ./figures.  Same as ``ddqpc figures fig2 ... fig6``.
"""

from pathlib import Path

from ddqpc import FIGURE_PRESETS, figure_preset, run_sweep, write_csv, write_json_summary

out = Path("figures")
out.mkdir(exist_ok=True)
for name in sorted(FIGURE_PRESETS):
    result = run_sweep(figure_preset(name), workers=4)
    n = write_csv(result, out / f"{name}.csv")
    summary = write_json_summary(result, out / f"{name}.json")
    finals = ", ".join(f"{c['alpha']:g}:{c['final_entropy']:.3f}" for c in summary["curves"])
    print(f"{name}: {n} rows; final S by alpha {finals}")
