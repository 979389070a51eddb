import io
import json
import math

import numpy as np
import pytest

from ddqpc.dynamics import INTEGRATED, closed_form_trajectory, ModelParams
from ddqpc.errors import ParameterError, SweepError
from ddqpc.sweep import (CSV_HEADER, FIGURE_PRESETS, SweepGrid, count_coherence_zeros,
                         figure_preset, format_number, read_csv, run_sweep, summarize,
                         write_csv, write_json_summary)


def csv_text(result):
    buf = io.StringIO()
    write_csv(result, buf)
    return buf.getvalue()


def test_minimal_grid():
    result = run_sweep(SweepGrid(alphas=[1.0], tau_max=1.0, n_samples=2))
    rows = result.rows
    assert len(rows) == 2 == len(result)
    assert rows[0].sample.entropy == 0.0 and rows[0].tau == 0.0
    assert rows[1].tau == 1.0


@pytest.mark.parametrize("kwargs", [
    dict(alphas=[]), dict(alphas=[1], thetas_deg=[]), dict(alphas=[-1]),
    dict(alphas=[math.nan]), dict(alphas=[1], n_samples=1), dict(alphas=[1], tau_max=0),
    dict(alphas=[1], method="euler"), dict(alphas=[1], epsilon_norm=0.5),
    dict(alphas=[1], log_base=10), dict(alphas=[1], primary_outputs=["bogus"]),
])
def test_grid_validation(kwargs):
    with pytest.raises(ParameterError):
        SweepGrid(**kwargs)


def test_grid_dict_round_trip():
    grid = figure_preset("fig3")
    again = SweepGrid.from_dict(json.loads(json.dumps(grid.to_dict())))
    assert again == grid


def test_presets():
    assert set(FIGURE_PRESETS) == {"fig2", "fig3", "fig4", "fig5", "fig6"}
    assert figure_preset("fig2").alphas == (0.1, 1.0, 10.0, 100.0, 1000.0)
    assert figure_preset("fig3").alphas == (0.01, 1.0)
    assert figure_preset("fig4").thetas_deg == (90.0,)
    assert figure_preset("fig6").thetas_deg == (30.0,)
    assert "coherence" in figure_preset("fig5").primary_outputs
    for name in FIGURE_PRESETS:
        g = figure_preset(name)
        assert (g.tau_max, g.n_samples, g.phis_deg) == (10.0, 1000, (0.0,))
    with pytest.raises(ParameterError):
        figure_preset("fig9")


def test_csv_deterministic_across_runs_and_workers():
    grid = SweepGrid(alphas=[0.1, 5, 100], thetas_deg=[0, 30, 90], phis_deg=[0, 45],
                     n_samples=200)
    reference = csv_text(run_sweep(grid))
    assert csv_text(run_sweep(grid)) == reference
    assert csv_text(run_sweep(grid, workers=4)) == reference


def test_csv_layout(tmp_path):
    grid = SweepGrid(alphas=[1, 10], thetas_deg=[0, 90], n_samples=50)
    result = run_sweep(grid)
    path = tmp_path / "s.csv"
    n = write_csv(result, path)
    raw = path.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    lines = raw.decode().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert n == len(lines) - 1 == 4 * 50
    # superposition start: divergent rate as a literal token
    theta90_first = [ln for ln in lines[1:] if ln.split(",")[1] == format_number(90.0)][0]
    assert theta90_first.split(",")[CSV_HEADER.index("rate")] == "inf"
    rows = read_csv(path)
    for block in range(4):
        tau = [r["tau"] for r in rows[block * 50:(block + 1) * 50]]
        assert np.all(np.diff(tau) > 0) and tau[0] == 0.0


def test_csv_round_trip_reformats_identically(tmp_path):
    result = run_sweep(SweepGrid(alphas=[0.5, 50], thetas_deg=[30], n_samples=100))
    path = tmp_path / "s.csv"
    write_csv(result, path)
    rows = read_csv(path)
    rebuilt = [",".join(format_number(r[k]) for k in CSV_HEADER) for r in rows]
    assert path.read_text().splitlines()[1:] == rebuilt


def test_integrated_method_matches_closed_form():
    common = dict(alphas=[2.0], thetas_deg=[60], tau_max=2.0, n_samples=21)
    a = run_sweep(SweepGrid(**common)).curves[0]
    b = run_sweep(SweepGrid(method=INTEGRATED, step=1e-3, **common)).curves[0]
    assert np.allclose(a.measures.entropy, b.measures.entropy, atol=1e-10)
    assert np.array_equal(a.trajectory.tau_grid, b.trajectory.tau_grid)


def test_integrated_sweep_with_detuning():
    grid = SweepGrid(alphas=[1.0], epsilon_norm=2.0, method=INTEGRATED, tau_max=1.0,
                     n_samples=11, step=1e-3)
    curve = run_sweep(grid).curves[0]
    assert np.all(np.diff(curve.measures.entropy) >= -1e-12)


def test_json_summary(tmp_path):
    result = run_sweep(SweepGrid(alphas=[0.01, 5.0], n_samples=1000))
    path = tmp_path / "s.json"
    written = write_json_summary(result, path)
    data = json.loads(path.read_text())
    assert data == written
    by_alpha = {c["alpha"]: c for c in data["curves"]}
    assert by_alpha[5.0]["final_entropy"] >= 0.99
    assert by_alpha[0.01]["coherence_zero_count"] >= 6
    assert SweepGrid.from_dict(data["grid"]) == result.grid


def test_json_summary_null_max_rate_only_when_no_finite_rate():
    result = run_sweep(SweepGrid(alphas=[1.0], thetas_deg=[90], n_samples=10))
    assert summarize(result)["curves"][0]["max_rate"] is not None


def test_count_coherence_zeros_matches_analytic():
    tau = np.linspace(0, 10, 1000)
    traj = closed_form_trajectory(ModelParams(0.01), tau)
    expected = sum(1 for k in range(1, 10) if 4 * k * math.pi / math.sqrt(64 - 1e-4) < 10)
    assert count_coherence_zeros(tau, traj.sigma12_re, traj.sigma12_im) == expected == 6
    assert count_coherence_zeros(tau, np.exp(-tau), 0 * tau) == 0


def test_sweep_error_lists_every_failure(monkeypatch):
    from ddqpc import sweep

    real = sweep._run_cell

    def flaky(grid, cell):
        if cell[0] in (2.0, 4.0):
            raise FloatingPointError(f"boom {cell[0]}")
        return real(grid, cell)

    monkeypatch.setattr(sweep, "_run_cell", flaky)
    grid = SweepGrid(alphas=[1, 2, 3, 4], n_samples=5)
    for workers in (1, 3):
        with pytest.raises(SweepError) as info:
            run_sweep(grid, workers=workers)
        assert [cell[0] for cell, _ in info.value.failures] == [2.0, 4.0]
        assert "boom 2.0" in str(info.value) and "boom 4.0" in str(info.value)


def test_write_csv_unwritable(tmp_path):
    result = run_sweep(SweepGrid(alphas=[1.0], n_samples=2))
    with pytest.raises(OSError):
        write_csv(result, tmp_path / "missing" / "s.csv")
