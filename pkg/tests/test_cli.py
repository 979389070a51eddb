import io
import json
import math

import pytest

from ddqpc.cli import EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from ddqpc.errors import NonPhysicalStateError
from ddqpc.sweep import CSV_HEADER, read_csv


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def field(text, key):
    for line in text.splitlines():
        if line.startswith(key + ":"):
            return line.split(":", 1)[1].split()[0]
    raise AssertionError(f"{key} not in output:\n{text}")


# --- simulate -------------------------------------------------------------------

def test_simulate_localized_alpha5(tmp_path):
    dest = tmp_path / "t.csv"
    code, text = run("simulate", "--alpha", "5", "--theta", "0", "--tau-max", "1", "-o", str(dest))
    assert code == EXIT_OK
    assert float(field(text, "final entropy")) == pytest.approx(0.8593430953, abs=1e-9)
    rows = read_csv(dest)
    assert len(rows) == 1000 and list(rows[0]) == list(CSV_HEADER)


def test_simulate_rabi_period(tmp_path):
    code, text = run("simulate", "--alpha", "0", "--theta", "0", "--tau-max", "3.14159",
                     "-o", str(tmp_path / "t.csv"))
    assert code == EXIT_OK
    assert float(field(text, "final sigma11")) == pytest.approx(1.0, abs=1e-10)


def test_simulate_physical_units_match_alpha5(tmp_path):
    _, a = run("simulate", "--alpha", "5", "--tau-max", "1", "-o", str(tmp_path / "a.csv"))
    code, b = run("simulate", "--t1", "0.5", "--vd", "62.8318", "--omega0", "1", "--theta", "0",
                  "--tau-max", "1", "-o", str(tmp_path / "b.csv"))
    assert code == EXIT_OK
    assert float(field(b, "alpha")) == pytest.approx(5.0, rel=1e-5)
    assert float(field(b, "final entropy")) == pytest.approx(float(field(a, "final entropy")),
                                                             abs=1e-5)


def test_simulate_integrated_with_detuning(tmp_path):
    code, text = run("simulate", "--alpha", "1", "--epsilon", "2", "--tau-max", "0.5",
                     "--samples", "11", "--step", "1e-3", "-o", str(tmp_path / "t.csv"))
    assert code == EXIT_OK
    assert 0 < float(field(text, "final entropy")) < 1


def test_simulate_byte_identical(tmp_path):
    args = ("simulate", "--alpha", "2", "--theta", "45", "--phi", "30", "--tau-max", "3")
    run(*args, "-o", str(tmp_path / "a.csv"))
    run(*args, "-o", str(tmp_path / "b.csv"))
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


@pytest.mark.parametrize("argv", [
    ("simulate",),
    ("simulate", "--alpha", "5", "--t1", "0.5", "--vd", "1"),
    ("simulate", "--t1", "0.5"),
    ("simulate", "--alpha", "-1"),
    ("simulate", "--alpha", "1", "--epsilon", "1", "--method", "closed-form"),
    ("simulate", "--alpha", "1", "--log-base", "10"),
    ("simulate", "--alpha", "1", "--samples", "1"),
])
def test_simulate_usage_errors(argv, tmp_path):
    assert run(*argv, "-o", str(tmp_path / "t.csv"))[0] == EXIT_USAGE


def test_simulate_unwritable_output(tmp_path):
    code, _ = run("simulate", "--alpha", "1", "-o", str(tmp_path / "no" / "such" / "t.csv"))
    assert code == EXIT_NUMERIC


def test_numeric_failure_exit_code(monkeypatch, tmp_path):
    from ddqpc import sweep

    def broken(traj, log_base=2):
        raise NonPhysicalStateError("radicand out of range", [0])

    monkeypatch.setattr(sweep.measures, "trajectory_measures", broken)
    assert run("simulate", "--alpha", "1", "-o", str(tmp_path / "t.csv"))[0] == EXIT_NUMERIC
    assert run("sweep", "--alphas", "1", "-o", str(tmp_path / "s.csv"))[0] == EXIT_NUMERIC
    assert run("figures", "fig2", "--out-dir", str(tmp_path))[0] == EXIT_NUMERIC


# --- sweep ----------------------------------------------------------------------

def test_sweep_with_summary(tmp_path):
    code, _ = run("sweep", "--alphas", "0.01", "5", "--thetas", "0", "90", "--samples", "500",
                  "--workers", "2", "-o", str(tmp_path / "s.csv"),
                  "--summary", str(tmp_path / "s.json"))
    assert code == EXIT_OK
    assert len(read_csv(tmp_path / "s.csv")) == 4 * 500
    summary = json.loads((tmp_path / "s.json").read_text())
    assert len(summary["curves"]) == 4


def test_sweep_worker_count_irrelevant(tmp_path):
    base = ("sweep", "--alphas", "0.1", "10", "--thetas", "30", "--samples", "300")
    run(*base, "--workers", "1", "-o", str(tmp_path / "a.csv"))
    run(*base, "--workers", "3", "-o", str(tmp_path / "b.csv"))
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


@pytest.mark.parametrize("argv", [("sweep",), ("sweep", "--alphas", "-2"),
                                  ("sweep", "--alphas", "1", "--tau-max", "0")])
def test_sweep_usage_errors(argv, tmp_path):
    assert run(*argv, "-o", str(tmp_path / "s.csv"))[0] == EXIT_USAGE


# --- optimize -------------------------------------------------------------------

def test_optimize_localized():
    code, text = run("optimize", "--theta", "0", "--tau", "1")
    assert code == EXIT_OK
    assert 3 <= float(field(text, "alpha_star")) <= 8
    assert float(field(text, "ratio S(5)/S(alpha_star)")) >= 0.95
    assert "interior optimum" in text


def test_optimize_superposition_boundary():
    code, text = run("optimize", "--theta", "90", "--tau", "0.01", "--alpha-max", "1000")
    assert code == EXIT_OK
    assert "boundary" in text
    assert float(field(text, "alpha_star")) == pytest.approx(1000)


@pytest.mark.parametrize("tau", ["0", "-1"])
def test_optimize_nonpositive_tau(tau):
    assert run("optimize", "--theta", "0", "--tau", tau)[0] == EXIT_USAGE


def test_optimize_bad_bracket():
    assert run("optimize", "--tau", "1", "--alpha-min", "5", "--alpha-max", "1")[0] == EXIT_USAGE


def test_optimize_numeric_failure(monkeypatch):
    from ddqpc import analysis

    def broken(*args, **kwargs):
        raise NonPhysicalStateError("bad", [0])

    monkeypatch.setattr(analysis, "optimize_coupling", broken)
    assert run("optimize", "--tau", "1")[0] == EXIT_NUMERIC


# --- cycling --------------------------------------------------------------------

def test_cycling_weak_damping():
    code, text = run("cycling", "--alpha", "0.01")
    assert code == EXIT_OK
    report = json.loads(text)
    assert report["branch"] == "oscillatory"
    assert report["zero_times"][0] == pytest.approx(math.pi / 2, rel=1e-3)


@pytest.mark.parametrize("alpha, branch", [("9", "overdamped"), ("8", "critical")])
def test_cycling_no_zeros(alpha, branch):
    code, text = run("cycling", "--alpha", alpha)
    assert code == EXIT_OK
    report = json.loads(text)
    assert report["zero_times"] == [] and report["branch"] == branch


def test_cycling_byte_identical():
    assert run("cycling", "--alpha", "3")[1] == run("cycling", "--alpha", "3")[1]


@pytest.mark.parametrize("argv", [("cycling",), ("cycling", "--alpha", "1", "--resolution", "1"),
                                  ("cycling", "--alpha", "-1")])
def test_cycling_usage_errors(argv):
    assert run(*argv)[0] == EXIT_USAGE


def test_cycling_numeric_failure(monkeypatch):
    from ddqpc import analysis

    def broken(*args, **kwargs):
        raise NonPhysicalStateError("bad", [0])

    monkeypatch.setattr(analysis, "detect_cycling", broken)
    assert run("cycling", "--alpha", "1")[0] == EXIT_NUMERIC


# --- monotonicity ---------------------------------------------------------------

def test_monotonicity_command():
    code, text = run("monotonicity", "--n-random", "20", "--seed", "5", "--samples", "500")
    assert code == EXIT_OK
    report = json.loads(text)
    assert report["violations"] == [] and report["seed"] == 5
    assert text == run("monotonicity", "--n-random", "20", "--seed", "5", "--samples", "500")[1]


def test_monotonicity_usage_error():
    assert run("monotonicity", "--samples", "1")[0] == EXIT_USAGE


def test_monotonicity_numeric_failure(monkeypatch):
    from ddqpc import analysis

    def broken(*args, **kwargs):
        raise NonPhysicalStateError("bad", [0])

    monkeypatch.setattr(analysis, "monotonicity_scan", broken)
    assert run("monotonicity")[0] == EXIT_NUMERIC


# --- figures --------------------------------------------------------------------

def test_figures_fig2_and_fig5(tmp_path):
    code, _ = run("figures", "fig2", "fig5", "--out-dir", str(tmp_path))
    assert code == EXIT_OK
    fig2 = read_csv(tmp_path / "fig2.csv")
    assert sorted({r["alpha"] for r in fig2}) == [0.1, 1.0, 10.0, 100.0, 1000.0]
    assert len(fig2) == 5 * 1000
    fig5 = read_csv(tmp_path / "fig5.csv")
    assert {r["theta_deg"] for r in fig5} == {90.0}
    assert max(r["coherence"] for r in fig5) > 0.5
    summary = json.loads((tmp_path / "fig5.json").read_text())
    assert summary["grid"]["primary_outputs"] == ["entropy", "coherence"]


def test_figures_byte_identical(tmp_path):
    run("figures", "fig6", "--out-dir", str(tmp_path / "a"))
    run("figures", "fig6", "--out-dir", str(tmp_path / "b"), "--workers", "4")
    for name in ("fig6.csv", "fig6.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_figures_unknown_name(tmp_path):
    assert run("figures", "fig9", "--out-dir", str(tmp_path))[0] == EXIT_USAGE


def test_no_command_and_help():
    assert run()[0] == EXIT_USAGE
    assert run("--help")[0] == EXIT_OK
