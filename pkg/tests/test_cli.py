"""CLI tests: scenario parsing, artifacts, exit codes, determinism."""

import math
import os

import numpy as np
import pytest

from airybohm.cli import (
    BUNDLED,
    EnsembleSpec,
    Scenario,
    bundled_scenario_path,
    list_scenarios,
    load_scenario,
    main,
    run_scenario,
)
from airybohm.errors import ScenarioError


def _write(tmp_path, body, name="case.scenario"):
    path = tmp_path / name
    path.write_text(body)
    return str(path)


FREE_BODY = """\
[scenario]
name = quickfree
window = 1.0

[potential]
kind = free

[ensemble]
kind = default
count = 5

[outputs]
artifacts = trajectories_csv, density_heatmap, velocity_field_csv, comparison_report
"""


# -- parsing -------------------------------------------------------------

def test_load_scenario_roundtrip(tmp_path):
    sc = load_scenario(_write(tmp_path, FREE_BODY))
    assert sc.name == "quickfree"
    assert sc.window == (0.0, 1.0)
    assert sc.ensemble.count == 5
    assert sc.outputs == ("trajectories_csv", "density_heatmap",
                          "velocity_field_csv", "comparison_report")


def test_missing_potential_section(tmp_path):
    body = "[scenario]\nname = x\nwindow = 1.0\n"
    with pytest.raises(ScenarioError, match=r"\[potential\]"):
        load_scenario(_write(tmp_path, body))


def test_unknown_key_reports_line(tmp_path):
    body = FREE_BODY.replace("kind = free", "kind = free\nwhatever = 3")
    path = _write(tmp_path, body)
    with pytest.raises(ScenarioError) as info:
        load_scenario(path)
    # the bogus key sits on line 7 of the file
    assert f"{path}:7:" in str(info.value)


def test_bad_number_reports_line(tmp_path):
    body = FREE_BODY.replace("window = 1.0", "window = soon")
    with pytest.raises(ScenarioError, match="must be a number"):
        load_scenario(_write(tmp_path, body))


def test_unknown_artifact_rejected(tmp_path):
    body = FREE_BODY.replace("comparison_report", "animation")
    with pytest.raises(ScenarioError, match="animation"):
        load_scenario(_write(tmp_path, body))


def test_all_bundled_scenarios_parse():
    for name in BUNDLED:
        sc = load_scenario(str(bundled_scenario_path(name)))
        assert sc.name == name


# -- run_scenario --------------------------------------------------------

def test_run_free_writes_parabola_fan(tmp_path):
    path = _write(tmp_path, FREE_BODY)
    out = tmp_path / "out"
    assert run_scenario(path, str(out)) == 0
    data = np.loadtxt(out / "quickfree" / "trajectories.csv",
                      delimiter=",", skiprows=1)
    header = (out / "quickfree" / "trajectories.csv").read_text().splitlines()[0]
    assert header == "t, x_1, x_2, x_3, x_4, x_5"
    t = data[:, 0]
    for col in range(1, 6):
        np.testing.assert_allclose(data[:, col],
                                   data[0, col] + t * t / 4.0, atol=1e-9)


def test_run_report_checks_pass(tmp_path):
    path = _write(tmp_path, FREE_BODY)
    out = tmp_path / "out"
    run_scenario(path, str(out))
    report = (out / "quickfree" / "report.txt").read_text()
    assert "check method_agreement" in report
    assert "check argument_invariance" in report
    assert "check probability_transport" in report
    assert report.rstrip().endswith("result: PASS")
    assert "FAIL" not in report


def test_run_density_column_matches_modulus(tmp_path):
    path = _write(tmp_path, FREE_BODY)
    out = tmp_path / "out"
    run_scenario(path, str(out))
    dens = np.loadtxt(out / "quickfree" / "density.csv",
                      delimiter=",", skiprows=1)
    assert dens.shape[1] == 3
    assert (dens[:, 2] >= 0.0).all()
    # t = 0 slice is Ai^2(x) up to the caustic-free scaling delta = 1
    from airybohm.specfun import airy_ai_arrays
    sl = dens[dens[:, 0] == 0.0]
    ai, _ = airy_ai_arrays(sl[:, 1])
    np.testing.assert_allclose(sl[:, 2], ai * ai, atol=1e-12)


def test_run_window_past_caustic_exits_3(tmp_path, capsys):
    body = """\
[scenario]
name = overfocused
window = 1.6

[potential]
kind = harmonic
omega0_sq = 1.0
"""
    code = run_scenario(_write(tmp_path, body), str(tmp_path / "out"))
    err = capsys.readouterr().err
    assert code == 3
    assert "1.57079632679" in err


def test_run_malformed_exits_2(tmp_path, capsys):
    body = "[scenario]\nname = broken\nwindow = 2.0\n"
    code = run_scenario(_write(tmp_path, body), str(tmp_path / "out"))
    assert code == 2
    assert "[potential]" in capsys.readouterr().err


def test_byte_identical_reruns(tmp_path):
    path = _write(tmp_path, FREE_BODY)
    for d in ("a", "b"):
        assert run_scenario(path, str(tmp_path / d)) == 0
    for artifact in ("trajectories.csv", "density.csv",
                     "velocity_field.csv", "report.txt"):
        first = (tmp_path / "a" / "quickfree" / artifact).read_bytes()
        second = (tmp_path / "b" / "quickfree" / artifact).read_bytes()
        assert first == second, artifact


def test_sampled_ensemble_seed_override(tmp_path):
    body = FREE_BODY.replace("kind = default", "kind = sampled\nseed = 3")
    path = _write(tmp_path, body)
    run_scenario(path, str(tmp_path / "a"))
    run_scenario(path, str(tmp_path / "b"), seed=3)
    run_scenario(path, str(tmp_path / "c"), seed=11)
    a = (tmp_path / "a" / "quickfree" / "trajectories.csv").read_bytes()
    b = (tmp_path / "b" / "quickfree" / "trajectories.csv").read_bytes()
    c = (tmp_path / "c" / "quickfree" / "trajectories.csv").read_bytes()
    assert a == b
    assert a != c


def test_plot_artifact(tmp_path):
    body = FREE_BODY.replace(
        "artifacts = trajectories_csv, density_heatmap, velocity_field_csv, "
        "comparison_report",
        "artifacts = trajectories_csv, density_heatmap, plot")
    path = _write(tmp_path, body)
    out = tmp_path / "out"
    assert run_scenario(path, str(out)) == 0
    svg = out / "quickfree" / "trajectories.svg"
    assert svg.exists() and svg.stat().st_size > 1000


def test_run_honors_tolerance_flag(tmp_path, capsys):
    # an absurdly tight agreement bound turns the report to FAIL -> exit 3
    path = _write(tmp_path, FREE_BODY)
    code = run_scenario(path, str(tmp_path / "out"), tolerance=1e-18)
    assert code == 3
    report = (tmp_path / "out" / "quickfree" / "report.txt").read_text()
    assert "result: FAIL" in report


# -- main() and subcommands ----------------------------------------------

def test_main_list(capsys):
    assert main(["list"]) == 0
    names = capsys.readouterr().out.split()
    assert names == list(BUNDLED)
    assert len(names) == 5


def test_main_validate_harmonic_reports_caustic(capsys):
    assert main(["validate", "harmonic_focus"]) == 0
    out = capsys.readouterr().out
    line = next(l for l in out.splitlines() if l.startswith("caustic_time"))
    assert float(line.split(":")[1]) == pytest.approx(math.pi / 2, rel=1e-10)


def test_main_validate_free_reports_no_caustic(capsys):
    assert main(["validate", "free"]) == 0
    assert "caustic_time: none" in capsys.readouterr().out


def test_main_validate_rejects_garbage(tmp_path, capsys):
    path = _write(tmp_path, "window = 1\n")
    assert main(["validate", path]) == 2


def test_main_run_env_var_output(tmp_path, monkeypatch):
    monkeypatch.setenv("AIRYBOHM_OUTDIR", str(tmp_path / "envout"))
    path = _write(tmp_path, FREE_BODY)
    assert main(["run", path]) == 0
    assert (tmp_path / "envout" / "quickfree" / "report.txt").exists()


def test_main_run_missing_file(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.scenario")]) == 2
    assert "no such scenario" in capsys.readouterr().err


def test_main_run_parallel_jobs(tmp_path):
    a = _write(tmp_path, FREE_BODY, "a.scenario")
    b = _write(tmp_path, FREE_BODY.replace("quickfree", "other"), "b.scenario")
    code = main(["run", a, b, "-o", str(tmp_path / "out"), "--jobs", "2"])
    assert code == 0
    assert (tmp_path / "out" / "quickfree" / "report.txt").exists()
    assert (tmp_path / "out" / "other" / "report.txt").exists()


def test_ensemble_positions_kinds():
    spec = EnsembleSpec(kind="linspace", count=4, lo=-2.0, hi=1.0)
    np.testing.assert_allclose(spec.positions(None),
                               np.linspace(-2.0, 1.0, 4))
    from airybohm.aux_odes import PhysicalParams
    default = EnsembleSpec().positions(PhysicalParams())
    assert default.size == 11
    assert default[0] == pytest.approx(-5.5)
