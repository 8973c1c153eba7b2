"""
Unit tests — chi2cavity command line.

Verifies:
- evolve/spectrum/feasibility/sweep/coupling outputs on small inputs
- Exit codes: 2 for usage and domain errors, 3 for resource limits
- Config file merging with flags taking precedence
- Byte-identical output for identical inputs, including --jobs
"""

import csv
import io
import json
import math

import pytest

from chi2cavity.cli import main

_EVOLVE = ["evolve", "--tau-a", "10ps", "--tau-b", "10ps", "--omega", "1e11"]
_SPECTRUM = ["spectrum", "--tau-a", "10ps", "--tau-b", "20ps", "--omega", "1e11"]


def _run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _table(text: str) -> list[dict[str, str]]:
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


# ---------------------------------------------------------------------------
# evolve
# ---------------------------------------------------------------------------


class TestEvolve:
    def test_csv_header(self, capsys):
        code, out, _ = _run(capsys, *_EVOLVE, "--t-final", "20ps", "--max-samples", "10")
        assert code == 0
        header = next(line for line in out.splitlines() if not line.startswith("#"))
        assert header == "t,rho11,rho22,rho33,rho44,imV,trace_total"
        assert '# command: "evolve"' in out

    def test_zero_coupling_decays_exponentially(self, capsys):
        code, out, _ = _run(
            capsys, *_EVOLVE[:-1], "0", "--t-final", "100ps", "--max-samples", "5"
        )
        assert code == 0
        last = _table(out)[-1]
        assert float(last["t"]) == pytest.approx(1e-10)
        assert float(last["rho11"]) == pytest.approx(math.exp(-10.0), rel=1e-6)
        assert float(last["rho22"]) == 0.0

    def test_seed_on_two_mode_is_usage_error(self, capsys):
        code, _, err = _run(capsys, *_EVOLVE, "--t-final", "1ps", "--seed-amplitude", "3")
        assert code == 2
        assert "--seed-amplitude" in err

    def test_missing_lifetime(self, capsys):
        code, _, err = _run(capsys, "evolve", "--tau-b", "1ps", "--omega", "1e11", "--t-final", "1ps")
        assert code == 2
        assert "--tau-a is required" in err

    def test_bad_unit(self, capsys):
        code, _, err = _run(capsys, *_EVOLVE, "--t-final", "20um")
        assert code == 2
        assert "time" in err

    def test_too_many_steps(self, capsys):
        code, _, err = _run(capsys, *_EVOLVE, "--t-final", "1s")
        assert code == 3
        assert "steps" in err

    def test_identical_inputs_identical_files(self, capsys, tmp_path):
        paths = [tmp_path / "first.csv", tmp_path / "second.csv"]
        for path in paths:
            assert main([*_EVOLVE, "--t-final", "30ps", "-o", str(path)]) == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_config_file_and_flag_precedence(self, capsys, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(
            json.dumps(
                {"command": "evolve", "tau-a": "10ps", "tau_b": "10ps", "omega": 1e11, "t_final": "5ps"}
            )
        )
        code, out, _ = _run(
            capsys, "evolve", "--config", str(config), "--tau-a", "20ps", "--format", "json"
        )
        assert code == 0
        params = json.loads(out)["metadata"]["params"]
        assert params["tau_a"] == pytest.approx(2e-11)
        assert params["t_final"] == pytest.approx(5e-12)

    def test_unknown_config_key(self, capsys, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"tau_a": "1ps", "bogus": 1}))
        code, _, err = _run(capsys, "evolve", "--config", str(config))
        assert code == 2
        assert "bogus" in err

    def test_full_lindblad_oracle_agrees(self, capsys):
        code, out, _ = _run(
            capsys,
            *_EVOLVE,
            "--t-final",
            "20ps",
            "--max-samples",
            "20",
            "--oracle",
            "full-lindblad",
            "--format",
            "json",
        )
        assert code == 0
        document = json.loads(out)
        assert document["columns"][-2:] == ["rho11_lindblad", "rho22_lindblad"]
        assert document["metadata"]["oracle_max_deviation"] < 1e-9

    def test_truncation_without_oracle(self, capsys):
        code, _, err = _run(capsys, *_EVOLVE, "--t-final", "1ps", "--truncation", "2,3")
        assert code == 2
        assert "--oracle" in err


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------


class TestSpectrum:
    def test_avoided_crossing(self, capsys):
        code, out, _ = _run(
            capsys,
            *_SPECTRUM,
            "--detuning-min=-2e12",
            "--detuning-max=2e12",
            "--points",
            "41",
            "--format",
            "json",
        )
        assert code == 0
        document = json.loads(out)
        index = document["columns"].index("splitting")
        splittings = [row[index] for row in document["rows"]]
        assert min(splittings) == pytest.approx(2 * math.sqrt(2) * 1e11, rel=1e-9)
        plus = document["columns"].index("gamma_plus")
        for row in document["rows"]:
            assert row[plus] + row[plus + 1] == pytest.approx(1e11, rel=1e-9)

    def test_zero_seed_leaves_modes_uncoupled(self, capsys):
        code, out, _ = _run(
            capsys,
            *_SPECTRUM,
            "--scheme",
            "three-mode",
            "--seed-amplitude",
            "0",
            "--detuning-min=0",
            "--detuning-max=0",
            "--points",
            "1",
            "--format",
            "json",
        )
        assert code == 0
        document = json.loads(out)
        assert document["metadata"]["params"]["seed_amplitude"] == 0.0
        (row,) = document["rows"]
        columns = document["columns"]
        assert row[columns.index("splitting")] == 0.0
        assert row[columns.index("gamma_plus")] is None

    def test_needs_detuning_range(self, capsys):
        code, _, err = _run(capsys, *_SPECTRUM)
        assert code == 2
        assert "--detuning-min is required" in err

    def test_lineshape(self, capsys):
        code, out, _ = _run(capsys, *_SPECTRUM, "--lineshape-at", "0", "--points", "11")
        assert code == 0
        rows = _table(out)
        assert list(rows[0]) == ["omega", "transmission"]
        assert len(rows) == 11

    def test_point_limit(self, capsys):
        code, _, _ = _run(capsys, *_SPECTRUM, "--lineshape-at", "0", "--points", "1e9")
        assert code == 3


# ---------------------------------------------------------------------------
# feasibility
# ---------------------------------------------------------------------------


class TestFeasibility:
    def test_json_reports_all_platforms(self, capsys):
        code, out, _ = _run(capsys, "feasibility", "--format", "json")
        assert code == 0
        document = json.loads(out)
        assert len(document["reports"]) == 3
        assert document["metadata"]["assumption_set"]["name"] == "published"

    def test_text_notes_microdisk(self, capsys):
        code, out, _ = _run(capsys, "feasibility", "--platform", "microdisk")
        assert code == 0
        assert "[microdisk]" in out
        assert "note: " in out

    def test_unknown_platform(self, capsys):
        code, _, _ = _run(capsys, "feasibility", "--platform", "nanobeam")
        assert code == 2


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


class TestSweep:
    def test_log_axis_crosses_threshold(self, capsys):
        code, out, _ = _run(capsys, "sweep", "--axis", "n=1e4:1e8:9:log")
        assert code == 0
        rows = _table(out)
        assert len(rows) == 9
        assert float(rows[0]["n"]) == pytest.approx(1e4)
        assert float(rows[-1]["n"]) == pytest.approx(1e8)
        assert rows[0]["time_passed"] == "false"
        assert rows[-1]["time_passed"] == "true"

    def test_jobs_do_not_change_rows(self, capsys):
        axes = ["--axis", "n=1e5:1e7:5:log", "--axis", "f_c=1,2"]
        _, single, _ = _run(capsys, "sweep", *axes, "--jobs", "1")
        _, pooled, _ = _run(capsys, "sweep", *axes, "--jobs", "4")

        def body(text):
            return [line for line in text.splitlines() if not line.startswith("#")]

        assert body(single) == body(pooled)
        assert len(body(single)) == 11

    def test_single_point_matches_feasibility_report(self, capsys):
        _, sweep_out, _ = _run(capsys, "sweep", "--platform", "pcdmc", "--format", "json")
        _, report_out, _ = _run(capsys, "feasibility", "--platform", "pcdmc", "--format", "json")
        sweep = json.loads(sweep_out)
        (report,) = json.loads(report_out)["reports"]
        (row,) = sweep["rows"]
        for key in ("tau_eff", "half_period_coeff", "n_min_time", "n_min_spectral"):
            assert row[sweep["columns"].index(key)] == pytest.approx(report[key], rel=1e-12)

    def test_bad_axis(self, capsys):
        code, _, _ = _run(capsys, "sweep", "--axis", "photons=1:2:3")
        assert code == 2

    def test_grid_limit(self, capsys):
        code, _, _ = _run(capsys, "sweep", "--axis", "n=1:10:1e8")
        assert code == 3


# ---------------------------------------------------------------------------
# coupling
# ---------------------------------------------------------------------------


class TestCoupling:
    def _value(self, out: str) -> float:
        (row,) = json.loads(out)["rows"]
        assert row[0] == "contraction"
        return row[1]

    def test_diagonal_polarizations(self, capsys):
        code, out, _ = _run(
            capsys, "coupling", "--polarizations", "1,1,1", "1,1,1", "1,1,1", "--format", "json"
        )
        assert code == 0
        assert self._value(out) == pytest.approx(200e-12 * 2 / math.sqrt(3), rel=1e-12)

    def test_growth_axis(self, capsys):
        code, out, _ = _run(
            capsys,
            "coupling",
            "--growth-axis",
            "1,1,1",
            "--polarizations",
            "0,0,1",
            "0,0,1",
            "0,0,1",
            "--format",
            "json",
        )
        assert code == 0
        assert self._value(out) == pytest.approx(200e-12 * 2 / math.sqrt(3), rel=1e-12)

    def test_needs_an_input(self, capsys):
        code, _, err = _run(capsys, "coupling")
        assert code == 2
        assert "--polarizations" in err


def test_version(capsys):
    assert main(["--version"]) == 0
    assert "chi2cavity" in capsys.readouterr().out


def test_command_required(capsys):
    assert main([]) == 2
