import hashlib
import json
from pathlib import Path

import numpy as np
import pytest

from cavity_sr.cli import cli_dispatch
from cavity_sr.fileio import (read_report, read_timeseries, write_timeseries)
from cavity_sr.series import ObservableSeries


def run_cli(*argv):
    return cli_dispatch(list(argv))


def small_series():
    t = np.array([0.0, 0.1, 0.2])
    return ObservableSeries(times=t, sz_mean=np.array([5.0, 2.0, -4.9]),
                            sz_sem=np.array([0.0, 0.1, 0.2]),
                            photon_mean=np.array([0.0, 1.5, 0.2]),
                            photon_sem=np.zeros(3), n_atoms=10)


class TestTimeseriesFile:
    def test_three_point_series_gives_four_lines(self, tmp_path):
        path = write_timeseries(small_series(), tmp_path / "ts.csv")
        lines = path.read_text().strip().splitlines()
        assert len(lines) == 4
        assert lines[0] == "t,sz_mean,sz_sem,sz_norm,photon_mean,photon_sem"

    def test_round_trip_is_exact(self, tmp_path):
        series = small_series()
        path = write_timeseries(series, tmp_path / "ts.csv")
        back = read_timeseries(path, n_atoms=10)
        np.testing.assert_array_equal(back.times, series.times)
        np.testing.assert_array_equal(back.sz_mean, series.sz_mean)
        np.testing.assert_array_equal(back.photon_mean, series.photon_mean)

    def test_norm_column_is_normalized(self, tmp_path):
        path = write_timeseries(small_series(), tmp_path / "ts.csv")
        first = path.read_text().splitlines()[1].split(",")
        assert float(first[3]) == pytest.approx(1.0)   # 2*5/10


class TestSimulate:
    def test_meanfield_run_writes_files_and_manifest(self, tmp_path):
        out = tmp_path / "run1"
        code = run_cli("simulate", "--scheme", "collective", "--solver",
                       "meanfield", "--n-atoms", "40", "--g", "10", "--kappa",
                       "1", "--t-max", "0.5", "--seed", "7", "--out", str(out))
        assert code == 0
        csv = out / "timeseries.csv"
        manifest = json.loads((out / "manifest.json").read_text())
        digest = hashlib.sha256(csv.read_bytes()).hexdigest()
        assert manifest["outputs"]["timeseries.csv"] == digest
        assert manifest["config"]["n_atoms"] == 40
        assert manifest["config"]["dt"] is not None
        series = read_timeseries(csv, 40)
        assert series.sz_norm[0] == pytest.approx(1.0)

    def test_same_seed_reproduces_bytes(self, tmp_path):
        args = ["simulate", "--scheme", "individual", "--solver", "dtwa",
                "--n-atoms", "10", "--g", "2", "--kappa", "20",
                "--trajectories", "300", "--t-max", "0.2", "--seed", "3"]
        assert run_cli(*args, "--out", str(tmp_path / "a")) == 0
        assert run_cli(*args, "--out", str(tmp_path / "b")) == 0
        assert (tmp_path / "a/timeseries.csv").read_bytes() == \
            (tmp_path / "b/timeseries.csv").read_bytes()

    def test_oracle_solver_runs(self, tmp_path):
        code = run_cli("simulate", "--scheme", "collective", "--solver",
                       "oracle", "--n-atoms", "2", "--t-max", "1.0",
                       "--dt", "0.01", "--out", str(tmp_path / "o"))
        assert code == 0
        series = read_timeseries(tmp_path / "o/timeseries.csv", 2)
        exact = 2 * np.exp(-4 * series.times) + 4 * series.times * np.exp(-4 * series.times) - 1
        np.testing.assert_allclose(series.sz_mean, exact, atol=1e-6)


class TestValidationAndExitCodes:
    def test_invalid_scheme_solver_combination(self, tmp_path, capsys):
        code = run_cli("simulate", "--scheme", "individual", "--solver", "twa",
                       "--n-atoms", "5", "--out", str(tmp_path))
        assert code == 1
        assert "collective" in capsys.readouterr().err

    def test_unknown_flag_fails(self, tmp_path):
        code = run_cli("simulate", "--scheme", "collective", "--solver",
                       "meanfield", "--n-atoms", "5", "--frobnicate", "1",
                       "--out", str(tmp_path))
        assert code == 1

    def test_bad_parameters_fail_validation(self, tmp_path, capsys):
        code = run_cli("simulate", "--scheme", "collective", "--solver",
                       "meanfield", "--n-atoms", "0", "--out", str(tmp_path))
        assert code == 1
        assert "zero atoms" in capsys.readouterr().err


class TestFit:
    def test_trivial_quadratic_csv(self, tmp_path, capsys):
        points = tmp_path / "points.csv"
        points.write_text("n,intensity\n10,100\n100,10000\n1000,1000000\n")
        assert run_cli("fit", "--input", str(points)) == 0
        result = json.loads(capsys.readouterr().out)
        assert result["zeta"] == pytest.approx(2.0)

    def test_fit_round_trips_report_json(self, tmp_path, capsys):
        out = tmp_path / "sweep"
        code = run_cli("sweep", "--scheme", "collective", "--solver",
                       "meanfield", "--n-list", "20,40,80", "--trajectories",
                       "1", "--out", str(out))
        assert code == 0
        report = read_report(out / "report.json")
        capsys.readouterr()
        assert run_cli("fit", "--input", str(out / "report.json")) == 0
        refit = json.loads(capsys.readouterr().out)
        assert refit["zeta"] == pytest.approx(report.zeta, abs=1e-12)


class TestSweepAndCheck:
    def test_meanfield_sweep_reports_quadratic_scaling(self, tmp_path, capsys):
        out = tmp_path / "s"
        code = run_cli("sweep", "--scheme", "collective", "--solver",
                       "meanfield", "--n-list", "25,50,100", "--out", str(out))
        assert code == 0
        report = read_report(out / "report.json")
        # mean-field cascade gives I = Gamma (N+1)^2 / 2 exactly
        from cavity_sr import power_law_fit
        exact = power_law_fit([(n, (n + 1) ** 2 / 2) for n in (25, 50, 100)])
        assert report.zeta == pytest.approx(exact.zeta, abs=0.01)
        manifest = json.loads((out / "manifest.json").read_text())
        assert "report.json" in manifest["outputs"]

    def test_check_passes_for_equivalent_reports(self, tmp_path, capsys):
        a, b = tmp_path / "a", tmp_path / "b"
        base = ["sweep", "--scheme", "collective", "--solver", "meanfield",
                "--n-list", "25,50,100"]
        assert run_cli(*base, "--out", str(a)) == 0
        assert run_cli(*base, "--trajectories", "4000", "--out", str(b)) == 0
        capsys.readouterr()
        code = run_cli("check", str(a / "report.json"), str(b / "report.json"))
        verdict = json.loads(capsys.readouterr().out)
        assert code == 0
        assert verdict["passed"] is True
        assert verdict["variation"] == "trajectories-doubled"

    def test_check_rejects_incomparable_reports(self, tmp_path, capsys):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run_cli("sweep", "--scheme", "collective", "--solver", "meanfield",
                       "--n-list", "25,50,100", "--out", str(a)) == 0
        assert run_cli("sweep", "--scheme", "collective", "--solver", "meanfield",
                       "--n-list", "25,50,100", "--g", "5", "--out", str(b)) == 0
        code = run_cli("check", str(a / "report.json"), str(b / "report.json"))
        assert code == 1
