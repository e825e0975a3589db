"""End-to-end tests of the command line reports.

Every invocation goes through cli.main(argv) in process; stdout is parsed
back as JSON, so these double as schema checks.
"""

import json

import pytest

from isopar import cli


def run(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out


def run_json(capsys, argv):
    code, out = run(capsys, argv)
    return code, json.loads(out)


BASE_KEYS = {
    "schema", "command", "params", "seed", "generator",
    "samples", "max_residual", "pass", "details",
}


def assert_report_shape(doc, command):
    assert BASE_KEYS <= set(doc)
    assert doc["schema"] == "isopar-report/1"
    assert doc["command"] == command
    assert doc["generator"] == "PCG64"
    for row in doc["details"]:
        assert set(row) == {"name", "residual", "tolerance", "ref"}


class TestVerifyCm:
    def test_cartan_passes(self, capsys):
        code, doc = run_json(
            capsys, ["verify-cm", "--family", "cartan", "--m", "1",
                     "--samples", "40"]
        )
        assert code == 0
        assert_report_shape(doc, "verify-cm")
        assert doc["pass"] is True
        names = [row["name"] for row in doc["details"]]
        assert "ambient-gradient-norm" in names
        assert "sphere-laplacian-profile" in names
        assert doc["max_residual"] < 1e-8

    def test_fkm_passes(self, capsys):
        code, doc = run_json(
            capsys, ["verify-cm", "--family", "fkm", "--m", "2", "--r", "4",
                     "--samples", "40"]
        )
        assert code == 0
        assert doc["pass"] is True

    def test_impossible_tolerance_fails_cleanly(self, capsys):
        code, doc = run_json(
            capsys, ["verify-cm", "--family", "cartan", "--m", "1",
                     "--samples", "10", "--tol", "1e-30"]
        )
        assert code == 1
        assert doc["pass"] is False
        assert any(row["residual"] > row["tolerance"] for row in doc["details"])

    def test_bad_fkm_pair_is_usage_error(self, capsys):
        code, doc = run_json(
            capsys, ["verify-cm", "--family", "fkm", "--m", "2", "--r", "3"]
        )
        assert code == 2
        assert doc["pass"] is False
        assert doc["error"]["type"] == "ConstructionError"

    def test_missing_m_is_usage_error(self, capsys):
        code, doc = run_json(capsys, ["verify-cm", "--family", "cartan"])
        assert code == 2
        assert "needs --m" in doc["error"]["message"]

    def test_unknown_family_rejected_by_parser(self, capsys):
        with pytest.raises(SystemExit):
            cli.main(["verify-cm", "--family", "veronese"])
        capsys.readouterr()


class TestVerifyHidden:
    def test_cartan_defaults_cover_all_five(self, capsys):
        code, doc = run_json(
            capsys, ["verify-hidden", "--family", "cartan", "--m", "1",
                     "--samples", "30"]
        )
        assert code == 0
        names = [row["name"] for row in doc["details"]]
        for k in range(1, 6):
            assert f"hessian-minor-identity-{k}" in names

    def test_explicit_k_list(self, capsys):
        code, doc = run_json(
            capsys, ["verify-hidden", "--family", "fkm", "--m", "2",
                     "--r", "4", "--samples", "20", "--k", "2,3"]
        )
        assert code == 0
        names = [row["name"] for row in doc["details"]]
        assert "power-sum-closed-form-2" in names
        assert "power-sum-closed-form-3" in names

    def test_unrecorded_k_is_usage_error(self, capsys):
        code, doc = run_json(
            capsys, ["verify-hidden", "--family", "cartan", "--m", "1",
                     "--k", "9"]
        )
        assert code == 2
        assert "no recorded closed form" in doc["error"]["message"]

    def test_small_ambient_rows_are_informational(self, capsys):
        # cartan m = 1 lives in dimension 5 (n = 3), so the k = 4 power sum
        # row must not gate the verdict
        code, doc = run_json(
            capsys, ["verify-hidden", "--family", "cartan", "--m", "1",
                     "--samples", "20", "--k", "4"]
        )
        assert code == 0
        row = next(
            r for r in doc["details"] if r["name"] == "power-sum-closed-form-4"
        )
        assert row["tolerance"] is None


class TestAlphaScan:
    def test_fkm_witnesses_present(self, capsys):
        code, doc = run_json(
            capsys, ["alpha-scan", "--family", "fkm", "--m", "2", "--r", "4",
                     "--samples", "30", "--J", "block"]
        )
        assert code == 0
        names = [row["name"] for row in doc["details"]]
        assert "reference-point-plus" in names
        assert "reference-point-minus" in names
        assert "alpha" in doc
        assert doc["alpha"][0]["max"] - doc["alpha"][0]["min"] > 3.0

    def test_low_multiplicity_constant_ratio(self, capsys):
        code, doc = run_json(
            capsys, ["alpha-scan", "--family", "fkm", "--m", "1", "--r", "3",
                     "--samples", "30", "--level", "0.0", "--level", "0.4"]
        )
        assert code == 0
        assert len(doc["alpha"]) == 2
        for stats in doc["alpha"]:
            assert stats["std"] < 1e-7
        names = [row["name"] for row in doc["details"]]
        assert "reference-point-plus" not in names  # quaternion points only

    def test_odd_dimension_has_no_circle_action(self, capsys):
        # cartan m = 1 lives in dimension 5; no compatible J exists
        code, doc = run_json(
            capsys, ["alpha-scan", "--family", "cartan", "--m", "1"]
        )
        assert code == 2

    def test_csv_side_file(self, capsys, tmp_path):
        prefix = str(tmp_path / "scan")
        code, doc = run_json(
            capsys, ["alpha-scan", "--family", "ot", "--r", "1",
                     "--samples", "10", "--J", "right-i", "--csv", prefix]
        )
        assert code == 0
        lines = (tmp_path / "scan-alpha.csv").read_text().splitlines()
        assert lines[0] == "index,level,alpha,omega,l"
        assert len(lines) == 11

    def test_mismatched_action_is_usage_error(self, capsys):
        code, doc = run_json(
            capsys, ["alpha-scan", "--family", "fkm", "--m", "2", "--r", "4",
                     "--J", "right-i", "--samples", "10"]
        )
        assert code == 2
        assert doc["error"]["type"] == "InvarianceError"


class TestRiccati:
    def test_space_form_report(self, capsys):
        code, doc = run_json(
            capsys, ["riccati", "--kappa", "1", "--mu0", "0.9,-0.3,0.25"]
        )
        assert code == 0
        assert_report_shape(doc, "riccati")
        names = [row["name"] for row in doc["details"]]
        for expected in (
            "closed-vs-numeric", "power-sum-recurrence",
            "mixed-trace-recurrence", "moment-chain",
        ):
            assert expected in names
        assert doc["moment_scale"] >= 1.0

    def test_rank_one_report(self, capsys):
        code, doc = run_json(
            capsys, ["riccati", "--kappa", "1,4", "--mult", "3",
                     "--mu0", "0.9,-0.3,0.25,1.1,-0.7,0.5,0.05"]
        )
        assert code == 0
        assert doc["pass"] is True

    def test_tied_spectrum_skips_round_trip(self, capsys):
        code, doc = run_json(
            capsys, ["riccati", "--kappa", "1,4", "--mult", "3",
                     "--mu0", "0.5,0.5,0.5,0.5,-0.2,-0.2,-0.2"]
        )
        assert code == 0
        assert any("round-trip skipped" in note for note in doc.get("notes", []))
        names = [row["name"] for row in doc["details"]]
        assert "moment-round-trip" not in names

    def test_pole_inside_window_is_clipped(self, capsys):
        # flat branch blows up at t = 0.5; the checks must stay inside
        code, doc = run_json(
            capsys, ["riccati", "--kappa", "0", "--mu0", "2.0",
                     "--t0", "-0.5", "--t1", "0.5"]
        )
        assert code == 0
        assert doc["pass"] is True

    def test_too_few_curvatures_for_mult_is_usage_error(self, capsys):
        # n is read off the mu0 list; two entries cannot host a
        # multiplicity-3 block
        code, doc = run_json(
            capsys, ["riccati", "--kappa", "1,4", "--mult", "3",
                     "--mu0", "0.1,0.2"]
        )
        assert code == 2

    def test_two_kappas_need_mult(self, capsys):
        code, doc = run_json(
            capsys, ["riccati", "--kappa", "1,4", "--mu0", "0.1,0.2,0.3"]
        )
        assert code == 2

    def test_trajectory_csv(self, capsys, tmp_path):
        prefix = str(tmp_path / "run")
        code, _ = run_json(
            capsys, ["riccati", "--kappa", "1", "--mu0", "0.4,-0.2",
                     "--csv", prefix]
        )
        assert code == 0
        lines = (tmp_path / "run-trajectory.csv").read_text().splitlines()
        assert lines[0].startswith("t,mu1,mu2,Q1")


class TestSpectrum:
    def test_cartan_level_report(self, capsys):
        code, doc = run_json(
            capsys, ["spectrum", "--family", "cartan", "--m", "1",
                     "--samples", "20", "--level", "0.2"]
        )
        assert code == 0
        names = [row["name"] for row in doc["details"]]
        assert "spectrum-match" in names
        assert "orientation-flips" in names
        assert "expected_values" in doc

    def test_recurrence_csv(self, capsys, tmp_path):
        prefix = str(tmp_path / "lvl")
        code, _ = run_json(
            capsys, ["spectrum", "--family", "fkm", "--m", "2", "--r", "4",
                     "--samples", "10", "--csv", prefix]
        )
        assert code == 0
        header = (tmp_path / "lvl-recurrence.csv").read_text().splitlines()[0]
        assert header.startswith("t,Q1")

    def test_focal_level_is_usage_error(self, capsys):
        code, doc = run_json(
            capsys, ["spectrum", "--family", "cartan", "--m", "1",
                     "--level", "0.9999"]
        )
        assert code == 2


class TestReportContract:
    def test_identical_runs_are_byte_identical(self, capsys):
        argv = ["verify-cm", "--family", "cartan", "--m", "2",
                "--samples", "25", "--seed", "7"]
        _, first = run(capsys, argv)
        _, second = run(capsys, argv)
        assert first == second

    def test_seed_changes_report(self, capsys):
        argv = ["verify-cm", "--family", "cartan", "--m", "1", "--samples", "25"]
        _, base = run(capsys, argv)
        _, other = run(capsys, argv + ["--seed", "99"])
        assert base != other

    def test_env_seed_overrides_flag(self, capsys, monkeypatch):
        monkeypatch.setenv("ISOPAR_SEED", "31415")
        code, doc = run_json(
            capsys, ["verify-cm", "--family", "cartan", "--m", "1",
                     "--samples", "10", "--seed", "5"]
        )
        assert code == 0
        assert doc["seed"] == 31415

    def test_out_file_replaces_stdout(self, capsys, tmp_path):
        target = tmp_path / "report.json"
        code, out = run(
            capsys, ["verify-cm", "--family", "cartan", "--m", "1",
                     "--samples", "10", "--out", str(target)]
        )
        assert code == 0
        assert out == ""
        doc = json.loads(target.read_text())
        assert doc["pass"] is True

    def test_error_report_respects_out_file(self, capsys, tmp_path):
        target = tmp_path / "err.json"
        code, out = run(
            capsys, ["verify-hidden", "--family", "cartan", "--m", "1",
                     "--k", "9", "--out", str(target)]
        )
        assert code == 2
        assert out == ""
        doc = json.loads(target.read_text())
        assert doc["error"]["type"] == "ConstructionError"

    def test_params_are_sorted(self, capsys):
        _, doc = run_json(
            capsys, ["verify-cm", "--family", "fkm", "--m", "2", "--r", "4",
                     "--samples", "10"]
        )
        keys = list(doc["params"])
        assert keys == sorted(keys)
