"""Command line behavior: exit codes, output shapes, seed override."""

import json

import pytest

from perpetua.cli import main


def write_config(tmp_path, **overrides):
    payload = {
        "triplet": {
            "drift": 1.0,
            "gaussian": 1.0,
            "levy_measure": {"family": "none", "params": {}},
        },
        "f": {"family": "exp_decay", "params": {"rate": 1.0}},
        "n_paths": 120,
        "dt": 0.01,
        "horizon": {"t0": 1.0, "doublings": 3},
        "master_seed": 7,
    }
    payload.update(overrides)
    p = tmp_path / "config.json"
    p.write_text(json.dumps(payload))
    return str(p)


class TestVerdictCommand:
    def test_json_output(self, tmp_path, capsys):
        code = main(["verdict", "--config", write_config(tmp_path)])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["verdict"] == "AS_FINITE"
        assert "integral" in payload and "preconditions" in payload

    def test_csv_output(self, tmp_path, capsys):
        code = main(["verdict", "--config", write_config(tmp_path), "--format", "csv"])
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "key,value"
        assert any(line.startswith("verdict,") for line in lines)

    def test_divergent_function_verdict(self, tmp_path, capsys):
        cfg = write_config(tmp_path, f={"family": "power_tail", "params": {"p": 1.0}})
        code = main(["verdict", "--config", cfg])
        assert code == 0
        assert json.loads(capsys.readouterr().out)["verdict"] == "AS_INFINITE"


class TestClassifyCommand:
    def test_reports_structure_and_local_time(self, tmp_path, capsys):
        code = main(["classify", "--config", write_config(tmp_path)])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["local_time"] == "HAS_LOCAL_TIMES"
        assert payload["mean"] == "1.0"
        assert payload["classification"]["is_compound_poisson"] is False


class TestExitCodes:
    def test_missing_file_is_config_error(self, tmp_path, capsys):
        code = main(["verdict", "--config", str(tmp_path / "absent.json")])
        assert code == 2
        assert "config error" in capsys.readouterr().err

    def test_invalid_config_lists_every_problem(self, tmp_path, capsys):
        cfg = write_config(tmp_path, n_paths=3, master_seed=-5)
        code = main(["verdict", "--config", cfg])
        assert code == 2
        err = capsys.readouterr().err
        assert "n_paths" in err and "master_seed" in err

    def test_analysis_error_maps_to_one(self, tmp_path, capsys):
        # driftless symmetric BM has zero mean: the verdict's mean
        # precondition fails inside the analysis, not in the config
        cfg = write_config(
            tmp_path,
            triplet={"drift": -1.0, "gaussian": 1.0,
                     "levy_measure": {"family": "none", "params": {}}},
        )
        code = main(["verify", "--config", cfg])
        assert code == 1


class TestSimulateCommand:
    def test_writes_path_csvs(self, tmp_path, capsys):
        out = tmp_path / "artifacts"
        cfg = write_config(tmp_path, n_paths=100)
        code = main(["simulate", "--config", cfg, "--out", str(out)])
        assert code == 0
        files = sorted(p.name for p in out.iterdir())
        assert "partial_integrals.csv" in files
        assert "path_0000.csv" in files
        header = (out / "path_0000.csv").read_text().splitlines()[0]
        assert header == "time,value"

    def test_seed_override_changes_paths(self, tmp_path):
        cfg = write_config(tmp_path, n_paths=100)
        out_a, out_b, out_c = (tmp_path / x for x in ("a", "b", "c"))
        main(["simulate", "--config", cfg, "--out", str(out_a)])
        main(["simulate", "--config", cfg, "--out", str(out_b), "--seed", "99"])
        main(["simulate", "--config", cfg, "--out", str(out_c), "--seed", "99"])
        first = "path_0000.csv"
        assert (out_a / first).read_text() != (out_b / first).read_text()
        assert (out_b / first).read_text() == (out_c / first).read_text()


class TestVerifyCommand:
    def test_pass_lines_and_report(self, tmp_path, capsys):
        out = tmp_path / "run"
        cfg = write_config(
            tmp_path,
            checks=["zero_one", "lln"],
            check_params={"lln": {"n": 60, "t0": 60.0}},
            n_paths=150,
            horizon={"t0": 2.0, "doublings": 5},
        )
        code = main(["verify", "--config", cfg, "--out", str(out)])
        captured = capsys.readouterr().out
        assert code == 0
        assert "[PASS] zero_one" in captured
        assert "[PASS] lln_envelope" in captured
        assert "meets expectations" in captured
        report = json.loads((out / "report.json").read_text())
        assert report["all_pass"] is True
        assert report["meets_expectations"] is True
        assert (out / "metadata.json").exists()
        assert (out / "finiteness.csv").exists()

    def test_expected_fail_inverts_exit_code(self, tmp_path, capsys):
        # stable(0.5) has no local times and no finite mean: both checks
        # fail by named precondition, which the config declares as expected
        cfg = write_config(
            tmp_path,
            triplet={
                "drift": 0.0, "gaussian": 0.0,
                "levy_measure": {
                    "family": "stable",
                    "params": {"alpha": 0.5, "scale": 1.0, "skew": 0.0},
                },
            },
            checks=["occupation", "lln"],
            expected_fail=["occupation", "lln"],
        )
        code = main(["verify", "--config", cfg])
        captured = capsys.readouterr().out
        assert code == 0
        assert "[FAIL] occupation" in captured
        assert "[FAIL] lln" in captured

    def test_unexpected_failure_exits_one(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            triplet={
                "drift": 0.0, "gaussian": 0.0,
                "levy_measure": {
                    "family": "stable",
                    "params": {"alpha": 0.5, "scale": 1.0, "skew": 0.0},
                },
            },
            checks=["lln"],
        )
        code = main(["verify", "--config", cfg])
        assert code == 1
        assert "FAILED" in capsys.readouterr().out
