import json
import subprocess

import pytest

from gibbslab.cli import main


def write_config(tmp_path, **overrides):
    cfg = {
        "experiment": "violation",
        "space_spec": {
            "name": "random_loss_table",
            "params": {"num_hypotheses": 16, "num_points": 8, "seed": 3},
        },
        "n": 50,
        "beta_grid": [10.0],
        "delta": 0.05,
        "trials": 150,
        "master_seed": 11,
        "output_path": str(tmp_path / "out.csv"),
    }
    cfg.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path, cfg


class TestRun:
    def test_successful_run(self, tmp_path, capsys):
        cfg_path, cfg = write_config(tmp_path)
        assert main(["run", str(cfg_path)]) == 0
        assert (tmp_path / "out.csv").exists()
        assert (tmp_path / "out.json").exists()
        assert "violation PASS" in capsys.readouterr().out

    def test_missing_output_path(self, tmp_path, capsys):
        cfg_path, _ = write_config(tmp_path, output_path=None)
        assert main(["run", str(cfg_path)]) == 2
        assert "output_path" in capsys.readouterr().err

    def test_uncertifiable_delta_fails(self, tmp_path):
        # 150 clean trials cannot certify a rate below 0.001 at 99% confidence
        cfg_path, _ = write_config(tmp_path, delta=0.001)
        assert main(["run", str(cfg_path)]) == 1


class TestVerify:
    def test_determinism_suite(self, capsys):
        assert main(["verify", "determinism"]) == 0
        out = capsys.readouterr().out
        assert "criterion 11 PASS" in out
        assert "suite determinism: PASS" in out

    def test_unknown_suite_rejected(self):
        with pytest.raises(SystemExit):
            main(["verify", "not-a-suite"])


class TestSweep:
    def test_phase_sweep(self, tmp_path, capsys):
        out = tmp_path / "phase.csv"
        code = main(
            [
                "sweep",
                "--experiment",
                "phase",
                "--beta-min",
                "0.1",
                "--beta-max",
                "100.0",
                "--beta-steps",
                "12",
                "--n",
                "50",
                "--delta",
                "0.05",
                "--seed",
                "7",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "beta,diagonal,kl,plateau"
        assert len(lines) == 13
        assert "PASS" in capsys.readouterr().out

    def test_zero_temp_sweep_with_custom_space(self, tmp_path):
        out = tmp_path / "zt.csv"
        space = json.dumps(
            {"name": "k_minimizer_space", "params": {"num_hypotheses": 50, "num_minimizers": 5, "seed": 2}}
        )
        code = main(
            [
                "sweep",
                "--experiment",
                "zero_temp",
                "--beta-min",
                "0.0",
                "--beta-max",
                "200.0",
                "--beta-steps",
                "9",
                "--n",
                "40",
                "--delta",
                "0.1",
                "--seed",
                "3",
                "--out",
                str(out),
                "--space",
                space,
            ]
        )
        assert code == 0
        assert out.read_text().splitlines()[0] == "beta,lambda_drawn,lambda_min,limit"


def test_console_script_help():
    result = subprocess.run(["gibbslab", "--help"], capture_output=True, text=True)
    assert result.returncode == 0
    assert "run" in result.stdout and "verify" in result.stdout and "sweep" in result.stdout
