import json
import math

import numpy as np
import pytest

from extl import sir_cdf
from extl.cli import main

RAMP_MODEL = {
    "family": "triangular_ramp",
    "peak_a": 0.132,
    "tau": {"kind": "uniform", "lo": 1.5, "hi": 2.5},
    "eta": {"kind": "uniform", "lo": 7, "hi": 13},
}


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def read_csv(path):
    lines = path.read_text(encoding="utf-8").strip().splitlines()
    header = lines[0].split(",")
    rows = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    return header, rows


@pytest.fixture
def ramp_config(tmp_path):
    return write_config(
        tmp_path,
        {"model": RAMP_MODEL, "solver": {"n": 8, "horizon": 120, "lambda_cutoff": 100}},
    )


class TestCharacteristics:
    def test_json_payload(self, ramp_config, capsys):
        assert main(["characteristics", "--config", ramp_config]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert set(doc) == {"r_eff", "rho", "lambda_hat_star", "residual"}
        assert doc["r_eff"] == pytest.approx(0.66, rel=1e-9)
        assert doc["rho"] == pytest.approx(-0.067732, abs=1e-5)
        assert doc["residual"] < 1e-6


class TestCdf:
    def test_deterministic_duration_value(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            {
                "model": {
                    "family": "constant_rate",
                    "lambda": 0.2,
                    "eta": {"kind": "dirac", "value": 5},
                },
                "solver": {"n": 32, "horizon": 40, "lambda_cutoff": 40},
            },
        )
        out = tmp_path / "f.csv"
        assert main(["cdf", "--config", cfg, "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["t", "F"]
        at5 = rows[np.isclose(rows[:, 0], 5.0), 1][0]
        assert at5 == pytest.approx(math.exp(-1.0), abs=2 * 0.2 / 32)

    def test_multiple_ancestors_power(self, tmp_path, capsys):
        base = {"model": RAMP_MODEL, "solver": {"n": 4, "horizon": 60, "lambda_cutoff": 50}}
        cfg1 = write_config(tmp_path, base, "one.json")
        doc = dict(base, ancestors={"M": 3, "tilted": False})
        cfg3 = write_config(tmp_path, doc, "three.json")
        out1, out3 = tmp_path / "f1.csv", tmp_path / "f3.csv"
        assert main(["cdf", "--config", cfg1, "--out", str(out1)]) == 0
        assert main(["cdf", "--config", cfg3, "--out", str(out3)]) == 0
        _, rows1 = read_csv(out1)
        _, rows3 = read_csv(out3)
        np.testing.assert_allclose(rows3[:, 1], rows1[:, 1] ** 3, atol=1e-8)


class TestMean:
    def test_payload(self, ramp_config, capsys):
        assert main(["mean", "--config", ramp_config]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["n"] == 8
        assert doc["lambda_cutoff"] == 100.0
        assert doc["mean_days"] == pytest.approx(19.16, abs=0.1)
        assert doc["truncation_bound"] > 0


class TestCompare:
    def test_columns_and_summary(self, ramp_config, tmp_path, capsys):
        out = tmp_path / "cmp.csv"
        assert main(["compare", "--config", ramp_config, "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["t", "F_vi", "F_markov"]
        summary = json.loads((tmp_path / "cmp.json").read_text(encoding="utf-8"))
        # the emitted Markov column is exactly the closed form at the
        # printed characteristics
        expected = sir_cdf(summary["r_eff"], summary["rho"], rows[:, 0])
        np.testing.assert_allclose(rows[:, 2], expected, rtol=0, atol=1e-9)
        assert summary["mean_markov"] == pytest.approx(8.21, abs=0.05)
        assert summary["mean_vi"] == pytest.approx(19.16, abs=0.1)

    def test_supercritical_is_numerical_failure(self, tmp_path, capsys):
        doc = {"model": dict(RAMP_MODEL, peak_a=0.3), "solver": {"n": 4, "horizon": 30, "lambda_cutoff": 30}}
        cfg = write_config(tmp_path, doc)
        out = tmp_path / "cmp.csv"
        assert main(["compare", "--config", cfg, "--out", str(out)]) == 3


class TestSimulate:
    def test_reproducible_output(self, tmp_path, monkeypatch):
        doc = {
            "model": RAMP_MODEL,
            "solver": {"n": 4, "horizon": 60, "lambda_cutoff": 50},
            "sim": {"replicates": 400, "seed": 31, "grid_points": 20},
        }
        cfg = write_config(tmp_path, doc)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["simulate", "--config", cfg, "--out", str(a)]) == 0
        monkeypatch.setenv("EXTL_THREADS", "2")
        assert main(["simulate", "--config", cfg, "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        header, rows = read_csv(a)
        assert header == ["t", "p_hat", "halfwidth"]
        assert np.all(np.diff(rows[:, 1]) >= 0)


class TestLln:
    def test_reports_susceptibles(self, tmp_path, capsys):
        doc = {
            "model": RAMP_MODEL,
            "lln": {"i0": 0.01, "step_h": 0.05, "horizon": 30},
        }
        cfg = write_config(tmp_path, doc)
        out = tmp_path / "traj.csv"
        assert main(["lln", "--config", cfg, "--t0", "20", "--out", str(out)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert 0.0 < doc["s_bar_t0"] < 0.99
        header, rows = read_csv(out)
        assert header == ["t", "S", "I", "R", "force"]
        assert np.all(np.abs(rows[:, 1] + rows[:, 2] + rows[:, 3] - 1.0) < 1e-9)


class TestByteReproducibility:
    def test_cdf_and_compare(self, ramp_config, tmp_path, capsys):
        pairs = []
        for name in ("x", "y"):
            out = tmp_path / f"{name}.csv"
            assert main(["compare", "--config", ramp_config, "--out", str(out)]) == 0
            pairs.append(out.read_bytes())
        assert pairs[0] == pairs[1]


class TestWorkerEnv:
    def test_zero_means_auto(self, monkeypatch):
        from extl.cli import _workers_from_env

        monkeypatch.setenv("EXTL_THREADS", "0")
        assert _workers_from_env() >= 1
        monkeypatch.setenv("EXTL_THREADS", "3")
        assert _workers_from_env() == 3

    def test_invalid_value_is_config_error(self, ramp_config, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("EXTL_THREADS", "many")
        out = tmp_path / "emp.csv"
        assert main(["simulate", "--config", ramp_config, "--out", str(out)]) == 2


class TestOverrides:
    def test_set_changes_grid(self, ramp_config, tmp_path):
        out = tmp_path / "f.csv"
        assert main(["cdf", "--config", ramp_config, "--set", "solver.n=4", "--out", str(out)]) == 0
        _, rows = read_csv(out)
        assert rows[1, 0] == pytest.approx(0.25)


class TestErrors:
    def test_missing_file(self, capsys):
        assert main(["characteristics", "--config", "/nonexistent.json"]) == 2
        assert "config error" in capsys.readouterr().err

    def test_syntax_error_reports_line(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{\n  "model": {,}\n}', encoding="utf-8")
        assert main(["characteristics", "--config", str(bad)]) == 2
        assert "line 2" in capsys.readouterr().err

    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"model": RAMP_MODEL, "solver": {"m": 3}})
        assert main(["characteristics", "--config", cfg]) == 2
        assert "unknown" in capsys.readouterr().err

    def test_invalid_law_rejected(self, tmp_path, capsys):
        doc = {"model": dict(RAMP_MODEL, eta={"kind": "exponential", "rate": 0.2})}
        cfg = write_config(tmp_path, doc)
        assert main(["characteristics", "--config", cfg]) == 2

    def test_no_finite_root_is_numerical_failure(self, tmp_path, capsys):
        doc = {
            "model": {
                "family": "constant_rate",
                "lambda": 0.0,
                "eta": {"kind": "exponential", "rate": 0.25},
            }
        }
        cfg = write_config(tmp_path, doc)
        assert main(["characteristics", "--config", cfg]) == 3
        assert "no finite decay rate" in capsys.readouterr().err

    def test_missing_family_field(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"model": {"family": "constant_rate"}})
        assert main(["characteristics", "--config", cfg]) == 2
        assert "model.lambda" in capsys.readouterr().err
