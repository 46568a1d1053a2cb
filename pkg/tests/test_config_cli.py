import json

import pytest
from click.testing import CliRunner

from cli.config import (
    DEFAULT_MOLECULE,
    MoleculeConfig,
    Settings,
    parse_config,
    write_config,
)
from cli.main import cli, run, significant
from core.exceptions import ConfigParseError, ConfigValidationError

ALANINE = {
    "label": "L-alanine",
    "j12_hz": 34.8,
    "j23_hz": 53.8,
    "delta12_hz": -4320.0,
    "delta13_hz": -20100.0,
}


def write_json(path, payload):
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


@pytest.fixture
def runner(isolated_env):
    return CliRunner()


class TestParseConfig:
    def test_bundled_alanine(self):
        config = parse_config(DEFAULT_MOLECULE)
        assert config.j12_hz == 34.8
        assert config.j23_hz == 53.8
        assert config.delta12_hz == -4320
        assert config.delta13_hz == -20100

    def test_bundled_name_resolves(self):
        assert parse_config("alanine.json") == parse_config("alanine")

    def test_missing_field(self, tmp_path):
        payload = {k: v for k, v in ALANINE.items() if k != "j23_hz"}
        with pytest.raises(ConfigValidationError) as info:
            parse_config(write_json(tmp_path / "m.json", payload))
        assert any("j23_hz" in problem for problem in info.value.problems)

    def test_negative_coupling(self, tmp_path):
        with pytest.raises(ConfigValidationError):
            parse_config(write_json(tmp_path / "m.json", dict(ALANINE, j12_hz=-1)))

    def test_unknown_key(self, tmp_path):
        with pytest.raises(ConfigValidationError):
            parse_config(write_json(tmp_path / "m.json", dict(ALANINE, j13_hz=0.0)))

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text('{\n  "j12_hz": 34.8,\n  "j23_hz": \n}\n', encoding="utf-8")
        with pytest.raises(ConfigParseError) as info:
            parse_config(path)
        assert info.value.line == 4

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigParseError):
            parse_config(tmp_path / "nowhere.json")

    def test_round_trip(self, tmp_path):
        config = MoleculeConfig(**ALANINE)
        assert parse_config(write_config(config, tmp_path / "out.json")) == config

    def test_to_params_converts_to_angular(self):
        p = MoleculeConfig(**ALANINE).to_params()
        assert p.j23 == pytest.approx(2 * 3.141592653589793 * 53.8)
        assert p.label == "L-alanine"


class TestSettings:
    def test_defaults(self, isolated_env, monkeypatch):
        monkeypatch.delenv("SOFTPULSE_LOG_LEVEL")
        settings = Settings.from_env()
        assert settings.molecule == str(DEFAULT_MOLECULE)
        assert settings.log_level == "WARNING"
        assert settings.db_path.endswith("runs.db")


class TestFormatting:
    def test_six_significant_digits(self):
        assert significant({"a": 106.1800123, "b": [1.23456789e-7, True, 3]}) == {
            "a": 106.18,
            "b": [1.23457e-07, True, 3],
        }


class TestCommands:
    def test_solve(self, runner):
        result = runner.invoke(cli, ["solve", "--config", "alanine.json", "--alpha", "pi"])
        assert result.exit_code == 0, result.output
        record = json.loads(result.stdout)
        assert record["n"] == 1
        assert record["omega1_hz"] == pytest.approx(106.18, abs=0.01)
        assert record["tau_ms"] == pytest.approx(9.29, abs=0.01)
        assert record["cancellation_ok"] is True
        assert record["bs_q2_rad"] == pytest.approx(-0.0762, abs=0.001)

    def test_bs_csv(self, runner):
        result = runner.invoke(cli, ["bs", "--pulses", "2"])
        assert result.exit_code == 0, result.output
        lines = result.stdout.strip().split("\n")
        assert lines[0] == "spectator,epsilon,approx_rad,exact_rad,rel_err"
        assert len(lines) == 3
        assert float(lines[1].split(",")[2]) == pytest.approx(-0.519, abs=0.002)

    def test_landscape_rows(self, runner):
        result = runner.invoke(cli, ["landscape", "--config", "alanine.json", "--nx", "2", "--ny", "2"])
        assert result.exit_code == 0, result.output
        lines = result.stdout.strip().split("\n")
        assert lines[0] == "tau_tilde,omega_tilde,fidelity"
        assert len(lines) == 5

    def test_output_is_deterministic(self, runner):
        args = ["landscape", "--nx", "3", "--ny", "3", "--workers", "2"]
        assert runner.invoke(cli, args).stdout == runner.invoke(cli, args).stdout

    def test_simulate_soft_reduced(self, runner, isolated_env):
        dump = isolated_env / "seq.json"
        result = runner.invoke(cli, ["simulate", "--soft", "--model", "reduced", "--dump", str(dump)])
        assert result.exit_code == 0, result.output
        record = json.loads(result.stdout)
        assert record["fidelity"] == pytest.approx(1.0, abs=1e-6)
        assert json.loads(dump.read_text())[0]["model"] == "reduced"

    def test_simulate_full_refocusing(self, runner):
        result = runner.invoke(cli, ["simulate", "--tau-ms", "0.7"])
        assert result.exit_code == 0, result.output
        assert json.loads(result.stdout)["fidelity"] == pytest.approx(0.965, abs=0.002)

    def test_qec_ideal(self, runner):
        result = runner.invoke(cli, ["qec", "--ideal", "--trials", "3", "--probs", "0.1,0.2,0.3,0.4"])
        assert result.exit_code == 0, result.output
        report = json.loads(result.stdout)
        assert all(item["holds"] for item in report["identities"])
        assert report["recovery_min"] == pytest.approx(1.0, abs=1e-6)

    def test_optimize_store_and_history(self, runner):
        result = runner.invoke(cli, ["optimize", "--nx", "5", "--ny", "5", "--store"])
        assert result.exit_code == 0, result.output
        record = json.loads(result.stdout)
        assert list(record) == ["tau_tilde", "omega_tilde", "fidelity", "tau_s", "omega1_hz"]

        history = runner.invoke(cli, ["history", "--kind", "optimize"])
        runs = json.loads(history.stdout)
        assert len(runs) == 1
        assert runs[0]["label"] == "L-alanine"
        assert runs[0]["fidelity"] == pytest.approx(record["fidelity"], rel=1e-5)


class TestExitCodes:
    def test_bad_config_exits_two(self, runner, isolated_env):
        path = write_json(isolated_env / "bad.json", dict(ALANINE, j12_hz=-1))
        result = runner.invoke(cli, ["solve", "--config", str(path)])
        assert result.exit_code == 2

    def test_missing_config_exits_two(self, runner, isolated_env):
        result = runner.invoke(cli, ["bs", "--config", str(isolated_env / "missing.json")])
        assert result.exit_code == 2

    def test_bad_probabilities_exit_two(self, runner):
        assert runner.invoke(cli, ["qec", "--probs", "0.5,0.5"]).exit_code == 2

    def test_computation_error_exits_one(self, runner):
        result = runner.invoke(cli, ["solve", "--alpha", "0"])
        assert result.exit_code == 1

    def test_run_returns_codes(self, isolated_env, capsys):
        assert run(["solve"]) == 0
        assert json.loads(capsys.readouterr().out)["n"] == 1
        assert run(["no-such-command"]) == 2
        assert run(["landscape", "--nx", "1"]) == 2
        assert run(["--help"]) == 0

    def test_zero_divisor_angle_is_usage_error(self, isolated_env):
        assert run(["solve", "--alpha", "pi/0"]) == 2
        assert run(["solve", "--alpha", "2*pi/0.0"]) == 2

    def test_unopenable_archive_does_not_fail_the_command(self, isolated_env, capsys):
        db_path = str(isolated_env / "missing" / "dir" / "runs.db")
        assert run(["--db-path", db_path, "optimize", "--nx", "3", "--ny", "3", "--store"]) == 0
        assert set(json.loads(capsys.readouterr().out)) == {
            "tau_tilde", "omega_tilde", "fidelity", "tau_s", "omega1_hz"
        }
        assert run(["--db-path", db_path, "history", "--kind", "qec"]) == 0
