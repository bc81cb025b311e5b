import json

import pytest

from main import main
from modules.cli import commands, model_seed, verify_model
from modules.engine import IntegrationConfig
from modules.models import load_document, save_model


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


@pytest.fixture
def exponential_doc(tmp_path, capsys):
    path = tmp_path / "exp.json"
    assert main(["build", "--builder", "exponential", "--gamma", "1", "--out", str(path)]) == 0
    capsys.readouterr()
    return path


class TestBuild:
    def test_writes_document_and_manifest(self, exponential_doc, tmp_path):
        document = json.loads(exponential_doc.read_text())
        assert document["schema_version"] == "tickbound-model/1"
        assert document["dim"] == 2
        manifest = json.loads((tmp_path / "exp_manifest.json").read_text())
        assert manifest["command"] == "build"
        assert manifest["outputs"]["document"] == str(exponential_doc)

    def test_ladder(self, tmp_path):
        path = tmp_path / "ladder.json"
        assert main(["build", "--builder", "ladder", "--d", "2", "--g", "0.2", "--out", str(path)]) == 0
        model = load_document(path)
        assert model.dim == 8
        assert model.metadata["params"]["g"] == 0.2

    def test_oracle(self, tmp_path):
        path = tmp_path / "erlang.json"
        assert main(["build", "--builder", "erlang", "--gamma", "2", "--m", "3", "--out", str(path)]) == 0
        assert json.loads(path.read_text())["schema_version"] == "tickbound-oracle/1"


class TestStats:
    def test_exponential(self, exponential_doc, capsys):
        code, out = run(capsys, "stats", "--model", str(exponential_doc))
        payload = json.loads(out)
        assert code == 0
        assert payload["success"]
        assert payload["N"] == pytest.approx(1.0, rel=1e-5)
        assert payload["bound_ratio"] == pytest.approx(1.0, rel=1e-5)
        assert payload["tradeoff_satisfied"]
        assert payload["manifest"]["command"] == "stats"

    def test_heaviside_oracle(self, tmp_path, capsys):
        path = tmp_path / "heaviside.json"
        main(["build", "--builder", "heaviside", "--gamma", "2", "--t0", "1", "--out", str(path)])
        capsys.readouterr()
        code, out = run(capsys, "stats", "--model", str(path))
        assert code == 0
        assert json.loads(out)["N"] == pytest.approx(9.0)

    def test_fixed_state_ticks(self, exponential_doc, capsys):
        code, out = run(capsys, "stats", "--model", str(exponential_doc), "--n-ticks", "2", "--reset-policy", "fixed_state")
        payload = json.loads(out)
        assert code == 0
        assert [tick["tick_index"] for tick in payload["per_tick"]] == [1, 2]

    def test_manifest_file(self, exponential_doc, tmp_path, capsys):
        code, out = run(capsys, "stats", "--model", str(exponential_doc), "--out", str(tmp_path / "run"))
        assert code == 0
        assert "manifest" not in json.loads(out)
        manifest = json.loads((tmp_path / "run_manifest.json").read_text())
        assert manifest["config"]["rel_tol"] == 1e-8

    def test_not_converged(self, dark_model, tmp_path, capsys):
        path = tmp_path / "dark.json"
        save_model(dark_model, path)
        code, out = run(capsys, "stats", "--model", str(path), "--max-horizon", "20")
        payload = json.loads(out)
        assert code == 2
        assert payload["success"] is False
        assert payload["converged"] is False

    def test_second_tick_never_happens(self, exponential_doc, capsys):
        code, out = run(capsys, "stats", "--model", str(exponential_doc), "--n-ticks", "2", "--max-horizon", "50")
        assert code == 2
        assert json.loads(out)["tick_index"] == 2


class TestSimulate:
    def test_timeseries(self, exponential_doc, tmp_path):
        prefix = tmp_path / "exp"
        assert main(["simulate", "--model", str(exponential_doc), "--out", str(prefix)]) == 0
        with open(f"{prefix}_timeseries.csv", newline="") as f:
            lines = f.read().split("\r\n")
        assert lines[0] == "t,survival,tick_pdf,conditional_rate,top_level_population"
        assert lines[1].startswith("0,1,1,1,1")
        manifest = json.loads((tmp_path / "exp_manifest.json").read_text())
        assert manifest["provenance"]["converged"] is True

    def test_oracle_timeseries(self, tmp_path):
        path = tmp_path / "erlang.json"
        main(["build", "--builder", "erlang", "--m", "2", "--out", str(path)])
        prefix = tmp_path / "erlang"
        assert main(["simulate", "--model", str(path), "--out", str(prefix)]) == 0
        rows = (tmp_path / "erlang_timeseries.csv").read_text().splitlines()
        assert len(rows) == 1002

    def test_not_converged(self, dark_model, tmp_path):
        path = tmp_path / "dark.json"
        save_model(dark_model, path)
        assert main(["simulate", "--model", str(path), "--out", str(tmp_path / "dark"), "--max-horizon", "10"]) == 2
        assert (tmp_path / "dark_timeseries.csv").exists()


class TestSweep:
    def test_erlang(self, tmp_path):
        out = tmp_path / "erlang.csv"
        assert main(["sweep", "--builder", "erlang", "--m-values", "1", "2", "4", "--out", str(out)]) == 0
        rows = out.read_text().splitlines()
        assert rows[0] == "m,N,nu,Gamma,bound_ratio,classical_ratio,flag"
        flags = [row.split(",")[-1] for row in rows[1:]]
        assert flags == ["point"] * 3 + ["bound_curve", "classical_curve"] * 3
        assert rows[3].split(",")[:2] == ["4", "4"]
        assert (tmp_path / "erlang_manifest.json").exists()

    def test_heaviside_points_sit_on_the_bound(self, tmp_path):
        out = tmp_path / "heaviside.csv"
        assert main(["sweep", "--builder", "heaviside", "--t0-values", "0", "2", "--out", str(out)]) == 0
        for row in out.read_text().splitlines()[1:3]:
            assert float(row.split(",")[4]) == pytest.approx(1.0)


class TestVerify:
    def test_injected_bug_fails_the_suite(self, capsys):
        code, out = run(capsys, "verify", "--seed", "7", "--n-models", "3", "--inject-bug")
        report = json.loads(out)
        assert code == 3
        assert report["success"] is False
        assert report["inject_bug"] is True
        assert report["failures"]

    def test_needs_models(self, capsys):
        assert main(["verify", "--n-models", "0"]) == 1

    def test_clean_models_pass(self, capsys):
        code, out = run(capsys, "verify", "--seed", "7", "--n-models", "3")
        report = json.loads(out)
        assert report["failures"] == []
        assert code == 0

    def test_records_grid_invariants(self, monkeypatch):
        monkeypatch.setattr(commands, "evolution_violations", lambda evolution: ["conditional_rate_bound"])
        record = verify_model(0, model_seed(7, 0), IntegrationConfig())
        assert "conditional_rate_bound" in record["failures"]

    def test_flipped_generator_fails_the_grid_checks(self):
        config = IntegrationConfig(flip_tick_anticommutator=True)
        record = verify_model(0, model_seed(7, 0), config)
        assert record["status"] == "trace_growth"
        assert record["failures"]

    @pytest.mark.slow
    def test_random_suite_passes(self, tmp_path, capsys):
        code, _ = run(capsys, "verify", "--seed", "7", "--n-models", "200", "--workers", "4", "--out", str(tmp_path / "suite"))
        report = json.loads((tmp_path / "suite_report.json").read_text())
        assert report["failures"] == []
        assert code == 0


class TestTrajectories:
    def test_exponential(self, exponential_doc, tmp_path):
        prefix = tmp_path / "mc"
        argv = ["trajectories", "--model", str(exponential_doc), "--n-traj", "2000", "--seed", "4", "--out", str(prefix)]
        assert main(argv) == 0
        assert len((tmp_path / "mc_ticks.csv").read_text().splitlines()) == 2000
        payload = json.loads((tmp_path / "mc_estimates.json").read_text())
        assert payload["estimates"]["1"]["n_samples"] == 2000
        first = payload["comparison"]["per_tick"][0]
        assert first["mu"]["within_4se"]
        assert "first_tick_fit" in payload["comparison"]
        assert (tmp_path / "mc_manifest.json").exists()

    def test_same_seed_gives_identical_dumps(self, tmp_path):
        path = tmp_path / "rabi.json"
        assert main(["build", "--builder", "rabi", "--out", str(path)]) == 0
        dumps = []
        for run_name in ("first", "second"):
            argv = ["trajectories", "--model", str(path), "--n-traj", "300", "--max-ticks", "2", "--seed", "11"]
            assert main(argv + ["--out", str(tmp_path / run_name)]) == 0
            dumps.append((tmp_path / f"{run_name}_ticks.csv").read_bytes())
        assert dumps[0] == dumps[1]

    def test_all_censored(self, dark_model, tmp_path):
        path = tmp_path / "dark.json"
        save_model(dark_model, path)
        argv = ["trajectories", "--model", str(path), "--n-traj", "150", "--out", str(tmp_path / "dark"), "--max-horizon", "5"]
        assert main(argv) == 2
        assert json.loads((tmp_path / "dark_estimates.json").read_text())["success"] is False

    def test_rejects_oracles(self, tmp_path):
        path = tmp_path / "erlang.json"
        main(["build", "--builder", "erlang", "--out", str(path)])
        assert main(["trajectories", "--model", str(path), "--out", str(tmp_path / "x")]) == 1


class TestUsage:
    def test_missing_required_flag(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["stats"])
        assert excinfo.value.code == 1

    def test_unknown_builder(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["build", "--builder", "sundial", "--out", "x.json"])
        assert excinfo.value.code == 1

    def test_missing_model_file(self, tmp_path):
        assert main(["stats", "--model", str(tmp_path / "missing.json")]) == 1

    def test_no_command(self):
        assert main([]) == 1


def test_default_config_matches_settings_files():
    assert IntegrationConfig.from_settings() == IntegrationConfig()
