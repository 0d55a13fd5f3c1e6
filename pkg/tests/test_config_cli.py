import json

import numpy as np
import pytest

from ncsdesign.cli import main
from ncsdesign.config import ConfigError, load_config

import refdata

FULL_CONFIG = """
plant:
  type: continuous
  A: [[0, 1], [0, -0.1]]
  B: [[0], [0.1]]
  C: [[1, 0]]
sample_time: 0.3
transmission_probability: 0.7
optimizer: regpso
weight_bounds:
  low: [-2, -2, -2]
  high: [2, 2, 2]
outer:
  population: 6
  iterations: 3
certification:
  population: 10
  generations: 12
  lmi_budget: 200
simulation:
  steps: 50
  realizations: 6
  report_realizations: 10
penalty_value: 1.0e6
master_seed: 5
weights:
  q_diag: [0.29495, 1.37137]
  r_value: 0.25781
gain: [[1.00337, 4.09011]]
"""


@pytest.fixture()
def config_file(tmp_path):
    path = tmp_path / "bench.yaml"
    path.write_text(FULL_CONFIG)
    return path


class TestLoadConfig:
    def test_full_round_trip(self, config_file):
        loaded = load_config(config_file)
        cfg = loaded.synth
        assert np.allclose(cfg.plant.G, refdata.ZOH_G, atol=1e-6)
        assert cfg.p_tx == 0.7
        assert cfg.optimizer == "regpso"
        assert cfg.outer_population == 6
        assert cfg.certification.max_generations == 12
        assert cfg.sim.n_steps == 50
        assert cfg.master_seed == 5
        assert np.allclose(loaded.weights.q_diag, [0.29495, 1.37137])
        assert np.allclose(loaded.gain, refdata.GAIN_A)

    def test_discrete_plant_section(self, tmp_path):
        path = tmp_path / "disc.yaml"
        path.write_text("""
plant:
  type: discrete
  G: [[1.0, 0.3], [0.0, 0.97]]
  H: [[0.004], [0.03]]
  C: [[1, 0]]
sample_time: 0.3
transmission_probability: 0.7
""")
        cfg = load_config(path).synth
        assert cfg.plant.G[0, 1] == 0.3
        assert cfg.sim.n_steps == 100  # default

    def test_defaults_fill_in(self, tmp_path):
        path = tmp_path / "minimal.yaml"
        path.write_text("""
plant:
  type: continuous
  A: [[0, 1], [0, -0.1]]
  B: [[0], [0.1]]
  C: [[1, 0]]
sample_time: 0.3
transmission_probability: 0.7
""")
        loaded = load_config(path)
        assert loaded.synth.outer_population == 20
        assert loaded.synth.penalty_value == 1e6
        assert loaded.weights is None and loaded.gain is None

    @pytest.mark.parametrize("mutation,match", [
        ("sample_time: 0.3", "transmission_probability"),
        ("transmission_probability: 0.7", "sample_time"),
    ])
    def test_missing_required_keys(self, tmp_path, mutation, match):
        path = tmp_path / "broken.yaml"
        path.write_text(f"""
plant:
  type: continuous
  A: [[0, 1], [0, -0.1]]
  B: [[0], [0.1]]
  C: [[1, 0]]
{mutation}
""")
        with pytest.raises(ConfigError, match=match):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.yaml")

    def test_bad_matrix_rejected(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("""
plant:
  type: continuous
  A: [[0, "x"], [0, -0.1]]
  B: [[0], [0.1]]
  C: [[1, 0]]
sample_time: 0.3
transmission_probability: 0.7
""")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_bad_optimizer_rejected(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("""
plant:
  type: continuous
  A: [[0, 1], [0, -0.1]]
  B: [[0], [0.1]]
  C: [[1, 0]]
sample_time: 0.3
transmission_probability: 0.7
optimizer: gradient
""")
        with pytest.raises(ConfigError):
            load_config(path)


class TestCli:
    def test_discretize(self, config_file, capsys, tmp_path):
        out = tmp_path / "out"
        code = main(["discretize", "--config", str(config_file),
                     "--out", str(out)])
        assert code == 0
        text = capsys.readouterr().out
        assert "G =" in text and "0.295545" in text
        payload = json.loads((out / "discretized.json").read_text())
        assert abs(payload["G"][0][1] - 0.295545) < 1e-6

    def test_lqr(self, config_file, capsys):
        code = main(["lqr", "--config", str(config_file)])
        assert code == 0
        text = capsys.readouterr().out
        assert "K =" in text and "nominal spectral radius" in text

    def test_certify_published_gain(self, config_file, capsys, tmp_path):
        out = tmp_path / "cert"
        code = main(["certify", "--config", str(config_file),
                     "--out", str(out)])
        assert code == 0
        payload = json.loads((out / "certificate.json").read_text())
        assert payload["certified"] is True
        assert payload["decay_product"] > 1.0

    def test_certify_zero_gain_exits_2(self, tmp_path, capsys):
        path = tmp_path / "zero.yaml"
        path.write_text(FULL_CONFIG.replace(
            "gain: [[1.00337, 4.09011]]", "gain: [[0.0, 0.0]]"))
        code = main(["certify", "--config", str(path)])
        assert code == 2

    def test_simulate_writes_traces(self, config_file, capsys, tmp_path):
        out = tmp_path / "sim"
        code = main(["simulate", "--config", str(config_file),
                     "--out", str(out), "--traces", "2"])
        assert code == 0
        assert (out / "trace_0.csv").exists()
        assert (out / "trace_1.csv").exists()
        assert "expected tracking cost" in capsys.readouterr().out

    def test_synthesize_writes_results(self, config_file, capsys, tmp_path):
        out = tmp_path / "synth"
        code = main(["synthesize", "--config", str(config_file),
                     "--out", str(out), "--seed", "3"])
        assert code == 0
        payload = json.loads((out / "result.json").read_text())
        assert payload["certificate"]["valid"] is True
        assert (out / "convergence.csv").exists()
        assert (out / "trace_0.csv").exists()

    def test_synthesize_arm_override(self, config_file, capsys):
        code = main(["synthesize", "--config", str(config_file),
                     "--arm", "ga"])
        assert code == 0

    def test_compare_writes_stats(self, tmp_path, capsys):
        path = tmp_path / "tiny.yaml"
        path.write_text(FULL_CONFIG.replace("iterations: 3", "iterations: 2")
                        .replace("population: 6", "population: 4"))
        out = tmp_path / "cmp"
        code = main(["compare", "--config", str(path), "--runs", "2",
                     "--out", str(out)])
        assert code == 0
        lines = (out / "stats.csv").read_text().strip().splitlines()
        assert lines[0] == "arm,mean,std,best,worst"
        assert len(lines) == 3
        assert (out / "runs.csv").exists()

    def test_config_error_exits_1(self, tmp_path, capsys):
        path = tmp_path / "broken.yaml"
        path.write_text("plant: {type: continuous}\n")
        code = main(["discretize", "--config", str(path)])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_lqr_without_weights_exits_1(self, tmp_path, capsys):
        path = tmp_path / "noweights.yaml"
        path.write_text("""
plant:
  type: continuous
  A: [[0, 1], [0, -0.1]]
  B: [[0], [0.1]]
  C: [[1, 0]]
sample_time: 0.3
transmission_probability: 0.7
""")
        code = main(["lqr", "--config", str(path)])
        assert code == 1
