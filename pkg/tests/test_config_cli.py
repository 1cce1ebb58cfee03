import os

import numpy as np
import pytest

from graphon_mfg.cli import main, run_experiment
from graphon_mfg.config import ConfigError, config_hash, parse_config
from graphon_mfg.envs import CyberParams

MINIMAL = """
[environment]
name = cyber
"""

TINY_SOLVE = """
[experiment]
seed = 3
[environment]
name = cyber
horizon = 6
[graphon]
kind = power_law
exponent = 0.5
[discretization]
num_classes = 2
[omd]
gamma = 1.0
iterations = 4
"""


class TestParseConfig:
    def test_minimal_fills_benchmark_defaults(self):
        cfg = parse_config(MINIMAL)
        assert cfg.env_name == "cyber"
        assert isinstance(cfg.env_params, CyberParams)
        assert cfg.env_params.horizon == 50
        assert cfg.env_params.k_d == 0.7
        assert cfg.env_params.k_i == 2.0
        assert cfg.env_params.q_rec_d == 0.3
        assert np.allclose(cfg.env_params.mu0, 0.25)
        assert cfg.num_classes == 25
        assert cfg.omd.gamma == 1.0

    def test_env_specific_class_count_defaults(self):
        assert parse_config("[environment]\nname = beach\n").num_classes == 10
        assert parse_config("[environment]\nname = hetero_cyber\n").num_classes == 100

    def test_negative_gamma_rejected(self):
        with pytest.raises(ConfigError, match=r"gamma must be > 0"):
            parse_config(MINIMAL + "[omd]\ngamma = -1\n")

    def test_unknown_environment_lists_names(self):
        with pytest.raises(ConfigError, match="cyber, hetero_cyber, beach"):
            parse_config("[environment]\nname = pond\n")

    def test_unknown_field_rejected(self):
        with pytest.raises(ConfigError, match="unknown field"):
            parse_config(MINIMAL + "[omd]\nlearning_rate = 2\n")

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match=r"unknown section \[omg\]"):
            parse_config(MINIMAL + "[omg]\ngamma = 1\n")

    def test_parse_error_carries_location(self):
        with pytest.raises(ConfigError, match="line"):
            parse_config("[environment\nname = cyber\n")

    def test_env_parameter_override_and_bounds(self):
        cfg = parse_config(MINIMAL + "horizon = 8\nk_d = 0.3\n")
        assert cfg.env_params.horizon == 8
        assert cfg.env_params.k_d == 0.3
        with pytest.raises(ConfigError, match="q_rec_d"):
            parse_config(MINIMAL + "q_rec_d = 1.4\n")

    def test_beta_bounds(self):
        with pytest.raises(ConfigError, match=r"lie in \(0,1\)"):
            parse_config(MINIMAL + "[sweep]\nbetas = 0.5, 1.2\n")

    def test_empty_ns_rejected(self):
        with pytest.raises(ConfigError, match="at least one N"):
            parse_config(MINIMAL + "[sweep]\nns =\n")

    def test_graphon_descriptor(self):
        cfg = parse_config(MINIMAL + "[graphon]\nkind = cutoff_power_law\nexponent = 0.6\ncutoff = 0.05\n")
        w = cfg.build_graphon()
        assert w.exponent == 0.6
        assert w.cutoff == 0.05
        with pytest.raises(ConfigError, match="exponent"):
            parse_config(MINIMAL + "[graphon]\nkind = power_law\nexponent = 2\n")

    def test_hetero_block_overrides(self):
        text = "[environment]\nname = hetero_cyber\npri_k_d = 0.5\ncor_beta_uu = 0.75\n"
        cfg = parse_config(text)
        assert cfg.env_params.pri.k_d == 0.5
        assert cfg.env_params.cor.beta_uu == 0.75
        # untouched defaults stay at the benchmark values
        assert cfg.env_params.pri.beta_uu == 1.0
        assert cfg.env_params.cor.k_d == 0.7

    def test_hash_stable_and_sensitive(self):
        a = config_hash(parse_config(MINIMAL))
        b = config_hash(parse_config(MINIMAL))
        c = config_hash(parse_config(MINIMAL + "horizon = 12\n"))
        assert a == b
        assert a != c


def read_lines(path):
    with open(path) as fh:
        return fh.read().splitlines()


class TestRunExperiment:
    def test_solve_writes_artifacts_and_manifest(self, tmp_path):
        cfg = parse_config(TINY_SOLVE)
        out = tmp_path / "run"
        assert run_experiment(cfg, "solve", out_dir=str(out)) == 0
        for name in ("trace.csv", "policy.csv", "meanfield.csv", "manifest.csv"):
            assert (out / name).exists(), name
        head = read_lines(out / "trace.csv")[0]
        assert head == f"# config={config_hash(cfg)} seed=3"
        manifest = read_lines(out / "manifest.csv")
        assert any("policy.csv" in line for line in manifest)

    def test_rerun_is_byte_identical_outside_wall_clock(self, tmp_path):
        cfg = parse_config(TINY_SOLVE)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        run_experiment(cfg, "solve", out_dir=str(out1))
        run_experiment(cfg, "solve", out_dir=str(out2))
        for name in ("policy.csv", "meanfield.csv", "manifest.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name
        # the trace carries wall-clock seconds; everything else must agree
        t1 = [line.rsplit(",", 1)[0] for line in read_lines(out1 / "trace.csv")]
        t2 = [line.rsplit(",", 1)[0] for line in read_lines(out2 / "trace.csv")]
        assert t1 == t2

    def test_simulate_and_sweep_and_stats(self, tmp_path):
        text = TINY_SOLVE + """
[simulate]
n = 12
beta = 0.4
[sweep]
betas = 0.4
ns = 6, 10
samples_per_cell = 2
policy = uniform
[graph_stats]
n = 30
beta = 0.4
"""
        cfg = parse_config(text)
        assert run_experiment(cfg, "simulate", out_dir=str(tmp_path / "sim")) == 0
        assert (tmp_path / "sim" / "trajectory.csv").exists()
        assert (tmp_path / "sim" / "graph.edgelist").exists()
        assert run_experiment(cfg, "sweep", out_dir=str(tmp_path / "sw")) == 0
        lines = read_lines(tmp_path / "sw" / "sweep.csv")
        assert lines[1] == "beta,n,k,mean_dmu,stderr_dmu"
        assert len(lines) == 4  # header comment + columns + 2 cells
        assert run_experiment(cfg, "graph-stats", out_dir=str(tmp_path / "gs")) == 0
        assert (tmp_path / "gs" / "degrees.csv").exists()

    def test_cutnorm_difference(self, tmp_path):
        text = MINIMAL + """
[graphon]
kind = constant
value = 0.8
[cutnorm]
grid = 6
restarts = 2
b_kind = constant
b_value = 0.8
"""
        cfg = parse_config(text)
        assert run_experiment(cfg, "cutnorm", out_dir=str(tmp_path / "cn")) == 0
        rows = read_lines(tmp_path / "cn" / "cutnorm.csv")
        assert rows[-1].endswith(",0.0")

    def test_config_file_not_mutated(self, tmp_path):
        path = tmp_path / "exp.ini"
        path.write_text(TINY_SOLVE)
        before = path.read_bytes()
        assert main(["solve", "--config", str(path), "--out", str(tmp_path / "o")]) == 0
        assert path.read_bytes() == before

    def test_cli_seed_override(self, tmp_path):
        path = tmp_path / "exp.ini"
        path.write_text(TINY_SOLVE)
        assert main(["solve", "--config", str(path), "--out", str(tmp_path / "o"),
                     "--seed", "99"]) == 0
        head = read_lines(tmp_path / "o" / "trace.csv")[0]
        assert head.endswith("seed=99")

    def test_cli_bad_config_is_nonzero(self, tmp_path, capsys):
        path = tmp_path / "bad.ini"
        path.write_text("[omd]\ngamma = -2\n")
        assert main(["solve", "--config", str(path)]) == 1
        assert "gamma" in capsys.readouterr().err

    def test_cli_missing_file_is_nonzero(self, tmp_path):
        assert main(["solve", "--config", str(tmp_path / "nope.ini")]) == 1
