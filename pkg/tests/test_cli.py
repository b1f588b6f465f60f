from pathlib import Path

import numpy as np
import pytest

from pege.cli import fmt, main, read_curve, run_experiment, summarize
from pege.config import format_config, parse_config_text
from pege.presets import PRESETS, pege2_tied, smoke
from pege.simulator import ConfigError, aggregate, fit_scaling_exponent, run_single

MINIMAL = """\
# smallest useful experiment
env = ranking
n = 3
algo = pege-t1
T = 1000
seeds = 3
"""


def read_summary(path):
    out = {}
    for line in Path(path).read_text().splitlines():
        k, v = line.split(" = ", 1)
        out[k] = v
    return out


class TestParse:
    def test_minimal_defaults(self):
        cfg, extras = parse_config_text(MINIMAL)
        assert (cfg.env, cfg.n, cfg.algo, cfg.horizon) == ("ranking", 3, "pege-t1", 1000)
        assert cfg.seeds == [0, 1, 2]
        assert cfg.adversary == "bernoulli" and cfg.means == [0.9, 0.5, 0.1]
        assert extras["slope_t_min"] is None

    def test_negative_horizon(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text(MINIMAL.replace("T = 1000", "T = -10"))
        assert err.value.field == "horizon" and err.value.line == 5

    def test_t2_without_h(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text(MINIMAL.replace("pege-t1", "pege-t2"))
        assert err.value.field == "h"

    def test_unknown_key_line(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text(MINIMAL + "colour = blue\n")
        assert err.value.field == "colour" and err.value.line == 7
        assert "line 7" in str(err.value)

    def test_duplicate_key(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text(MINIMAL + "n = 4\n")
        assert err.value.field == "n"

    def test_missing_required(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text("env = ranking\nn = 3\nT = 10\nseeds = 1\n")
        assert err.value.field == "algo"

    def test_seed_override_and_list(self):
        cfg, _ = parse_config_text(MINIMAL, seeds_override=[5, 9])
        assert cfg.seeds == [5, 9]
        cfg, _ = parse_config_text(MINIMAL.replace("seeds = 3", "seed_list = 4, 2"))
        assert cfg.seeds == [4, 2]

    def test_tabular_rows(self):
        text = ("env = tabular\nn = 2\nalgo = pege-t1\nT = 100\nseeds = 1\n"
                "reward_rows = 1, 0; 0, 1\nobserved = 0, 1\nmeans = 0.75, 0.25\n")
        cfg, _ = parse_config_text(text)
        assert cfg.reward_rows == [[1.0, 0.0], [0.0, 1.0]] and cfg.observed == [0, 1]

    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_format_round_trip(self, name):
        cfg = PRESETS[name]()
        again, _ = parse_config_text(format_config(cfg))
        assert again == cfg


class TestRunExperiment:
    def test_smoke_files(self, tmp_path):
        manifest = run_experiment(smoke(), tmp_path)
        names = sorted(p.name for p in tmp_path.iterdir())
        assert names == ["aggregate.csv", "config.txt", "manifest.txt", "seed_0.csv", "seed_1.csv",
                         "seed_2.csv", "summary.txt"]
        assert all(Path(f).exists() for f in manifest.files())
        assert Path(tmp_path / "seed_0.csv").read_text().startswith("round,cum_regret\n")
        assert Path(tmp_path / "aggregate.csv").read_text().startswith("round,cum_regret,stderr\n")

    def test_summary_contents(self, tmp_path):
        run_experiment(smoke(), tmp_path)
        s = read_summary(tmp_path / "summary.txt")
        assert float(s["beta_sigma"]) == pytest.approx(3**1.5, rel=1e-12)
        assert s["secondmax_calls"] == "0"
        assert int(s["argmax_calls"]) > 0
        assert float(s["gap"]) > 0

    def test_csv_round_trips_floats(self, tmp_path):
        cfg = smoke(seeds=1)
        run_experiment(cfg, tmp_path)
        curve = run_single(cfg, 0)
        data = read_curve(tmp_path / "seed_0.csv")
        assert np.array_equal(data["cum_regret"], curve.cum_regret)
        assert np.array_equal(data["round"].astype(int), curve.rounds)

    def test_summary_slope_same_code_path(self, tmp_path):
        cfg = PRESETS["theorem1-scaling"](seeds=3, horizon=20_000)
        curves = [run_single(cfg, s) for s in cfg.seeds]
        summary = summarize(cfg, curves)
        rounds, mean, _ = aggregate(curves)
        assert summary["slope"] == fmt(fit_scaling_exponent(rounds, mean, 200.0))

    def test_rerun_byte_identical(self, tmp_path):
        run_experiment(smoke(), tmp_path / "a")
        run_experiment(smoke(), tmp_path / "b", jobs=2)
        for name in ("seed_0.csv", "seed_1.csv", "seed_2.csv", "aggregate.csv", "summary.txt"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_pege2_tied_tally(self, tmp_path):
        cfg = pege2_tied(seeds=20, horizon=20_000)
        run_experiment(cfg, tmp_path)
        s = read_summary(tmp_path / "summary.txt")
        assert int(s["outcome_threshold_exceeded"]) >= 19
        assert int(s["outcome_estimate"]) + int(s["outcome_threshold_exceeded"]) + int(s["outcome_truncated"]) == 20


class TestMain:
    def test_run_ok(self, tmp_path, capsys):
        cfg = tmp_path / "c.cfg"
        cfg.write_text(MINIMAL)
        assert main(["run", str(cfg), "--out", str(tmp_path / "out")]) == 0
        assert "beta_sigma" in capsys.readouterr().out

    def test_config_error_exit_1(self, tmp_path, capsys):
        cfg = tmp_path / "c.cfg"
        cfg.write_text(MINIMAL + "bogus = 1\n")
        assert main(["run", str(cfg), "--out", str(tmp_path / "out")]) == 1
        assert "line 7" in capsys.readouterr().err

    def test_runtime_error_exit_2(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text(MINIMAL)
        blocker = tmp_path / "file"
        blocker.write_text("not a directory")
        assert main(["run", str(cfg), "--out", str(blocker / "sub")]) == 2

    def test_missing_config_exit_2(self, tmp_path):
        assert main(["run", str(tmp_path / "nope.cfg"), "--out", str(tmp_path)]) == 2

    def test_preset_with_seeds(self, tmp_path):
        out = tmp_path / "p"
        assert main(["preset", "smoke", "--out", str(out), "--seeds", "4,8"]) == 0
        assert sorted(p.name for p in out.glob("seed_*.csv")) == ["seed_4.csv", "seed_8.csv"]

    def test_seed_flag_overrides_config(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text(MINIMAL)
        assert main(["run", str(cfg), "--out", str(tmp_path / "o"), "--seeds", "7"]) == 0
        assert [p.name for p in (tmp_path / "o").glob("seed_*.csv")] == ["seed_7.csv"]
