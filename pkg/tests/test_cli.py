import json

import numpy as np
import pytest

from chainclust.cli import main


@pytest.fixture()
def circles_csv(tmp_path):
    path = tmp_path / "circles.csv"
    code = main(["generate", "--n-per-circle", "12", "--radii", "0.5,4,9",
                 "--noise-std", "0.2", "--seed", "3", "-o", str(path)])
    assert code == 0
    return path


class TestGenerate:
    def test_writes_expected_rows(self, circles_csv):
        lines = circles_csv.read_text().strip().splitlines()
        assert lines[0] == "x,y,label"
        assert len(lines) == 1 + 36

    def test_deterministic_output(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        for out in (a, b):
            main(["generate", "--seed", "9", "--n-per-circle", "5", "-o", str(out)])
        assert a.read_bytes() == b.read_bytes()

    def test_noise_zero_is_exact(self, tmp_path):
        out = tmp_path / "c.csv"
        main(["generate", "--seed", "1", "--n-per-circle", "8",
              "--radii", "1,5", "--noise-std", "0", "-o", str(out)])
        rows = np.loadtxt(out, delimiter=",", skiprows=1)
        radius = np.hypot(rows[:, 0], rows[:, 1])
        expected = np.where(rows[:, 2] == 1, 1.0, 5.0)
        assert np.max(np.abs(radius - expected)) <= 1e-12


class TestConstraintsCommand:
    def test_zero_fraction_empty_file(self, circles_csv, tmp_path):
        out = tmp_path / "c.txt"
        code = main(["constraints", "--data", str(circles_csv), "--label-col", "label",
                     "--fraction", "0", "-o", str(out)])
        assert code == 0
        assert out.read_text() == ""

    def test_pair_count(self, circles_csv, tmp_path):
        out = tmp_path / "c.txt"
        main(["constraints", "--data", str(circles_csv), "--label-col", "label",
              "--fraction", "0.5", "--seed", "2", "-o", str(out)])
        lines = [l for l in out.read_text().splitlines() if l.strip()]
        m = round(0.5 * 36)
        assert len(lines) == m * (m - 1) // 2

    def test_determinism(self, circles_csv, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        for out in (a, b):
            main(["constraints", "--data", str(circles_csv), "--label-col", "label",
                  "--fraction", "0.3", "--seed", "4", "-o", str(out)])
        assert a.read_text() == b.read_text()


class TestCluster:
    def test_end_to_end_json(self, circles_csv, tmp_path):
        out = tmp_path / "result.json"
        code = main(["cluster", "--data", str(circles_csv), "--label-col", "label",
                     "--k", "5", "--runs", "2", "--seed", "1", "-o", str(out)])
        assert code == 0
        result = json.loads(out.read_text())
        assert len(result["assignments"]) == 36
        assert set(result["assignments"]) <= {1, 2, 3}
        assert "nmi_mean" in result
        assert len(result["runs"]) == 2
        assert result["config"]["K"] == 3
        assert {"h_cond_agg", "h_cond_full", "mutual_info"} <= set(result["cost_terms"])
        assert result["stage_trace"][0][0] == 1.0

    def test_constraint_file_respected(self, circles_csv, tmp_path):
        cfile = tmp_path / "c.txt"
        main(["constraints", "--data", str(circles_csv), "--label-col", "label",
              "--fraction", "0.4", "--seed", "5", "-o", str(cfile)])
        out = tmp_path / "result.json"
        code = main(["cluster", "--data", str(circles_csv), "--K", "3",
                     "--constraints", str(cfile), "--k", "5", "--runs", "1",
                     "--seed", "1", "-o", str(out)])
        assert code == 0
        result = json.loads(out.read_text())
        assert result["violations"] == {"must": 0, "cannot": 0}

    def test_contradictory_constraints_exit_one(self, circles_csv, tmp_path, capsys):
        cfile = tmp_path / "bad.txt"
        cfile.write_text("ML 0 1\nML 1 2\nCL 0 2\n", encoding="utf-8")
        code = main(["cluster", "--data", str(circles_csv), "--K", "3",
                     "--constraints", str(cfile), "--k", "5", "--runs", "1"])
        assert code == 1
        err = capsys.readouterr().err
        assert "clique" in err and "(0, 2)" in err

    def test_missing_k_and_labels_exit_one(self, circles_csv, capsys):
        code = main(["cluster", "--data", str(circles_csv), "--k", "5", "--runs", "1"])
        assert code == 1
        assert "--K" in capsys.readouterr().err

    def test_missing_file_exit_one(self, tmp_path, capsys):
        code = main(["cluster", "--data", str(tmp_path / "nope.csv"), "--K", "2"])
        assert code == 1

    def test_rerun_reproduces_output(self, circles_csv, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["cluster", "--data", str(circles_csv), "--label-col", "label",
                "--k", "5", "--runs", "2", "--seed", "7"]
        main(args + ["-o", str(a)])
        main(args + ["-o", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_emitted_config_round_trips(self, circles_csv, tmp_path):
        first = tmp_path / "first.json"
        main(["cluster", "--data", str(circles_csv), "--label-col", "label",
              "--k", "5", "--runs", "2", "--seed", "3", "-o", str(first)])
        cfg = json.loads(first.read_text())["config"]
        argv = ["cluster", "--data", cfg["data"], "--label-col", cfg["label_col"],
                "--K", str(cfg["K"]), "--k", str(cfg["k"]),
                "--beta-target", str(cfg["beta_target"]), "--delta", str(cfg["delta"]),
                "--iter-max", str(cfg["iter_max"]), "--seed", str(cfg["seed"]),
                "--runs", str(cfg["runs"]),
                "--scale-power", str(cfg["scale_power"]),
                "--anneal" if cfg["anneal"] else "--no-anneal"]
        second = tmp_path / "second.json"
        assert main(argv + ["-o", str(second)]) == 0
        assert json.loads(second.read_text())["assignments"] == \
            json.loads(first.read_text())["assignments"]
        assert json.loads(second.read_text())["cost"] == \
            json.loads(first.read_text())["cost"]

    def test_seq_mode_and_preprocessing(self, circles_csv, tmp_path):
        out = tmp_path / "r.json"
        code = main(["cluster", "--data", str(circles_csv), "--label-col", "label",
                     "--normalize", "--pca", "2", "--no-anneal", "--k", "5",
                     "--runs", "1", "-o", str(out)])
        assert code == 0
        result = json.loads(out.read_text())
        assert len(result["stage_trace"]) == 1

    def test_scale_power_flag(self, circles_csv, tmp_path):
        a, b = tmp_path / "p1.json", tmp_path / "p2.json"
        base = ["cluster", "--data", str(circles_csv), "--label-col", "label",
                "--k", "5", "--runs", "1", "--seed", "1"]
        main(base + ["--scale-power", "1", "-o", str(a)])
        main(base + ["--scale-power", "2", "-o", str(b)])
        ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
        assert ra["sigma_k"] == rb["sigma_k"]
        assert ra["cost"] != rb["cost"]  # different kernel denominators

    def test_dump_model(self, circles_csv, tmp_path):
        dump = tmp_path / "dump"
        main(["cluster", "--data", str(circles_csv), "--label-col", "label",
              "--k", "5", "--runs", "1", "--dump-model", str(dump),
              "-o", str(tmp_path / "r.json")])
        w = np.loadtxt(dump / "W.csv", delimiter=",")
        assert w.shape == (36, 36)
        assert np.allclose(np.diag(w), 1.0)


class TestSweepCommand:
    def test_csv_output_shape(self, circles_csv, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(["sweep", "--data", str(circles_csv), "--label-col", "label",
                     "--axis", "fraction", "--grid", "0,0.3", "--k", "5",
                     "--runs", "2", "--seed", "1", "-o", str(out)])
        assert code == 0
        lines = out.read_text().strip().splitlines()
        # header + 2 grid values x (2 runs + mean + std)
        assert len(lines) == 1 + 2 * 4

    def test_json_output(self, circles_csv, tmp_path):
        out = tmp_path / "sweep.json"
        code = main(["sweep", "--data", str(circles_csv), "--label-col", "label",
                     "--axis", "beta", "--grid", "1.0,0.5", "--k", "5",
                     "--runs", "1", "--format", "json", "-o", str(out)])
        assert code == 0
        data = json.loads(out.read_text())
        assert len(data) == 2
        assert data[0]["config"]["axis"] == "beta"

    def test_n_constraints_axis(self, circles_csv, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(["sweep", "--data", str(circles_csv), "--label-col", "label",
                     "--axis", "n-constraints", "--grid", "0.2,0.5", "--k", "5",
                     "--runs", "1", "-o", str(out)])
        assert code == 0

    def test_ablation_flags_accepted(self, circles_csv, tmp_path):
        code = main(["sweep", "--data", str(circles_csv), "--label-col", "label",
                     "--axis", "fraction", "--grid", "0.3", "--k", "5", "--runs", "1",
                     "--no-propagate-must", "--no-cannot",
                     "-o", str(tmp_path / "s.csv")])
        assert code == 0
