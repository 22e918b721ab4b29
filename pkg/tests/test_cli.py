import csv
import json

import numpy as np
import pytest

from balanced_f1.cli import main, read_series_csv, write_series_csv
from balanced_f1.series import labels_from_segments


def series(path, labels, scores=None):
    with open(path, "w", newline="") as fh:
        write_series_csv(fh, labels, scores)
    return str(path)


def parse(out):
    return {k: float(v) for k, v in (line.split() for line in out.strip().splitlines())}


@pytest.fixture
def worked(tmp_path):
    return (series(tmp_path / "t.csv", [0, 0, 1, 1, 1, 0, 0, 0, 0, 0]),
            series(tmp_path / "p.csv", [0, 0, 0, 1, 0, 0, 0, 1, 0, 0]))


class TestEvaluate:
    def test_worked_example(self, worked, capsys):
        assert main(["evaluate", *worked, "--island-width", "3"]) == 0
        m = parse(capsys.readouterr().out)
        assert m["f1_p"] == pytest.approx(0.4, abs=1e-6)
        assert m["f1_pa"] == pytest.approx(0.8571, abs=1e-4)
        assert m["f1_ba"] == pytest.approx(0.6667, abs=1e-4)

    def test_three_event_fixture(self, tmp_path, capsys):
        truth = labels_from_segments([(10, 5), (40, 5), (70, 5)], 100)
        pred = np.zeros(100, int)
        pred[[12, 41, 74]] = 1
        assert main(["evaluate", series(tmp_path / "t.csv", truth), series(tmp_path / "p.csv", pred),
                     "--k-percent", "40", "--island-auto"]) == 0
        m = parse(capsys.readouterr().out)
        assert m["f1_pa"] == 1.0 and m["f1_ba"] == 1.0
        assert m["f1_p"] == pytest.approx(1 / 3, abs=1e-6)
        assert m["f1_kpa"] < 1

    def test_identity(self, tmp_path, capsys):
        t = series(tmp_path / "t.csv", [0, 1, 1, 0, 0, 1, 0])
        assert main(["evaluate", t, t]) == 0
        m = parse(capsys.readouterr().out)
        assert all(m[k] == 1.0 for k in ("f1_p", "f1_pa", "f1_kpa", "f1_ba", "precision_E", "recall_E"))

    def test_scores_need_gamma(self, tmp_path):
        t = series(tmp_path / "t.csv", [0, 1, 0], [0.1, 0.9, 0.2])
        assert main(["evaluate", t]) == 1
        assert main(["evaluate", t, "--gamma", "0.5"]) == 0

    def test_scores_report_separation(self, tmp_path, capsys):
        t = series(tmp_path / "t.csv", [0, 1, 1, 0], [0.1, 0.9, 0.8, 0.2])
        main(["evaluate", t, "--gamma", "0.5", "--out", str(tmp_path / "m.csv")])
        assert parse(capsys.readouterr().out)["separation"] == 1.0
        rows = list(csv.reader(open(tmp_path / "m.csv")))
        assert rows[0] == ["metric", "value"] and ["f1_ba", "1.0"] in rows

    def test_length_mismatch(self, tmp_path, capsys):
        assert main(["evaluate", series(tmp_path / "a.csv", [0, 1]), series(tmp_path / "b.csv", [0, 1, 0])]) == 2
        assert "length mismatch" in capsys.readouterr().err

    @pytest.mark.parametrize("text", ["time,label\n0,1\n", "t,label\n0,1\n2,0\n", "t,label\n0,x\n",
                                      "t,label\n0,3\n", "t,label,score\n0,1,1.5\n"])
    def test_parse_errors(self, tmp_path, text):
        bad = tmp_path / "bad.csv"
        bad.write_text(text)
        assert main(["evaluate", str(bad), str(bad)]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["evaluate", str(tmp_path / "nope.csv"), str(tmp_path / "nope.csv")]) == 2

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as exc:
            main(["evaluate"])
        assert exc.value.code == 1


class TestTheory:
    def read(self, capsys):
        return list(csv.DictReader(capsys.readouterr().out.splitlines()))

    def test_pa_inflation_curve(self, capsys):
        assert main(["theory", "--q", "0.2", "--w-a", "100", "--w-n", "100"]) == 0
        rows = self.read(capsys)
        assert list(rows[0]) == ["q", "gamma", "f1_pa", "f1_ba", "precision_pa", "precision_ba", "recall"]
        assert len(rows) == 48
        assert max(float(r["f1_pa"]) for r in rows) > 0.75
        assert max(float(r["f1_ba"]) for r in rows) < 0.5

    def test_unit_island_matches_pa(self, capsys):
        main(["theory", "--w-n", "1"])
        assert all(r["f1_ba"] == r["f1_pa"] for r in self.read(capsys))

    def test_chance_plateau(self, capsys):
        main(["theory", "--q", "0.3333333333333333", "--gamma-grid", "0.3:0.7:0.1"])
        assert all(abs(float(r["f1_ba"]) - 0.5) < 1e-6 for r in self.read(capsys))

    def test_gaussian_noise(self, capsys):
        assert main(["theory", "--q", "0.2", "--gamma-grid", "0.5", "--noise", "gaussian:0.5,0.1"]) == 0
        assert len(self.read(capsys)) == 1

    def test_bad_noise(self):
        assert main(["theory", "--noise", "cauchy"]) == 1

    def test_bad_q(self):
        assert main(["theory", "--q", "1.5"]) == 1


class TestSweepAndReport:
    def spec(self, tmp_path):
        doc = {"ground_truth": {"T": 800, "n_events": [1, 2], "width_range": [20, 40], "min_gap": 20},
               "score": {"detect_prob": [0.5, 1.0], "n_false_events": [0, 3], "false_width_range": [1, 5],
                         "separation": [0.0, 1.0], "coverage_range": [0.2, 1.0]},
               "run_count": 10, "master_seed": 3}
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(doc))
        return str(path)

    def test_sweep_is_byte_identical(self, tmp_path):
        spec = self.spec(tmp_path)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["sweep", spec, "--out", str(a), "--quiet"]) == 0
        assert main(["sweep", spec, "--out", str(b), "--quiet", "--workers", "2"]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert len(a.read_text().splitlines()) == 11

    def test_seed_flag_and_env(self, tmp_path, monkeypatch, capsys):
        main(["sweep", "--dump-spec", "--seed", "99"])
        assert json.loads(capsys.readouterr().out)["master_seed"] == 99
        monkeypatch.setenv("BALANCED_F1_SEED", "42")
        main(["sweep", "--dump-spec"])
        assert json.loads(capsys.readouterr().out)["master_seed"] == 42

    def test_bad_spec(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["sweep", str(bad), "--out", str(tmp_path / "x.csv")]) == 2

    def test_report(self, tmp_path):
        runs = tmp_path / "runs.csv"
        main(["sweep", self.spec(tmp_path), "--out", str(runs), "--quiet"])
        assert main(["report", str(runs), "--out", str(tmp_path / "rep")]) == 0
        assert {p.name for p in (tmp_path / "rep").iterdir()} == {
            "aggregate.csv", "separation_study.csv", "separation_study.svg", "precision_study.csv",
            "precision_study.svg", "recall_study.csv", "recall_study.svg"}

    def test_report_bad_input(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        assert main(["report", str(bad), "--out", str(tmp_path / "r")]) == 2


class TestSimulate:
    def test_series_output(self, tmp_path):
        out = tmp_path / "s.csv"
        assert main(["simulate", "--T", "300", "--n-events", "2", "--width", "20", "30",
                     "--seed", "5", "--out", str(out)]) == 0
        labels, scores = read_series_csv(out)
        assert len(labels) == 300 and scores is not None
        assert 40 <= labels.sum() <= 60

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (a, b):
            main(["simulate", "--seed", "1", "--separation", "0.5", "--n-false", "3", "--out", str(p)])
        assert a.read_bytes() == b.read_bytes()

    def test_infeasible(self, tmp_path):
        assert main(["simulate", "--T", "50", "--n-events", "5", "--out", str(tmp_path / "s.csv")]) == 2
