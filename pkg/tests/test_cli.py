"""Command-line surface: artifacts, manifests, exit codes."""

import json
import shutil
import subprocess

import numpy as np
import pytest

from smoothgl.cli import main
from smoothgl.data import MatrixSequence, read_precision_sequence, \
    write_precision_sequence
from smoothgl.presets import PRESET_NAMES
from smoothgl.simgen import EdgeStrengthLaw, GraphModel, Segment, SimScenario


def _write_series(path, T=40, p=3, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(T, p))
    with open(path, "w", encoding="utf-8") as fh:
        for row in X:
            fh.write(",".join(f"{v:.8f}" for v in row) + "\n")
    return path


def _tiny_scenario_file(path, seed=0):
    model = GraphModel(p=3, kind="erdos_renyi", theta=0.3)
    law = EdgeStrengthLaw("fixed", value=0.6)
    scenario = SimScenario((Segment(model, law, 8), Segment(model, law, 8)),
                           seed=seed)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario.to_json(), fh)
    return path


def _precision_from_edges(edges, p, w=0.25):
    m = np.zeros((p, p))
    for j, k in edges:
        m[j, k] = m[k, j] = w
    np.fill_diagonal(m, 1.0 + np.abs(m).sum(axis=1))
    return m


def _write_subject(path, rng, p=6, hub=0, hub_degree=4, T=8):
    # task-on times: a hub of the given degree plus one noise edge;
    # task-off times: the hub shrinks to a single edge.
    others = [v for v in range(p) if v != hub]
    noise = tuple(sorted(rng.choice(others, size=2, replace=False).tolist()))
    on_edges = {(hub, v) for v in others[:hub_degree]} | {noise}
    off_edges = {(hub, others[0]), noise}
    mats = [_precision_from_edges(on_edges if t < T // 2 else off_edges, p)
            for t in range(T)]
    write_precision_sequence(MatrixSequence(np.stack(mats), "precision"), path)
    return str(path)


class TestEstimate:
    def test_fixed_penalties_write_artifacts(self, tmp_path, capsys):
        data = _write_series(tmp_path / "d.csv")
        out = tmp_path / "out"
        rc = main(["estimate", "--input", str(data), "--h", "10",
                   "--kernel", "gaussian", "--lambda1", "0.1",
                   "--lambda2", "0.1", "--output", str(out)])
        assert rc == 0
        seq = read_precision_sequence(out / "precisions.json")
        assert (seq.T, seq.p) == (40, 3)
        edges = json.loads((out / "edges.json").read_text())
        assert edges["p"] == 3 and edges["T"] == 40
        assert len(edges["edges"]) == 40
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "estimate"
        assert manifest["config"]["h"] == 10.0
        assert manifest["result"]["converged"] is True
        assert manifest["result"]["chosen"] == {"h": 10.0, "lambda1": 0.1,
                                                "lambda2": 0.1}

    def test_auto_tune_records_tables(self, tmp_path):
        data = _write_series(tmp_path / "d.csv")
        out = tmp_path / "out"
        rc = main(["estimate", "--input", str(data), "--auto-tune",
                   "--h-grid", "5,10", "--lambda-grid", "0.1,0.3",
                   "--output", str(out)])
        assert rc == 0
        result = json.loads((out / "manifest.json").read_text())["result"]
        tuning = result["tuning"]
        assert {row["h"] for row in tuning["cv_table"]} == {5.0, 10.0}
        assert len(tuning["aic_table"]) == 4
        assert len(tuning["dof_table"]) == 4
        chosen = result["chosen"]
        assert chosen["h"] == tuning["chosen_h"]
        assert chosen["h"] in (5.0, 10.0)
        assert chosen["lambda1"] in (0.1, 0.3)
        assert chosen["lambda2"] in (0.1, 0.3)

    def test_missing_input_file_exits_1(self, tmp_path, capsys):
        rc = main(["estimate", "--input", str(tmp_path / "absent.csv"),
                   "--h", "5", "--lambda1", "0.1", "--lambda2", "0.1",
                   "--output", str(tmp_path / "out")])
        assert rc == 1
        assert "absent.csv" in capsys.readouterr().err

    def test_penalties_required_without_auto_tune(self, tmp_path, capsys):
        data = _write_series(tmp_path / "d.csv")
        rc = main(["estimate", "--input", str(data), "--h", "5",
                   "--lambda1", "0.1", "--output", str(tmp_path / "out")])
        assert rc == 1
        assert "--lambda2" in capsys.readouterr().err

    def test_malformed_csv_exits_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("1.0,2.0\n3.0,oops\n")
        rc = main(["estimate", "--input", str(bad), "--h", "5",
                   "--lambda1", "0.1", "--lambda2", "0.1",
                   "--output", str(tmp_path / "out")])
        assert rc == 1
        assert "bad.csv" in capsys.readouterr().err

    def test_nonconvergence_exits_2_with_outputs(self, tmp_path, capsys):
        data = _write_series(tmp_path / "d.csv")
        out = tmp_path / "out"
        rc = main(["estimate", "--input", str(data), "--h", "10",
                   "--lambda1", "0.1", "--lambda2", "0.1",
                   "--max-iter", "1", "--output", str(out)])
        assert rc == 2
        assert "did not converge" in capsys.readouterr().err
        assert (out / "precisions.json").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["result"]["converged"] is False

    def test_from_manifest_reproduces_bytes(self, tmp_path):
        data = _write_series(tmp_path / "d.csv")
        first = tmp_path / "a"
        again = tmp_path / "b"
        argv = ["estimate", "--input", str(data), "--auto-tune",
                "--h-grid", "5,10", "--lambda-grid", "0.1,0.3",
                "--output", str(first)]
        assert main(argv) == 0
        assert main(["estimate", "--from-manifest",
                     str(first / "manifest.json"),
                     "--output", str(again)]) == 0
        for name in ("precisions.json", "edges.json", "manifest.json"):
            assert (first / name).read_bytes() == (again / name).read_bytes()


class TestSimulate:
    def test_preset_layout(self, tmp_path):
        out = tmp_path / "out"
        rc = main(["simulate", "--scenario", "sim1a", "--seed", "7",
                   "--output", str(out)])
        assert rc == 0
        rows = (out / "data.csv").read_text().splitlines()
        assert len(rows) == 300
        assert all(len(r.split(",")) == 10 for r in rows)
        truth = json.loads((out / "truth.json").read_text())
        assert truth["change_points"] == [100, 200]
        assert truth["p"] == 10 and truth["T"] == 300
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "simulate"
        assert manifest["config"]["seed"] == 7

    def test_cyclic_preset_repeats_first_segment(self, tmp_path):
        out = tmp_path / "out"
        assert main(["simulate", "--scenario", "sim2a", "--seed", "3",
                     "--output", str(out)]) == 0
        truth = json.loads((out / "truth.json").read_text())
        assert truth["matrices"][0] == truth["matrices"][200]
        assert truth["edge_sets"][0] == truth["edge_sets"][200]
        assert truth["matrices"][0] != truth["matrices"][100]

    def test_same_seed_identical_bytes(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["simulate", "--scenario", "sim1b", "--seed", "11",
                         "--output", str(out)]) == 0
        for name in ("data.csv", "truth.json", "manifest.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_single_seed_env_overrides_flag(self, tmp_path, monkeypatch):
        plain = tmp_path / "plain"
        assert main(["simulate", "--scenario", "sim1a", "--seed", "7",
                     "--output", str(plain)]) == 0
        overridden = tmp_path / "env"
        monkeypatch.setenv("SINGLE_SEED", "7")
        assert main(["simulate", "--scenario", "sim1a", "--seed", "3",
                     "--output", str(overridden)]) == 0
        for name in ("data.csv", "truth.json"):
            assert (plain / name).read_bytes() == \
                (overridden / name).read_bytes()

    def test_invalid_single_seed_exits_1(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("SINGLE_SEED", "not-a-number")
        rc = main(["simulate", "--scenario", "sim1a",
                   "--output", str(tmp_path / "out")])
        assert rc == 1
        assert "SINGLE_SEED" in capsys.readouterr().err

    def test_unknown_preset_lists_available(self, tmp_path, capsys):
        rc = main(["simulate", "--scenario", "sim9z",
                   "--output", str(tmp_path / "out")])
        assert rc == 1
        err = capsys.readouterr().err
        for name in PRESET_NAMES:
            assert name in err

    def test_scenario_config_file(self, tmp_path):
        cfg = _tiny_scenario_file(tmp_path / "tiny.json")
        out = tmp_path / "out"
        assert main(["simulate", "--scenario", str(cfg), "--seed", "5",
                     "--output", str(out)]) == 0
        rows = (out / "data.csv").read_text().splitlines()
        assert len(rows) == 16
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["seed"] == 5

    def test_seglen_only_for_short_segment_presets(self, tmp_path, capsys):
        rc = main(["simulate", "--scenario", "sim1a", "--seglen", "10",
                   "--output", str(tmp_path / "out")])
        assert rc == 1
        assert "fixed segment length" in capsys.readouterr().err

    def test_from_manifest_reproduces_bytes(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["simulate", "--scenario", "sim3a", "--seed", "2",
                     "--seglen", "10", "--output", str(a)]) == 0
        assert main(["simulate", "--from-manifest", str(a / "manifest.json"),
                     "--output", str(b)]) == 0
        for name in ("data.csv", "truth.json", "manifest.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()


class TestBenchmark:
    def test_subset_run_and_artifacts(self, tmp_path):
        cfg = _tiny_scenario_file(tmp_path / "tiny.json")
        out = tmp_path / "out"
        rc = main(["benchmark", "--scenario", str(cfg), "--reps", "2",
                   "--methods", "sw", "--jobs", "1", "--h-grid", "4,8",
                   "--lambda-grid", "0.1,0.3", "--output", str(out)])
        assert rc == 0
        payload = json.loads((out / "benchmark.json").read_text())
        assert [m["name"] for m in payload["methods"]] == ["sw"]
        assert payload["reps"] == 2
        assert payload["dcr"] == "not implemented (out of scope)"
        assert (out / "curves.csv").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "benchmark"
        assert manifest["result"]["failures"] == 0

    def test_single_replicate_omits_interval(self, tmp_path):
        cfg = _tiny_scenario_file(tmp_path / "tiny.json")
        out = tmp_path / "out"
        rc = main(["benchmark", "--scenario", str(cfg), "--reps", "1",
                   "--methods", "sw", "--jobs", "1", "--h-grid", "4,8",
                   "--lambda-grid", "0.1,0.3", "--output", str(out)])
        assert rc == 0
        lines = (out / "curves.csv").read_text().splitlines()
        assert all(line.endswith(",,") for line in lines[1:])
        payload = json.loads((out / "benchmark.json").read_text())
        assert "ci_lo" not in payload["methods"][0]

    def test_unknown_method_exits_1(self, tmp_path, capsys):
        cfg = _tiny_scenario_file(tmp_path / "tiny.json")
        rc = main(["benchmark", "--scenario", str(cfg), "--reps", "1",
                   "--methods", "dcr", "--output", str(tmp_path / "out")])
        assert rc == 1
        assert "dcr" in capsys.readouterr().err

    def test_reps_required(self, tmp_path, capsys):
        cfg = _tiny_scenario_file(tmp_path / "tiny.json")
        rc = main(["benchmark", "--scenario", str(cfg),
                   "--output", str(tmp_path / "out")])
        assert rc == 1
        assert "--reps" in capsys.readouterr().err

    def test_seglen_flows_into_scenario(self, tmp_path):
        out = tmp_path / "out"
        rc = main(["benchmark", "--scenario", "sim3a", "--seglen", "30",
                   "--reps", "1", "--methods", "single", "--jobs", "1",
                   "--h-grid", "10,20", "--lambda-grid", "0.3",
                   "--output", str(out)])
        assert rc == 0
        payload = json.loads((out / "benchmark.json").read_text())
        assert [s["length"] for s in payload["scenario"]["segments"]] == \
            [30, 30, 30]
        assert len(payload["methods"][0]["mean_f_per_time"]) == 90

    def test_from_manifest_reproduces_results(self, tmp_path):
        cfg = _tiny_scenario_file(tmp_path / "tiny.json")
        a, b = tmp_path / "a", tmp_path / "b"
        argv = ["benchmark", "--scenario", str(cfg), "--reps", "2",
                "--methods", "single,sw", "--jobs", "1", "--h-grid", "4,8",
                "--lambda-grid", "0.1,0.3", "--output", str(a)]
        assert main(argv) == 0
        assert main(["benchmark", "--from-manifest", str(a / "manifest.json"),
                     "--output", str(b)]) == 0
        assert (a / "curves.csv").read_bytes() == (b / "curves.csv").read_bytes()
        assert (a / "manifest.json").read_bytes() == \
            (b / "manifest.json").read_bytes()

        def strip(obj):
            if isinstance(obj, dict):
                return {k: strip(v) for k, v in obj.items()
                        if k not in ("runtime_seconds", "mean_runtime_seconds")}
            if isinstance(obj, list):
                return [strip(v) for v in obj]
            return obj

        pa = json.loads((a / "benchmark.json").read_text())
        pb = json.loads((b / "benchmark.json").read_text())
        assert strip(pa) == strip(pb)


class TestAnalyze:
    @pytest.fixture()
    def subjects(self, tmp_path):
        rng = np.random.default_rng(7)
        return [
            _write_subject(tmp_path / f"s{i:02d}.json", rng)
            for i in range(24)
        ]

    def _schedule(self, tmp_path, intervals):
        path = tmp_path / "schedule.json"
        path.write_text(json.dumps(intervals))
        return str(path)

    def test_planted_hub_flagged(self, tmp_path, subjects):
        sched = self._schedule(tmp_path, [[0, 4, "on"], [4, 8, "off"]])
        out = tmp_path / "out"
        rc = main(["analyze", "--subjects", *subjects, "--schedule", sched,
                   "--output", str(out)])
        assert rc == 0
        payload = json.loads((out / "analysis.json").read_text())
        assert payload["n_subjects"] == 24
        assert payload["n_on_times"] == 4 and payload["n_off_times"] == 4
        nodes = payload["nodes"]
        assert [n["id"] for n in nodes] == list(range(6))
        for key in ("betweenness_on", "betweenness_off", "pct_change",
                    "p", "p_adj", "significant"):
            assert key in nodes[0]
        assert nodes[0]["significant"] is True
        assert nodes[0]["pct_change"] > 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert 0 in manifest["result"]["significant_nodes"]

    def test_schedule_gap_named(self, tmp_path, subjects, capsys):
        sched = self._schedule(tmp_path, [[0, 4, "on"], [6, 8, "off"]])
        rc = main(["analyze", "--subjects", *subjects, "--schedule", sched,
                   "--output", str(tmp_path / "out")])
        assert rc == 1
        assert "[4, 6)" in capsys.readouterr().err

    def test_uncovered_tail_named(self, tmp_path, subjects, capsys):
        sched = self._schedule(tmp_path, [[0, 4, "on"]])
        rc = main(["analyze", "--subjects", *subjects, "--schedule", sched,
                   "--output", str(tmp_path / "out")])
        assert rc == 1
        assert "[4, 8)" in capsys.readouterr().err

    def test_overlap_rejected(self, tmp_path, subjects, capsys):
        sched = self._schedule(tmp_path, [[0, 5, "on"], [4, 8, "off"]])
        rc = main(["analyze", "--subjects", *subjects, "--schedule", sched,
                   "--output", str(tmp_path / "out")])
        assert rc == 1
        assert "overlap" in capsys.readouterr().err

    def test_missing_label_rejected(self, tmp_path, subjects, capsys):
        sched = self._schedule(tmp_path, [[0, 8, "on"]])
        rc = main(["analyze", "--subjects", *subjects, "--schedule", sched,
                   "--off-label", "rest", "--output", str(tmp_path / "out")])
        assert rc == 1
        assert "rest" in capsys.readouterr().err

    def test_malformed_schedule_rejected(self, tmp_path, subjects, capsys):
        sched = self._schedule(tmp_path, [[0, "eight", "on"]])
        rc = main(["analyze", "--subjects", *subjects, "--schedule", sched,
                   "--output", str(tmp_path / "out")])
        assert rc == 1
        assert "integers" in capsys.readouterr().err

    def test_subject_shape_mismatch_rejected(self, tmp_path, subjects, capsys):
        odd = tmp_path / "odd.json"
        mats = np.stack([np.eye(4)] * 8)
        write_precision_sequence(MatrixSequence(mats, "precision"), odd)
        sched = self._schedule(tmp_path, [[0, 4, "on"], [4, 8, "off"]])
        rc = main(["analyze", "--subjects", *subjects, str(odd),
                   "--schedule", sched, "--output", str(tmp_path / "out")])
        assert rc == 1
        assert "odd.json" in capsys.readouterr().err

    def test_from_manifest_reproduces_bytes(self, tmp_path, subjects):
        sched = self._schedule(tmp_path, [[0, 4, "on"], [4, 8, "off"]])
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["analyze", "--subjects", *subjects, "--schedule", sched,
                     "--output", str(a)]) == 0
        assert main(["analyze", "--from-manifest", str(a / "manifest.json"),
                     "--output", str(b)]) == 0
        assert (a / "analysis.json").read_bytes() == \
            (b / "analysis.json").read_bytes()
        assert (a / "manifest.json").read_bytes() == \
            (b / "manifest.json").read_bytes()


class TestTopLevel:
    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert "smoothgl" in capsys.readouterr().out

    def test_no_command_exits_1(self, capsys):
        assert main([]) == 1
        assert "command" in capsys.readouterr().err

    def test_console_script_installed(self):
        exe = shutil.which("smoothgl")
        assert exe is not None
        proc = subprocess.run([exe, "--version"], capture_output=True,
                              text=True)
        assert proc.returncode == 0
        assert "smoothgl" in proc.stdout

    def test_wrong_manifest_command_rejected(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["simulate", "--scenario", "sim1a",
                     "--output", str(out)]) == 0
        rc = main(["estimate", "--from-manifest", str(out / "manifest.json"),
                   "--output", str(tmp_path / "b")])
        assert rc == 1
        assert "simulate" in capsys.readouterr().err
