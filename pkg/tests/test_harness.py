import json

import pytest

from ndpong.cli import EXIT_INVALID, EXIT_IO, EXIT_OK, EXIT_TEACHER, main
from ndpong.env import ConfigError, GameConfig, Response as R, UsageError
from ndpong.harness import (
    ElmanSettings,
    ExperimentConfig,
    Report,
    TeacherLearner,
    evaluate,
    generate_game_set,
    load_traces,
    loads_traces,
    dumps_traces,
    mean_score,
    render_trace,
    run_experiment,
    score_game,
)
from ndpong.teacher import generate_trace

from conftest import GOLDEN


def small_config(**kw):
    base = dict(n_train=3, n_test=3, elman=ElmanSettings(epochs=20))
    base.update(kw)
    return ExperimentConfig(**base)


class TestScoring:
    def test_eighty_percent(self):
        teacher = [R.CHECK_BALL, R.PAN_RIGHT] * 5
        learner = teacher[:8] + [R.PAN_LEFT, R.PAN_RIGHT]
        s = score_game(learner, teacher)
        assert (s.teacher_len, s.prefix_len, s.score) == (10, 8, 80.0)

    def test_identical(self):
        teacher = [R.CHECK_BALL] * 7
        assert score_game(teacher, teacher).score == 100.0

    def test_first_wrong(self):
        assert score_game([R.PAN_LEFT, R.CHECK_BALL], [R.CHECK_BALL, R.CHECK_BALL]).score == 0.0

    def test_short_learner(self):
        assert score_game([R.CHECK_BALL], [R.CHECK_BALL] * 4).score == 25.0

    def test_empty(self):
        with pytest.raises(UsageError):
            score_game([], [])


class TestGameSets:
    def test_fifty_wins(self, train_set):
        assert len(train_set) == 50 and all(t.final_outcome == "Win" for t in train_set)

    def test_prefix_stable(self, config, train_set):
        one = generate_game_set(1000, 1, config)[0]
        assert one.responses == train_set[0].responses and one.seed == train_set[0].seed

    def test_diverse(self, train_set, test_set):
        assert len({len(t) for t in train_set}) >= 2
        assert len({len(t) for t in test_set}) >= 2

    def test_teacher_failure_diagnosed(self):
        with pytest.raises(Exception, match="ball_period"):
            generate_game_set(0, 50, GameConfig(ball_period=1))

    def test_disjoint_seeds(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(train_seed_base=0, test_seed_base=10, n_train=50)
        ExperimentConfig(train_seed_base=0, test_seed_base=50, n_train=50)


def test_teacher_control(train_set, test_set):
    for games in (train_set, test_set):
        assert all(s.score == 100 for s in evaluate(TeacherLearner(), games))


class TestTraceFiles:
    def test_round_trip(self, train_set):
        text = dumps_traces(train_set[:5])
        back = loads_traces(text)
        assert dumps_traces(back) == text
        for a, b in zip(train_set, back):
            assert a.responses == b.responses and a.observations == b.observations
            assert a.final_observation == b.final_observation and a.config == b.config

    def test_record_fields(self, config):
        lines = dumps_traces([generate_trace(config, 3)]).splitlines()
        header, step = json.loads(lines[0]), json.loads(lines[1])
        assert header["type"] == "header" and header["seed"] == 3
        assert set(step) == {"turn", "ball", "paddle_row", "attention", "observation", "response", "outcome"}

    def test_bad_file(self):
        with pytest.raises(ConfigError):
            loads_traces('{"turn": 0}\n')


class TestRender:
    def test_initial_frame(self, config):
        frames = render_trace(generate_trace(config, 0)).split("\n\n")
        first = frames[0].splitlines()
        assert first[3] == "| .  . [o] .  | |"

    def test_frame_count(self, config):
        trace = generate_trace(config, 8)
        assert len(render_trace(trace).strip().split("\n\n")) == len(trace) + 1

    def test_golden(self, config):
        assert render_trace(generate_trace(config, 42)) == (GOLDEN / "render_seed42.txt").read_text()


class TestExperiment:
    def test_report_structure(self, tmp_path):
        report = run_experiment(small_config(out_dir=str(tmp_path)))
        assert set(report.scores) == {
            (m, s) for m in ("teacher", "elman", "goalseeker") for s in ("train", "test")
        }
        for key, scores in report.scores.items():
            assert report.means()[key] == pytest.approx(mean_score(scores))
        for name in ("scores.csv", "report.json", "automaton.dot", "traces/train.jsonl", "models/elman.npz"):
            assert (tmp_path / name).exists()
        assert len(load_traces(tmp_path / "traces" / "test.jsonl")) == 3

    def test_degenerate(self):
        report = run_experiment(small_config(n_train=1, n_test=1))
        assert all(len(v) == 1 for v in report.scores.values())

    def test_deterministic_table(self):
        a = run_experiment(small_config()).score_table()
        b = run_experiment(small_config()).score_table()
        assert a == b

    def test_table_format(self):
        table = run_experiment(small_config()).score_table()
        assert table.splitlines()[0] == "model,set,game_id,teacher_len,prefix_len,score"
        assert "# summary" in table

    def test_config_round_trip(self, tmp_path):
        cfg = small_config()
        path = tmp_path / "c.json"
        path.write_text(json.dumps(cfg.to_dict()))
        assert ExperimentConfig.load(path) == cfg

    def test_report_means_summary(self):
        report = Report({("teacher", "train"): [], ("teacher", "test"): []}, small_config())
        report.scores = run_experiment(small_config()).scores
        assert "teacher" in report.summary()


class TestCli:
    def test_gen_train_eval(self, tmp_path, capsys):
        assert main(["gen", "--games", "4", "--out", str(tmp_path)]) == EXIT_OK
        traces = str(tmp_path / "traces.jsonl")
        assert main(["train", "--model", "goalseeker", "--traces", traces, "--out", str(tmp_path)]) == EXIT_OK
        assert main(["train", "--model", "elman", "--epochs", "10", "--traces", traces, "--out", str(tmp_path)]) == 0
        capsys.readouterr()
        assert main(["eval", "--model", "goalseeker", "--model-file", str(tmp_path / "goalseeker.tsv"),
                     "--traces", traces]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("model,set,game_id") and "goalseeker,eval,4,100.0000" in out
        assert main(["eval", "--model", "elman", "--model-file", str(tmp_path / "elman.npz"),
                     "--traces", traces, "--out", str(tmp_path / "ev")]) == EXIT_OK
        assert (tmp_path / "ev" / "scores.csv").exists()

    def test_run_same_config_same_bytes(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps(small_config().to_dict()))
        for d in ("a", "b"):
            assert main(["run", "--config", str(cfg), "--out", str(tmp_path / d)]) == EXIT_OK
        assert (tmp_path / "a" / "scores.csv").read_bytes() == (tmp_path / "b" / "scores.csv").read_bytes()

    def test_render_and_automaton(self, tmp_path, capsys):
        assert main(["render", "--seed", "42", "--games", "1"]) == EXIT_OK
        assert capsys.readouterr().out == render_trace(generate_trace(GameConfig(), 42))
        assert main(["automaton", "--games", "10", "--out", str(tmp_path / "g.dot")]) == EXIT_OK
        assert (tmp_path / "g.dot").read_text().startswith("digraph")

    def test_exit_codes(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["gen", "--config", str(bad)]) == EXIT_INVALID
        assert main(["gen", "--games", "0"]) == EXIT_INVALID
        assert main(["gen", "--ball-period", "1", "--games", "50", "--out", str(tmp_path)]) == EXIT_TEACHER
        assert main(["gen", "--config", str(tmp_path / "missing.json")]) == EXIT_IO
        assert main(["eval", "--model", "elman", "--games", "2"]) == EXIT_INVALID


def test_seed_flag_keeps_ranges_disjoint(tmp_path):
    assert main(["gen", "--games", "3", "--seed", "100000", "--out", str(tmp_path)]) == EXIT_OK
    seeds = [t.seed for t in load_traces(tmp_path / "traces.jsonl")]
    assert seeds == [100000, 100001, 100002]
