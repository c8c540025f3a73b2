"""Experiment driver: game sets, prefix scoring, reports, trace files, rendering."""

from __future__ import annotations

import csv
import io
import json
import logging
import platform
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from statistics import fmean

import numpy as np

from . import __version__
from .elman import ElmanNet, init_network, sequences_from_traces, train
from .env import (
    ConfigError,
    GameConfig,
    Outcome,
    Response,
    SensorReading,
    UsageError,
)
from .goal_seeker import ColdStartError, GoalConfig, GoalSeeker, TransitionModel, train_from_traces
from .teacher import (
    EMPTY_MEMORY,
    Trace,
    TraceStep,
    TeacherFailure,
    extract_automaton,
    generate_trace,
    teacher_policy,
)

log = logging.getLogger(__name__)


# -- configuration -----------------------------------------------------------


@dataclass(frozen=True)
class ElmanSettings:
    epochs: int = 5000
    lr: float = 0.2
    init_seed: int = 0
    init_range: float = 0.5
    context_init: float = 0.5
    hidden: int = 20
    shuffle: bool = True


@dataclass(frozen=True)
class GoalSeekerSettings:
    K: int = 3
    horizon: int = 12
    discount: float = 0.9


@dataclass(frozen=True)
class ExperimentConfig:
    env: GameConfig = field(default_factory=GameConfig)
    train_seed_base: int = 1000
    test_seed_base: int = 100000
    n_train: int = 50
    n_test: int = 50
    elman: ElmanSettings = field(default_factory=ElmanSettings)
    goal_seeker: GoalSeekerSettings = field(default_factory=GoalSeekerSettings)
    out_dir: str | None = None

    def __post_init__(self) -> None:
        if self.n_train < 1 or self.n_test < 1:
            raise ConfigError("n_train and n_test must be >= 1")
        train_end = self.train_seed_base + self.n_train
        test_end = self.test_seed_base + self.n_test
        if self.train_seed_base < test_end and self.test_seed_base < train_end:
            raise ConfigError(
                f"train seeds [{self.train_seed_base}, {train_end}) overlap "
                f"test seeds [{self.test_seed_base}, {test_end})"
            )

    def to_dict(self) -> dict:
        return {
            "env": self.env.to_dict(),
            "train_seed_base": self.train_seed_base,
            "test_seed_base": self.test_seed_base,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "elman": asdict(self.elman),
            "goal_seeker": asdict(self.goal_seeker),
            "out_dir": self.out_dir,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        try:
            if "env" in d:
                d["env"] = GameConfig.from_dict(d["env"])
            if "elman" in d:
                d["elman"] = ElmanSettings(**d["elman"])
            if "goal_seeker" in d:
                d["goal_seeker"] = GoalSeekerSettings(**d["goal_seeker"])
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(f"bad experiment config: {exc}") from exc

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        return cls.from_dict(data)


# -- game sets and scoring ---------------------------------------------------


def generate_game_set(base_seed: int, n: int, config: GameConfig) -> list[Trace]:
    """Winning teacher traces for seeds ``base_seed .. base_seed + n - 1``."""
    if n < 1:
        raise ConfigError("game set size must be >= 1")
    traces = []
    for seed in range(base_seed, base_seed + n):
        try:
            traces.append(generate_trace(config, seed))
        except TeacherFailure as exc:
            raise TeacherFailure(
                f"{exc}; the teacher only wins every game when the ball rests "
                f"long enough for its pan/move/pan chain (default ball_period=4)"
            ) from exc
    return traces


@dataclass(frozen=True)
class GameScore:
    game_id: int
    teacher_len: int
    prefix_len: int

    @property
    def score(self) -> float:
        return 100.0 * self.prefix_len / self.teacher_len


def score_game(learner_responses, teacher_trace: Trace | list, game_id: int | None = None) -> GameScore:
    """Percentage of initial consecutive responses that match the teacher."""
    if isinstance(teacher_trace, Trace):
        expected = teacher_trace.responses
        game_id = teacher_trace.seed if game_id is None else game_id
    else:
        expected = list(teacher_trace)
    if not expected:
        raise UsageError("cannot score against an empty teacher trace")
    prefix = 0
    for got, want in zip(learner_responses, expected):
        if Response(got) != want:
            break
        prefix += 1
    return GameScore(-1 if game_id is None else game_id, len(expected), prefix)


class TeacherLearner:
    """The oracle itself, used as a 100% control."""

    def reset(self) -> None:
        self.memory = EMPTY_MEMORY

    def respond(self, observation: SensorReading) -> Response:
        response, self.memory = teacher_policy(self.memory, observation)
        return response


class ElmanLearner:
    def __init__(self, net: ElmanNet):
        self.net = net

    def reset(self) -> None:
        self.net.reset_context()

    def respond(self, observation: SensorReading) -> Response:
        return self.net.predict_response(observation)


def evaluate(learner, games: list[Trace]) -> list[GameScore]:
    """Score ``learner`` on each game, streaming the teacher's observations.

    Up to the first mismatch the learner sees exactly what closed-loop play
    would show it, so the prefix score is the same either way.  A learner
    with no answer for an observation (cold start) ends its prefix there.
    """
    scores = []
    for trace in games:
        learner.reset()
        responses = []
        for obs in trace.observations:
            try:
                r = learner.respond(obs)
            except ColdStartError:
                break
            responses.append(r)
            if r != trace.steps[len(responses) - 1].response:
                break
        scores.append(score_game(responses, trace))
    return scores


def mean_score(scores: list[GameScore]) -> float:
    return fmean(s.score for s in scores)


# -- reports -----------------------------------------------------------------


@dataclass
class Report:
    scores: dict[tuple[str, str], list[GameScore]]
    config: ExperimentConfig
    metadata: dict = field(default_factory=dict)

    def means(self) -> dict[tuple[str, str], float]:
        return {k: mean_score(v) for k, v in self.scores.items()}

    def score_table(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["model", "set", "game_id", "teacher_len", "prefix_len", "score"])
        for (model, which), scores in self.scores.items():
            for s in scores:
                w.writerow([model, which, s.game_id, s.teacher_len, s.prefix_len, f"{s.score:.4f}"])
        buf.write("\n# summary\n")
        w.writerow(["model", "set", "games", "mean_score"])
        for (model, which), mean in self.means().items():
            w.writerow([model, which, len(self.scores[(model, which)]), f"{mean:.4f}"])
        return buf.getvalue()

    def summary(self) -> str:
        sets = sorted({s for _, s in self.scores}, key=["train", "test"].index)
        models = list(dict.fromkeys(m for m, _ in self.scores))
        means = self.means()
        lines = [f"{'model':<12}" + "".join(f"{s:>10}" for s in sets)]
        for m in models:
            lines.append(f"{m:<12}" + "".join(f"{means[(m, s)]:>9.1f}%" for s in sets))
        return "\n".join(lines)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def run_experiment(config: ExperimentConfig) -> Report:
    """Generate both game sets, train both learners, score everything."""
    out = Path(config.out_dir) if config.out_dir else None
    started = time.strftime("%Y-%m-%dT%H:%M:%S")

    train_set = generate_game_set(config.train_seed_base, config.n_train, config.env)
    test_set = generate_game_set(config.test_seed_base, config.n_test, config.env)
    if out:
        _write(out / "traces" / "train.jsonl", dumps_traces(train_set))
        _write(out / "traces" / "test.jsonl", dumps_traces(test_set))
        _write(out / "automaton.dot", extract_automaton(train_set).to_text())

    e = config.elman
    net = init_network(
        e.init_seed, e.init_range, sizes=(8, e.hidden, 7), context_init=e.context_init
    )
    log.info("training Elman net for %d epochs", e.epochs)
    training = train(
        net,
        sequences_from_traces(train_set),
        epochs=e.epochs,
        lr=e.lr,
        shuffle_seed=e.init_seed if e.shuffle else None,
    )
    g = config.goal_seeker
    model = train_from_traces(train_set, K=g.K)
    if out:
        (out / "models").mkdir(parents=True, exist_ok=True)
        net.save(out / "models" / "elman.npz")
        model.save(out / "models" / "goalseeker.tsv")

    learners = {
        "teacher": TeacherLearner(),
        "elman": ElmanLearner(net),
        "goalseeker": GoalSeeker(model, GoalConfig(horizon=g.horizon, discount=g.discount)),
    }
    scores = {}
    for name, learner in learners.items():
        for which, games in (("train", train_set), ("test", test_set)):
            scores[(name, which)] = evaluate(learner, games)

    report = Report(
        scores,
        config,
        metadata={
            "version": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "started": started,
            "finished": time.strftime("%Y-%m-%dT%H:%M:%S"),
            "elman_final_mse": training.final_mse,
        },
    )
    if out:
        _write(out / "scores.csv", report.score_table())
        meta = {"config": config.to_dict(), "metadata": report.metadata}
        meta["means"] = {f"{m}/{s}": v for (m, s), v in report.means().items()}
        _write(out / "report.json", json.dumps(meta, indent=2) + "\n")
    return report


# -- trace files -------------------------------------------------------------


def _trace_records(trace: Trace):
    yield {
        "type": "header",
        "seed": trace.seed,
        "config": trace.config.to_dict(),
        "final_outcome": trace.final_outcome,
        "steps": len(trace.steps),
    }
    for step in trace.steps:
        state = step.state or {}
        yield {
            "turn": step.turn,
            "ball": state.get("ball"),
            "paddle_row": state.get("paddle_row"),
            "attention": state.get("attention"),
            "observation": {"ball": step.observation.ball.name, "paddle": step.observation.paddle.name},
            "response": step.response.name,
            "outcome": step.outcome_after.value,
        }
    final = dict(trace.final_state or {})
    if trace.final_observation is not None:
        obs = trace.final_observation
        final["observation"] = {"ball": obs.ball.name, "paddle": obs.paddle.name}
    yield {"type": "final", **final}


def dumps_traces(traces: list[Trace]) -> str:
    return "".join(json.dumps(rec) + "\n" for tr in traces for rec in _trace_records(tr))


def _reading(d: dict) -> SensorReading:
    from .env import BallSensor, PaddleSensor

    return SensorReading(BallSensor[d["ball"]], PaddleSensor[d["paddle"]])


def loads_traces(text: str) -> list[Trace]:
    traces: list[Trace] = []
    current = None
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"trace line {n}: {exc}") from exc
        kind = rec.get("type")
        if kind == "header":
            current = Trace(rec["seed"], GameConfig.from_dict(rec["config"]), [], rec["final_outcome"])
            traces.append(current)
        elif current is None:
            raise ConfigError(f"trace line {n}: step before header")
        elif kind == "final":
            obs = rec.pop("observation", None)
            rec.pop("type")
            current.final_state = rec
            current.final_observation = _reading(obs) if obs else None
        else:
            state = {
                "turn": rec["turn"],
                "ball": rec["ball"],
                "paddle_row": rec["paddle_row"],
                "attention": rec["attention"],
            }
            current.steps.append(
                TraceStep(
                    rec["turn"],
                    _reading(rec["observation"]),
                    Response[rec["response"]],
                    Outcome(rec["outcome"]),
                    state,
                )
            )
    return traces


def save_traces(traces: list[Trace], path) -> None:
    _write(Path(path), dumps_traces(traces))


def load_traces(path) -> list[Trace]:
    return loads_traces(Path(path).read_text())


# -- rendering ---------------------------------------------------------------


def _frame(state: dict, config: GameConfig) -> list[str]:
    ball = state["ball"]
    att = state["attention"]
    rows = []
    border = "+" + "-" * (3 * config.grid_cols) + "+"
    rows.append(border)
    for r in range(config.grid_rows):
        cells = []
        for c in range(config.grid_cols):
            has_ball = (ball["col"], ball["row"]) == (c, r)
            has_paddle = c == config.paddle_col and state["paddle_row"] == r
            mark = "@" if has_ball and has_paddle else "o" if has_ball else "|" if has_paddle else "."
            boxed = (att["col"], att["row"]) == (c, r)
            cells.append(f"[{mark}]" if boxed else f" {mark} ")
        rows.append("|" + "".join(cells) + "|")
    rows.append(border)
    return rows


def render_trace(trace: Trace) -> str:
    """ASCII frames: ``o`` ball, ``|`` paddle, ``@`` both, ``[ ]`` attention box."""
    frames = []
    for step in trace.steps:
        frame = _frame(step.state, trace.config)
        frame.append(f"turn {step.turn}: {step.observation} -> {step.response.name}")
        frames.append("\n".join(frame))
    if trace.final_state is not None:
        frame = _frame(trace.final_state, trace.config)
        frame.append(f"turn {trace.final_state['turn']}: {trace.final_outcome} ({trace.final_observation})")
        frames.append("\n".join(frame))
    return "\n\n".join(frames) + "\n"
