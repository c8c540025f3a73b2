import pytest

from ndpong.env import (
    ALL_READINGS,
    BallSensor as B,
    GameConfig,
    PaddleSensor as P,
    Response as R,
    SensorReading,
    UsageError,
)
from ndpong.teacher import (
    EMPTY_MEMORY,
    TeacherFailure,
    TeacherMemory,
    Vertical,
    extract_automaton,
    generate_trace,
    run_policy,
    teacher_policy,
)

MEMORIES = [
    EMPTY_MEMORY,
    TeacherMemory(Vertical.UP),
    TeacherMemory(Vertical.UP, True),
    TeacherMemory(Vertical.DOWN),
    TeacherMemory(Vertical.DOWN, True),
]
START = SensorReading(B.BALL_PRESENT, P.PADDLE_ABSENT)
PADDLE = SensorReading(B.BALL_ABSENT, P.PADDLE_PRESENT)


def test_moving_up_pans_right():
    r, m = teacher_policy(EMPTY_MEMORY, SensorReading(B.BALL_MOVING_UP, P.PADDLE_ABSENT))
    assert r is R.PAN_RIGHT and m == TeacherMemory(Vertical.UP)


def test_moved_paddle_pans_left():
    r, m = teacher_policy(TeacherMemory(Vertical.UP, True), PADDLE)
    assert r is R.PAN_LEFT and m == EMPTY_MEMORY


def test_pending_moves_paddle():
    r, m = teacher_policy(TeacherMemory(Vertical.DOWN), PADDLE)
    assert r is R.MOVE_PADDLE_DOWN and m == TeacherMemory(Vertical.DOWN, True)


def test_ball_present_checks():
    assert teacher_policy(EMPTY_MEMORY, START) == (R.CHECK_BALL, EMPTY_MEMORY)


def test_horizontal_tracks_and_clears():
    r, m = teacher_policy(TeacherMemory(Vertical.UP), SensorReading(B.BALL_MOVING_LEFT, P.PADDLE_ABSENT))
    assert r is R.TRACK_BALL_LEFT and m == EMPTY_MEMORY


def test_ball_wins_over_paddle():
    both = SensorReading(B.BALL_PRESENT, P.PADDLE_PRESENT)
    assert teacher_policy(TeacherMemory(Vertical.UP), both)[0] is R.CHECK_BALL


def test_waiting():
    assert teacher_policy(EMPTY_MEMORY, PADDLE)[0] is R.CHECK_BALL
    assert teacher_policy(EMPTY_MEMORY, SensorReading(B.BALL_ABSENT, P.PADDLE_ABSENT))[0] is R.CHECK_BALL


@pytest.mark.parametrize("memory", MEMORIES)
def test_totality(memory):
    assert len(ALL_READINGS) == 12
    for obs in ALL_READINGS:
        r, m = teacher_policy(memory, obs)
        assert isinstance(r, R)
        assert not m.paddle_moved or m.pending_vertical is not None


def test_memory_discipline(train_set):
    for trace in train_set:
        memory = EMPTY_MEMORY
        for step in trace.steps:
            r, new = teacher_policy(memory, step.observation)
            assert r is step.response
            if new.pending_vertical is not None and new.pending_vertical != memory.pending_vertical:
                assert step.observation.ball in (B.BALL_MOVING_UP, B.BALL_MOVING_DOWN)
            if memory.pending_vertical is not None and new.pending_vertical is None:
                assert r in (R.PAN_LEFT, R.TRACK_BALL_LEFT, R.TRACK_BALL_RIGHT)
            memory = new


def test_thousand_wins(config):
    assert all(generate_trace(config, s).final_outcome == "Win" for s in range(1000))


def test_trace_replay(config):
    a, b = generate_trace(config, 5), generate_trace(config, 5)
    assert a.responses == b.responses and a.observations == b.observations
    assert [s.state for s in a.steps] == [s.state for s in b.steps]


def test_turns_increase(config):
    turns = [s.turn for s in generate_trace(config, 11).steps]
    assert turns == list(range(len(turns)))


def test_fast_ball_beats_teacher():
    config = GameConfig(ball_period=1)
    outcomes = [run_policy(config, s).final_outcome for s in range(50)]
    assert "Loss" in outcomes
    bad = outcomes.index("Loss")
    with pytest.raises(TeacherFailure):
        generate_trace(config, bad)


def test_timeout_reported():
    with pytest.raises(TeacherFailure, match="timeout"):
        generate_trace(GameConfig(max_turns=3), 0)


class TestAutomaton:
    def test_two_step_trace(self, config):
        trace = generate_trace(config, 0)
        trace.steps = trace.steps[:2]
        a = extract_automaton([trace], include_final=False)
        assert len(a.states) <= 2
        assert sum(1 for _ in a.edges) == 1

    def test_nondeterminism_witness(self, train_set):
        a = extract_automaton(train_set)
        succ = a.successors(START, R.CHECK_BALL)
        assert len(succ) >= 2
        assert (START, R.CHECK_BALL) in a.nondeterministic_pairs()

    def test_horizontal_only(self):
        config = GameConfig(initial_direction_set=((1, 0), (-1, 0)))
        traces = [generate_trace(config, s) for s in range(20)]
        succ = extract_automaton(traces).successors(START, R.CHECK_BALL)
        assert succ == {
            SensorReading(B.BALL_MOVING_LEFT, P.PADDLE_ABSENT),
            SensorReading(B.BALL_MOVING_RIGHT, P.PADDLE_ABSENT),
        }

    def test_edges_come_from_traces(self, train_set):
        a = extract_automaton(train_set)
        pairs = set()
        for t in train_set:
            obs = t.observations + [t.final_observation]
            pairs.update(zip(obs, t.responses, obs[1:]))
        assert set(a.edges) == pairs
        assert sum(a.edges.values()) == sum(len(t) for t in train_set)

    def test_win_reachable(self, train_set):
        # every game ends with the ball caught in the attention cell
        assert {t.final_observation.ball for t in train_set} == {B.BALL_PRESENT}

    def test_export(self, train_set):
        text = extract_automaton(train_set).to_text()
        assert text.startswith("digraph")
        assert '"BALL_PRESENT/PADDLE_ABSENT" -> "BALL_MOVING_UP/PADDLE_ABSENT" [label=CHECK_BALL, count=' in text

    def test_empty(self):
        with pytest.raises(UsageError):
            extract_automaton([])
