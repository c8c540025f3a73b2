"""Hand-written winning policy, trace generation and automaton extraction."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field

from .env import (
    BallSensor,
    GameConfig,
    Outcome,
    PaddleSensor,
    Response,
    SensorReading,
    UsageError,
    apply_response,
    new_game,
    read_sensors,
)


class TeacherFailure(RuntimeError):
    """The oracle policy lost or ran out of turns."""


class Vertical(enum.Enum):
    UP = "Up"
    DOWN = "Down"


@dataclass(frozen=True)
class TeacherMemory:
    pending_vertical: Vertical | None = None
    paddle_moved: bool = False


EMPTY_MEMORY = TeacherMemory()


def teacher_policy(
    memory: TeacherMemory, observation: SensorReading
) -> tuple[Response, TeacherMemory]:
    """Correct response for ``observation`` given what the teacher remembers.

    Ball information wins over paddle information when both are present.
    """
    ball, paddle = observation
    if ball is BallSensor.BALL_PRESENT:
        return Response.CHECK_BALL, memory
    if ball is BallSensor.BALL_MOVING_LEFT:
        return Response.TRACK_BALL_LEFT, EMPTY_MEMORY
    if ball is BallSensor.BALL_MOVING_RIGHT:
        return Response.TRACK_BALL_RIGHT, EMPTY_MEMORY
    if ball is BallSensor.BALL_MOVING_UP:
        return Response.PAN_RIGHT, TeacherMemory(Vertical.UP)
    if ball is BallSensor.BALL_MOVING_DOWN:
        return Response.PAN_RIGHT, TeacherMemory(Vertical.DOWN)
    if paddle is PaddleSensor.PADDLE_PRESENT and memory.pending_vertical is not None:
        if memory.paddle_moved:
            return Response.PAN_LEFT, EMPTY_MEMORY
        move = (
            Response.MOVE_PADDLE_UP
            if memory.pending_vertical is Vertical.UP
            else Response.MOVE_PADDLE_DOWN
        )
        return move, TeacherMemory(memory.pending_vertical, True)
    return Response.CHECK_BALL, memory


@dataclass(frozen=True)
class TraceStep:
    turn: int
    observation: SensorReading
    response: Response
    outcome_after: Outcome
    # full hidden state before the response, kept for rendering and trace files
    state: dict = field(default=None, repr=False, compare=False)


@dataclass
class Trace:
    seed: int
    config: GameConfig
    steps: list[TraceStep]
    final_outcome: str  # "Win", "Loss" or "Timeout"
    # sensor reading of the terminal state (ball in the attention cell on a win)
    final_observation: SensorReading | None = None
    final_state: dict | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def observations(self) -> list[SensorReading]:
        return [s.observation for s in self.steps]

    @property
    def responses(self) -> list[Response]:
        return [s.response for s in self.steps]


def run_policy(config: GameConfig, seed: int) -> Trace:
    """Play one game with the teacher and record it, whatever the outcome."""
    state = new_game(config, seed)
    memory = EMPTY_MEMORY
    steps = []
    outcome = Outcome.ONGOING
    while outcome is Outcome.ONGOING and state.turn < config.max_turns:
        obs = read_sensors(state)
        response, memory = teacher_policy(memory, obs)
        before = state.to_dict()
        state, outcome = apply_response(state, response)
        steps.append(TraceStep(before["turn"], obs, response, outcome, before))
    final = outcome.value if outcome is not Outcome.ONGOING else "Timeout"
    return Trace(seed, config, steps, final, read_sensors(state), state.to_dict())


def generate_trace(config: GameConfig, seed: int) -> Trace:
    """Winning teacher trace for ``seed``; raises TeacherFailure otherwise."""
    trace = run_policy(config, seed)
    if trace.final_outcome != "Win":
        raise TeacherFailure(
            f"teacher {trace.final_outcome.lower()} on seed {seed} after "
            f"{len(trace)} turns (ball_period={config.ball_period})"
        )
    return trace


@dataclass
class Automaton:
    states: set[SensorReading]
    edges: Counter  # (state, response, next_state) -> count

    def successors(self, state: SensorReading, response: Response) -> set[SensorReading]:
        return {n for (s, r, n) in self.edges if s == state and r == response}

    def nondeterministic_pairs(self) -> dict:
        out = {}
        for s, r, _ in self.edges:
            succ = self.successors(s, r)
            if len(succ) > 1:
                out[(s, r)] = succ
        return out

    def to_text(self) -> str:
        lines = ["digraph pong {"]
        for (s, r, n), count in sorted(
            self.edges.items(), key=lambda kv: (str(kv[0][0]), kv[0][1], str(kv[0][2]))
        ):
            lines.append(f'"{s}" -> "{n}" [label={r.name}, count={count}]')
        lines.append("}")
        return "\n".join(lines) + "\n"


def extract_automaton(traces: list[Trace], include_final: bool = True) -> Automaton:
    """Observation-level state machine seen across ``traces``.

    With ``include_final`` the last response is linked to the terminal reading.
    """
    if not traces:
        raise UsageError("extract_automaton needs at least one trace")
    states: set[SensorReading] = set()
    edges: Counter = Counter()
    for trace in traces:
        obs = trace.observations
        if include_final and trace.final_observation is not None:
            obs = obs + [trace.final_observation]
        states.update(obs)
        for t, step in enumerate(trace.steps):
            if t + 1 < len(obs):
                edges[(obs[t], step.response, obs[t + 1])] += 1
    return Automaton(states, edges)
