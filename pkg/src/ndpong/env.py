"""Partially observed, turn-based Pong on a coarse grid.

The ball lives on a ``grid_cols x grid_rows`` lattice (column 0 is the left
wall, row 0 the top) and the learner's paddle sits in the rightmost column.
The learner never sees the ball directly: it owns a single *attention* cell
and its two sensors only report what is inside that cell.

Physics is deterministic once a game is seeded.  The ball has a heading
``(dx, dy)`` and a slope that sets how often a move steps horizontally and/or
vertically (Bresenham style, one cell per move at most on each axis).  Ball
speed is normalized to the learner: after a move with a vertical component
the ball rests ``ball_period`` turns, after a purely horizontal move (and at
the start of the game) it rests ``ball_period - 1`` turns.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import NamedTuple

import numpy as np


class ConfigError(ValueError):
    """Invalid game or experiment configuration."""


class UsageError(RuntimeError):
    """Operation called outside its contract (e.g. on a finished game)."""


class BallSensor(enum.IntEnum):
    BALL_ABSENT = 0
    BALL_PRESENT = 1
    BALL_MOVING_LEFT = 2
    BALL_MOVING_RIGHT = 3
    BALL_MOVING_UP = 4
    BALL_MOVING_DOWN = 5


class PaddleSensor(enum.IntEnum):
    PADDLE_ABSENT = 0
    PADDLE_PRESENT = 1


class Response(enum.IntEnum):
    """Learner actions; the integer value is the stable response id (0-6)."""

    CHECK_BALL = 0
    TRACK_BALL_LEFT = 1
    TRACK_BALL_RIGHT = 2
    PAN_LEFT = 3
    PAN_RIGHT = 4
    MOVE_PADDLE_UP = 5
    MOVE_PADDLE_DOWN = 6


class Outcome(enum.Enum):
    ONGOING = "Ongoing"
    WIN = "Win"
    LOSS = "Loss"


class SensorReading(NamedTuple):
    ball: BallSensor
    paddle: PaddleSensor

    def __str__(self) -> str:
        return f"{self.ball.name}/{self.paddle.name}"

    @classmethod
    def parse(cls, text: str) -> "SensorReading":
        ball, paddle = text.split("/")
        return cls(BallSensor[ball], PaddleSensor[paddle])


ALL_READINGS = tuple(SensorReading(b, p) for b in BallSensor for p in PaddleSensor)

DEFAULT_DIRECTIONS = ((-1, -1), (-1, 0), (-1, 1), (1, -1), (1, 0), (1, 1))
DEFAULT_SLOPES = (
    Fraction(1, 3),
    Fraction(1, 2),
    Fraction(2, 3),
    Fraction(1),
    Fraction(3, 2),
    Fraction(2),
    Fraction(3),
)


@dataclass(frozen=True)
class GameConfig:
    grid_cols: int = 5
    grid_rows: int = 5
    ball_period: int = 4
    max_turns: int = 200
    initial_direction_set: tuple[tuple[int, int], ...] = DEFAULT_DIRECTIONS
    # |vertical speed| / |horizontal speed| for headings with dy != 0
    slope_set: tuple[Fraction, ...] = DEFAULT_SLOPES

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "initial_direction_set", tuple(tuple(d) for d in self.initial_direction_set)
        )
        object.__setattr__(self, "slope_set", tuple(Fraction(s) for s in self.slope_set))
        self.validate()

    def validate(self) -> None:
        if self.grid_cols < 3:
            raise ConfigError(f"grid_cols must be >= 3, got {self.grid_cols}")
        if self.grid_rows < 1:
            raise ConfigError(f"grid_rows must be >= 1, got {self.grid_rows}")
        if self.ball_period < 1:
            raise ConfigError(f"ball_period must be >= 1, got {self.ball_period}")
        if self.max_turns < 1:
            raise ConfigError(f"max_turns must be >= 1, got {self.max_turns}")
        if not self.initial_direction_set:
            raise ConfigError("initial_direction_set is empty")
        for dx, dy in self.initial_direction_set:
            if dx not in (-1, 1) or dy not in (-1, 0, 1):
                raise ConfigError(f"bad direction {(dx, dy)}")
        if not self.slope_set or any(s <= 0 for s in self.slope_set):
            raise ConfigError("slope_set must be non-empty and positive")

    def to_dict(self) -> dict:
        return {
            "grid_cols": self.grid_cols,
            "grid_rows": self.grid_rows,
            "ball_period": self.ball_period,
            "max_turns": self.max_turns,
            "initial_direction_set": [list(d) for d in self.initial_direction_set],
            "slope_set": [str(s) for s in self.slope_set],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GameConfig":
        d = dict(d)
        if "initial_direction_set" in d:
            d["initial_direction_set"] = tuple(tuple(x) for x in d["initial_direction_set"])
        if "slope_set" in d:
            d["slope_set"] = tuple(Fraction(s) for s in d["slope_set"])
        return cls(**d)

    @property
    def paddle_col(self) -> int:
        return self.grid_cols - 1


@dataclass(frozen=True)
class BallState:
    col: int
    row: int
    dx: int
    dy: int
    # Per-move step rates as integer fractions num/den; acc_* are Bresenham
    # accumulators in [0, den).
    h_num: int = 1
    v_num: int = 1
    den: int = 1
    acc_h: int = 0
    acc_v: int = 0

    def next_step(self) -> tuple[int, int]:
        """Signed (horizontal, vertical) cell step of the upcoming move."""
        sx = self.dx if self.acc_h + self.h_num >= self.den else 0
        sy = self.dy if self.acc_v + self.v_num >= self.den else 0
        return sx, sy


@dataclass(frozen=True)
class GameState:
    config: GameConfig = field(repr=False)
    ball: BallState
    paddle_row: int
    attention: tuple[int, int]
    turn: int = 0
    checked: bool = False
    outcome: Outcome = Outcome.ONGOING
    ball_timer: int = 1  # turns left before the next ball move

    def to_dict(self) -> dict:
        b = self.ball
        return {
            "turn": self.turn,
            "ball": {"col": b.col, "row": b.row, "dx": b.dx, "dy": b.dy},
            "paddle_row": self.paddle_row,
            "attention": {"col": self.attention[0], "row": self.attention[1]},
            "checked": self.checked,
            "outcome": self.outcome.value,
        }


def _rest_turns(config: GameConfig, vertical: bool) -> int:
    if vertical:
        return config.ball_period
    return max(1, config.ball_period - 1)


def _rates(slope: Fraction, dy: int) -> tuple[int, int, int]:
    """(h_num, v_num, den) so that the faster axis steps every move."""
    if dy == 0:
        return 1, 0, 1
    if slope <= 1:
        return slope.denominator, slope.numerator, slope.denominator
    return slope.denominator, slope.numerator, slope.numerator


def new_game(config: GameConfig, seed: int) -> GameState:
    """Start a game: ball and paddle centred, attention on the ball."""
    config.validate()
    rng = np.random.default_rng(seed)
    dx, dy = config.initial_direction_set[rng.integers(len(config.initial_direction_set))]
    slope = config.slope_set[rng.integers(len(config.slope_set))]
    h_num, v_num, den = _rates(slope, dy)
    acc_h, acc_v = (int(a) for a in rng.integers(den, size=2))
    col, row = config.grid_cols // 2, config.grid_rows // 2
    ball = _turn_at_walls(
        BallState(col, row, dx, dy, h_num, v_num, den, acc_h, acc_v), config
    )
    return GameState(
        config=config,
        ball=ball,
        paddle_row=config.grid_rows // 2,
        attention=(col, row),
        ball_timer=_rest_turns(config, False),
    )


def read_sensors(state: GameState) -> SensorReading:
    """What the learner sees through its attention cell.

    Also valid on a finished game, where it reports the final position.
    """
    ball = state.ball
    if state.attention == (state.config.paddle_col, state.paddle_row):
        paddle = PaddleSensor.PADDLE_PRESENT
    else:
        paddle = PaddleSensor.PADDLE_ABSENT
    if (ball.col, ball.row) != state.attention:
        return SensorReading(BallSensor.BALL_ABSENT, paddle)
    if not state.checked or state.outcome is not Outcome.ONGOING:
        return SensorReading(BallSensor.BALL_PRESENT, paddle)
    sx, sy = ball.next_step()
    if sy < 0:
        sensed = BallSensor.BALL_MOVING_UP
    elif sy > 0:
        sensed = BallSensor.BALL_MOVING_DOWN
    elif sx < 0:
        sensed = BallSensor.BALL_MOVING_LEFT
    else:
        sensed = BallSensor.BALL_MOVING_RIGHT
    return SensorReading(sensed, paddle)


def _clamp(v: int, lo: int, hi: int) -> int:
    return lo if v < lo else hi if v > hi else v


def _turn_at_walls(ball: BallState, config: GameConfig) -> BallState:
    # Headings never point into a wall, so the reported direction is always
    # the direction of the next move.
    dx, dy = ball.dx, ball.dy
    if ball.col == 0 and dx < 0:
        dx = 1
    if config.grid_rows > 1:
        if ball.row == 0 and dy < 0:
            dy = 1
        elif ball.row == config.grid_rows - 1 and dy > 0:
            dy = -1
    if (dx, dy) == (ball.dx, ball.dy):
        return ball
    return replace(ball, dx=dx, dy=dy)


def advance_ball(state: GameState) -> tuple[GameState, Outcome]:
    """Move the ball one step, bouncing off the walls, and settle the outcome."""
    config = state.config
    ball = state.ball
    sx, sy = ball.next_step()
    acc_h = (ball.acc_h + ball.h_num) % ball.den
    acc_v = (ball.acc_v + ball.v_num) % ball.den
    dx, dy = ball.dx, ball.dy

    row = ball.row + sy
    if row < 0 or row >= config.grid_rows:
        dy = -dy
        row = _clamp(ball.row - sy, 0, config.grid_rows - 1)
    col = ball.col + sx
    if col < 0:
        dx = 1
        col = _clamp(ball.col - sx, 0, config.grid_cols - 1)

    ball = _turn_at_walls(
        replace(ball, col=col, row=row, dx=dx, dy=dy, acc_h=acc_h, acc_v=acc_v), config
    )
    if col >= config.paddle_col:
        outcome = Outcome.WIN if row == state.paddle_row else Outcome.LOSS
    else:
        outcome = Outcome.ONGOING
    state = replace(
        state,
        ball=ball,
        outcome=outcome,
        checked=False,
        ball_timer=_rest_turns(config, sy != 0),
    )
    return state, outcome


def _pan_left(state: GameState) -> tuple[int, int]:
    col, row = state.attention
    ball = state.ball
    while col > 0:
        col -= 1
        if col == ball.col:
            return col, ball.row
    return col, row


def _pan_right(state: GameState) -> tuple[int, int]:
    col, row = state.attention
    ball = state.ball
    last = state.config.grid_cols - 1
    while col < last:
        col += 1
        if col == ball.col:
            return col, ball.row
        if col == state.config.paddle_col:
            return col, state.paddle_row
    return col, row


def apply_response(state: GameState, response: Response) -> tuple[GameState, Outcome]:
    """Apply one learner response, advance the clock, and move the ball if due."""
    if state.outcome is not Outcome.ONGOING:
        raise UsageError(f"game already finished ({state.outcome.value})")
    config = state.config
    response = Response(response)
    col, row = state.attention
    ball_here = (state.ball.col, state.ball.row) == state.attention
    checked = False
    paddle_row = state.paddle_row

    if response is Response.CHECK_BALL:
        checked = ball_here
    elif response is Response.TRACK_BALL_LEFT:
        col = max(0, col - 1)
    elif response is Response.TRACK_BALL_RIGHT:
        col = min(config.grid_cols - 1, col + 1)
    elif response is Response.PAN_LEFT:
        col, row = _pan_left(state)
    elif response is Response.PAN_RIGHT:
        col, row = _pan_right(state)
    else:
        if state.attention == (config.paddle_col, paddle_row):
            step = -1 if response is Response.MOVE_PADDLE_UP else 1
            paddle_row = _clamp(paddle_row + step, 0, config.grid_rows - 1)
            row = paddle_row

    state = replace(
        state,
        attention=(col, row),
        paddle_row=paddle_row,
        checked=checked,
        turn=state.turn + 1,
        ball_timer=state.ball_timer - 1,
    )
    if state.ball_timer <= 0:
        return advance_ball(state)
    return state, state.outcome
