"""Nondeterministic Pong benchmark: environment, teacher oracle and two learners."""

__version__ = "0.1.0"

from .env import (  # noqa: E402
    BallSensor,
    GameConfig,
    GameState,
    Outcome,
    PaddleSensor,
    Response,
    SensorReading,
    advance_ball,
    apply_response,
    new_game,
    read_sensors,
)
from .teacher import Trace, extract_automaton, generate_trace, teacher_policy  # noqa: E402

__all__ = [
    "BallSensor",
    "GameConfig",
    "GameState",
    "Outcome",
    "PaddleSensor",
    "Response",
    "SensorReading",
    "Trace",
    "advance_ball",
    "apply_response",
    "extract_automaton",
    "generate_trace",
    "new_game",
    "read_sensors",
    "teacher_policy",
]
