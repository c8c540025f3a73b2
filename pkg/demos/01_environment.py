#!/usr/bin/env python3
"""Walk through one game of partially observed Pong by hand.

The agent never sees the board. It sees one cell (the attention cell) and
reports what is in it: the ball and its heading, and whether the paddle is
there. Everything else has to be inferred.
"""
from ndpong import GameConfig, Response, new_game
from ndpong.env import apply_response, read_sensors

config = GameConfig()
state = new_game(config, seed=7)
print("ball starts at", (state.ball.col, state.ball.row), "heading", (state.ball.dx, state.ball.dy))
print("attention cell", state.attention, "paddle row", state.paddle_row)
print("first reading:", read_sensors(state))

# Attention opens on the ball, so the first reading is always BALL_PRESENT.
# CHECK_BALL looks again and reveals the heading.
state, _ = apply_response(state, Response.CHECK_BALL)
print("after CHECK_BALL:", read_sensors(state))

# Panning sweeps attention right until it lands on the ball or the paddle.
# Once it sits on the paddle column there is nowhere further to go.
for _ in range(3):
    state, outcome = apply_response(state, Response.PAN_RIGHT)
    print(f"turn {state.turn:2d}  attention {state.attention}  reads {read_sensors(state)}")

# Nothing in the reading says where the ball went while we looked away.
print("ball is actually at", (state.ball.col, state.ball.row))
