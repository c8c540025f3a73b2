#!/usr/bin/env python3
"""The goal-seeking learner and what its working memory buys it.

The learner counts (context, response, next observation) transitions from a
single pass over the teacher's games. A context is the current observation
plus the last K (observation, response) pairs. At play time it picks the
response with the highest discounted chance of seeing the ball again.
"""
from ndpong import GameConfig
from ndpong.env import BallSensor, PaddleSensor, Response, SensorReading
from ndpong.goal_seeker import GoalConfig, GoalSeeker, WorkingMemory, motivation, step_memory, train_from_traces
from ndpong.harness import evaluate, generate_game_set, mean_score

config = GameConfig()
train_games = generate_game_set(1000, 50, config)
test_games = generate_game_set(100000, 50, config)

for K in range(5):
    model = train_from_traces(train_games, K=K)
    learner = GoalSeeker(model)
    tr = mean_score(evaluate(learner, train_games))
    te = mean_score(evaluate(learner, test_games))
    print(f"K={K}: {len(model.response_counts):3d} contexts  train {tr:5.1f}%  test {te:5.1f}%")

# Why memory matters: at the paddle column the right move depends on which way
# the ball was heading a step ago, which the current reading does not show.
model = train_from_traces(train_games, K=3)
paddle = SensorReading(BallSensor.BALL_ABSENT, PaddleSensor.PADDLE_PRESENT)
for heading in (BallSensor.BALL_MOVING_UP, BallSensor.BALL_MOVING_DOWN):
    memory = WorkingMemory(3)
    memory = step_memory(memory, SensorReading(BallSensor.BALL_PRESENT, PaddleSensor.PADDLE_ABSENT), Response.CHECK_BALL)
    memory = step_memory(memory, SensorReading(heading, PaddleSensor.PADDLE_ABSENT), Response.PAN_RIGHT)
    values = motivation(model, memory.key(paddle), GoalConfig())
    best = max(values, key=values.get)
    print(f"after {heading.name}: chooses {best.name}  ({', '.join(f'{r.name}={v:.2f}' for r, v in values.items())})")
