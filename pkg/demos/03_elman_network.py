#!/usr/bin/env python3
"""Train the Elman network to imitate the teacher and score it.

This is the full protocol (50 games, 5000 epochs, lr 0.2), which takes a few
seconds with the compiled training loop. Pass a smaller epoch count on the
command line for a quicker look: `python 03_elman_network.py 500`.
"""
import sys

import numpy as np

from ndpong import GameConfig
from ndpong.elman import init_network, sequences_from_traces, train
from ndpong.harness import ElmanLearner, evaluate, generate_game_set, mean_score

epochs = int(sys.argv[1]) if len(sys.argv) > 1 else 5000
config = GameConfig()
train_games = generate_game_set(1000, 50, config)
test_games = generate_game_set(100000, 50, config)

net = init_network(seed=0, init_range=0.5)
report = train(net, sequences_from_traces(train_games), epochs=epochs, lr=0.2, shuffle_seed=0)
checkpoints = np.unique(np.linspace(0, epochs - 1, 6).astype(int))
for e in checkpoints:
    print(f"epoch {e + 1:5d}  mse {report.mse[e]:.5f}")

learner = ElmanLearner(net)
print(f"train score {mean_score(evaluate(learner, train_games)):.1f}%")
print(f"test score  {mean_score(evaluate(learner, test_games)):.1f}%")

# A smaller init range converges less reliably from the same data.
for init_range in (0.1, 0.5):
    net = init_network(seed=1, init_range=init_range)
    train(net, sequences_from_traces(train_games), epochs=epochs, lr=0.2, shuffle_seed=1)
    print(f"seed 1, init range {init_range}: train {mean_score(evaluate(ElmanLearner(net), train_games)):.1f}%")
