#!/usr/bin/env python3
"""The scripted teacher, its traces, and the automaton they induce.

The teacher is a small finite-state policy that wins every game at the
default ball speed. Collecting its (observation, response, next observation)
triples gives a graph in which the same (observation, response) pair leads to
several different next observations.
"""
from collections import Counter

from ndpong import GameConfig
from ndpong.harness import generate_game_set, render_trace
from ndpong.teacher import extract_automaton, run_policy

config = GameConfig()
outcomes = Counter(run_policy(config, s).final_outcome for s in range(1000))
print("teacher over 1000 games:", dict(outcomes))

for period in (1, 2, 3, 5):
    fast = Counter(run_policy(GameConfig(ball_period=period), s).final_outcome for s in range(200))
    print(f"ball_period={period}: {dict(fast)}")

games = generate_game_set(1000, 50, config)
lengths = [len(g) for g in games]
print(f"50 training games, lengths {min(lengths)}..{max(lengths)}")

# The first few frames of one game. `o` is the ball, `|` the paddle, [ ] the attention cell.
print("\n\n".join(render_trace(games[0]).split("\n\n")[:4]))

automaton = extract_automaton(games)
print(f"\n{len(automaton.states)} observation states, {len(automaton.edges)} distinct edges")
for (obs, resp), nexts in sorted(automaton.nondeterministic_pairs().items(), key=str)[:5]:
    print(f"{obs} --{resp.name}--> {sorted(map(str, nexts))}")
