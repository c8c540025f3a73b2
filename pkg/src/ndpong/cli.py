"""Command line front end.

Exit codes: 0 success, 1 validation error, 2 teacher failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .elman import ElmanNet, init_network, sequences_from_traces, train
from .env import ConfigError, UsageError
from .goal_seeker import GoalConfig, GoalSeeker, TransitionModel, train_from_traces
from .harness import (
    ElmanLearner,
    ExperimentConfig,
    GoalSeekerSettings,
    Report,
    TeacherLearner,
    evaluate,
    generate_game_set,
    load_traces,
    render_trace,
    run_experiment,
    save_traces,
)
from .teacher import TeacherFailure, extract_automaton

EXIT_OK, EXIT_INVALID, EXIT_TEACHER, EXIT_IO = 0, 1, 2, 3


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--seed", type=int, help="first seed of the game set (test seeds move with it)")
    p.add_argument("--games", type=int, help="number of games")
    p.add_argument("--epochs", type=int, help="Elman training epochs")
    p.add_argument("--lr", type=float, help="Elman learning rate")
    p.add_argument("--ball-period", type=int, help="turns the ball rests between moves")
    p.add_argument("--context-k", type=int, help="goal seeker working memory length")
    p.add_argument("--out", help="output directory (or file for render/automaton)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="ndpong", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("gen", parents=[common], help="generate a teacher game set")

    p = sub.add_parser("train", parents=[common], help="train a learner")
    p.add_argument("--model", choices=["elman", "goalseeker"], required=True)
    p.add_argument("--traces", help="training traces (JSONL); generated when omitted")

    p = sub.add_parser("eval", parents=[common], help="score a learner on a game set")
    p.add_argument("--model", choices=["elman", "goalseeker", "teacher"], required=True)
    p.add_argument("--model-file", help="saved model (not needed for teacher)")
    p.add_argument("--traces", help="games to score (JSONL); generated when omitted")

    sub.add_parser("run", parents=[common], help="full experiment")

    p = sub.add_parser("render", parents=[common], help="ASCII frames of one game")
    p.add_argument("--traces", help="read the game from a trace file")
    p.add_argument("--index", type=int, default=0)

    sub.add_parser("automaton", parents=[common], help="export the observed state graph")
    return parser


def _experiment(args) -> ExperimentConfig:
    config = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    env, elman, goal = config.env, config.elman, config.goal_seeker
    if args.ball_period is not None:
        env = dataclasses.replace(env, ball_period=args.ball_period)
    if args.epochs is not None:
        elman = dataclasses.replace(elman, epochs=args.epochs)
    if args.lr is not None:
        elman = dataclasses.replace(elman, lr=args.lr)
    if args.context_k is not None:
        goal = dataclasses.replace(goal, K=args.context_k)
    changes = dict(env=env, elman=elman, goal_seeker=goal)
    if args.seed is not None:
        # shift both ranges together so they stay disjoint
        changes["train_seed_base"] = args.seed
        changes["test_seed_base"] = args.seed + config.test_seed_base - config.train_seed_base
    if args.games is not None:
        changes["n_train"] = changes["n_test"] = args.games
    if args.out is not None:
        changes["out_dir"] = args.out
    return dataclasses.replace(config, **changes)


def _games(args, config: ExperimentConfig):
    if getattr(args, "traces", None):
        return load_traces(args.traces)
    return generate_game_set(config.train_seed_base, config.n_train, config.env)


def _cmd_gen(args, config):
    traces = _games(args, config)
    out = Path(args.out or ".") / "traces.jsonl"
    save_traces(traces, out)
    print(f"wrote {len(traces)} games to {out}")


def _cmd_train(args, config):
    traces = _games(args, config)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    if args.model == "elman":
        e = config.elman
        net = init_network(e.init_seed, e.init_range, context_init=e.context_init)
        report = train(
            net, sequences_from_traces(traces), epochs=e.epochs, lr=e.lr,
            shuffle_seed=e.init_seed if e.shuffle else None,
        )
        net.save(out / "elman.npz")
        print(f"final mse {report.final_mse:.6g}; saved {out / 'elman.npz'}")
    else:
        model = train_from_traces(traces, K=config.goal_seeker.K)
        model.save(out / "goalseeker.tsv")
        print(f"{len(model.response_counts)} contexts; saved {out / 'goalseeker.tsv'}")


def _cmd_eval(args, config):
    traces = _games(args, config)
    if args.model == "teacher":
        learner = TeacherLearner()
    elif not args.model_file:
        raise ConfigError("--model-file is required for learned models")
    elif args.model == "elman":
        learner = ElmanLearner(ElmanNet.load(args.model_file))
    else:
        g: GoalSeekerSettings = config.goal_seeker
        learner = GoalSeeker(
            TransitionModel.load(args.model_file), GoalConfig(horizon=g.horizon, discount=g.discount)
        )
    report = Report({(args.model, "eval"): evaluate(learner, traces)}, config)
    table = report.score_table()
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "scores.csv").write_text(table)
    print(table, end="")


def _cmd_run(args, config):
    report = run_experiment(config)
    print(report.summary())
    if config.out_dir:
        print(f"artifacts in {config.out_dir}")


def _cmd_render(args, config):
    if args.traces:
        trace = load_traces(args.traces)[args.index]
    else:
        trace = generate_game_set(config.train_seed_base, 1, config.env)[0]
    text = render_trace(trace)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text, end="")


def _cmd_automaton(args, config):
    text = extract_automaton(_games(args, config)).to_text()
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text, end="")


COMMANDS = {
    "gen": _cmd_gen,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "run": _cmd_run,
    "render": _cmd_render,
    "automaton": _cmd_automaton,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        config = _experiment(args)
        COMMANDS[args.command](args, config)
    except TeacherFailure as exc:
        print(f"teacher failure: {exc}", file=sys.stderr)
        return EXIT_TEACHER
    except (ConfigError, UsageError, KeyError, IndexError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
