"""Command-line front end: run batches, train the baseline learner, replay logs.

Exit code 0 on success; any failure prints a one-line diagnostic to stderr and
exits nonzero.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import SimError
from .harness import load_config, parse_run_config, replay, run_episodes


def _load_with_overrides(args) -> object:
    """Reparse the raw config with CLI overrides folded in, so the manifest
    echoes what actually ran."""
    path = Path(args.config)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise SimError(f"cannot read config {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise SimError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    if getattr(args, "seed", None) is not None:
        data["seeds"] = [args.seed]
    if getattr(args, "episodes", None) is not None:
        data["episodes"] = args.episodes
    if getattr(args, "out", None) is not None:
        data["out"] = args.out
    return parse_run_config(data)


def _cmd_run(args) -> int:
    config = _load_with_overrides(args)
    returns = run_episodes(config, overwrite=args.overwrite)
    for seed, series in returns.items():
        mean = sum(series) / len(series)
        print(f"seed {seed}: {len(series)} episode(s), mean return {mean:.4f}")
    print(f"logs written to {config.out}")
    return 0


def _cmd_train(args) -> int:
    config = _load_with_overrides(args)
    if config.policy.kind != "q-learning":
        raise SimError("train requires a config whose policy kind is 'q-learning'")
    returns = run_episodes(config, overwrite=args.overwrite)
    for seed, series in returns.items():
        tail = series[-50:]
        print(
            f"seed {seed}: trained {len(series)} episode(s), "
            f"final-{len(tail)} mean return {sum(tail) / len(tail):.4f}"
        )
    print(f"logs and policy tables written to {config.out}")
    return 0


def _cmd_replay(args) -> int:
    print(replay(args.log))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="demas",
        description="Discrete-event market simulator: batch runs, training, log replay.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the configured policy and write episode logs")
    run.add_argument("--config", required=True, help="JSON run configuration file")
    run.add_argument("--seed", type=int, help="override the config's seed list with one seed")
    run.add_argument("--episodes", type=int, help="override the config's episode count")
    run.add_argument("--out", help="override the config's output directory")
    run.add_argument("--overwrite", action="store_true", help="replace logs from a previous run")
    run.set_defaults(func=_cmd_run)

    train = sub.add_parser("train", help="train the tabular baseline and write logs + policy")
    train.add_argument("--config", required=True, help="JSON run configuration file")
    train.add_argument("--out", required=True, help="output directory")
    train.add_argument("--overwrite", action="store_true", help="replace logs from a previous run")
    train.set_defaults(func=_cmd_train)

    rep = sub.add_parser("replay", help="print the step table of one episode log")
    rep.add_argument("--log", required=True, help="episode .jsonl file")
    rep.set_defaults(func=_cmd_replay)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SimError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
