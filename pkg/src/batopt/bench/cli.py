"""Command-line interface for the benchmark harness.

Verbs:

- ``batopt run CONFIG`` — execute a configured experiment and emit the
  summary table.
- ``batopt validate CONFIG`` — check a config file without running it.
- ``batopt datasets list`` — show the bundled datasets.
- ``batopt demo williamson`` — bat vs particle swarm on the three bundled
  grouped-binomial datasets.
- ``batopt demo hawkes`` — bat, particle swarm and harmony search
  recovering simulated self-exciting process parameters.

``--seed``, ``--format``, ``--out``, ``--replicates`` and ``--iterations``
override the corresponding config entries.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import ConfigError, ExperimentConfig, ObjectiveConfig, OptimizerChoice, load_config
from .datasets import BUILTIN_DATASETS, DatasetError, builtin_dataset_path
from .runner import run_experiment
from .tables import emit_table


def _apply_overrides(config: ExperimentConfig, args) -> ExperimentConfig:
    updates = {}
    if args.seed is not None:
        updates["master_seed"] = args.seed
    if args.format is not None:
        updates["out_format"] = args.format
    if args.out is not None:
        updates["out_path"] = args.out
    if args.replicates is not None:
        updates["replicates"] = args.replicates
    if args.iterations is not None:
        updates["iterations"] = args.iterations
    if updates:
        config = replace(config, **updates)
        config.validate()
    return config


def _deliver(config: ExperimentConfig, text: str) -> None:
    if config.out_path:
        with open(config.out_path, "w") as fh:
            fh.write(text)
        print(f"wrote {config.out_path}")
    else:
        sys.stdout.write(text)


def _run(config: ExperimentConfig, timing: bool = False) -> int:
    outcome = run_experiment(config, quiet=False)
    failures = sum(r.failed for r in outcome.records)
    text = emit_table(
        outcome.table,
        fmt=config.out_format,
        precision=config.precision,
        include_timing=timing,
    )
    _deliver(config, text)
    if failures:
        for record in outcome.records:
            if record.failed:
                print(
                    f"FAILED {record.optimizer} replicate {record.replicate}: "
                    f"{record.error}",
                    file=sys.stderr,
                )
        return 1
    return 0


def _cmd_run(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    return _run(config, timing=args.timing)


def _cmd_validate(args) -> int:
    config = load_config(args.config)
    print(
        f"valid config: objective={config.objective.kind}, "
        f"{len(config.optimizers)} optimizer(s), "
        f"{config.replicates} replicate(s) x {config.iterations} iteration(s)"
    )
    return 0


def _cmd_datasets_list(_args) -> int:
    for name in sorted(BUILTIN_DATASETS):
        print(f"{name}\t{builtin_dataset_path(name)}")
    return 0


def _demo_config(args) -> dict:
    return dict(
        replicates=args.replicates if args.replicates is not None else 10,
        iterations=args.iterations if args.iterations is not None else 100,
        master_seed=args.seed if args.seed is not None else 20260809,
        out_format=args.format or "plain",
        out_path=args.out,
    )


def _cmd_demo_williamson(args) -> int:
    shared = _demo_config(args)
    status = 0
    for name in ("williamson-boundary", "williamson-infinity", "williamson-interior"):
        config = ExperimentConfig(
            objective=ObjectiveConfig(kind="logbinomial", dataset=name),
            optimizers=(
                OptimizerChoice("bat", swarm=100),
                OptimizerChoice("pso", swarm=100),
            ),
            **shared,
        )
        config.validate()
        print(f"== {name}")
        status |= _run(config, timing=args.timing)
    return status


def _cmd_demo_hawkes(args) -> int:
    shared = _demo_config(args)
    if args.iterations is None:
        shared["iterations"] = 300
    config = ExperimentConfig(
        objective=ObjectiveConfig(
            kind="hawkes",
            synthetic={
                "nu": 0.2,
                "a": 0.5,
                "b": 0.7,
                "horizon": 1430.0,
                "seed": shared["master_seed"],
            },
        ),
        optimizers=(
            OptimizerChoice("bat", swarm=30),
            OptimizerChoice("pso", swarm=30),
            OptimizerChoice("hs", swarm=30),
        ),
        **shared,
    )
    config.validate()
    return _run(config, timing=args.timing)


def _add_overrides(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, help="master seed override")
    parser.add_argument(
        "--format", choices=("plain", "csv", "markdown"), help="table format"
    )
    parser.add_argument("--out", help="write the table to this path")
    parser.add_argument("--replicates", type=int, help="replicate count override")
    parser.add_argument("--iterations", type=int, help="iteration count override")
    parser.add_argument(
        "--timing", action="store_true", help="include wall-clock columns"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="batopt", description="seeded optimizer benchmark harness"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured experiment")
    p_run.add_argument("config")
    _add_overrides(p_run)
    p_run.set_defaults(fn=_cmd_run)

    p_val = sub.add_parser("validate", help="validate a config file")
    p_val.add_argument("config")
    p_val.set_defaults(fn=_cmd_validate)

    p_data = sub.add_parser("datasets", help="dataset utilities")
    data_sub = p_data.add_subparsers(dest="subcommand", required=True)
    p_list = data_sub.add_parser("list", help="list bundled datasets")
    p_list.set_defaults(fn=_cmd_datasets_list)

    p_demo = sub.add_parser("demo", help="canned demonstration experiments")
    demo_sub = p_demo.add_subparsers(dest="subcommand", required=True)
    for name, fn in (
        ("williamson", _cmd_demo_williamson),
        ("hawkes", _cmd_demo_hawkes),
    ):
        p = demo_sub.add_parser(name)
        _add_overrides(p)
        p.set_defaults(fn=fn)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, DatasetError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
