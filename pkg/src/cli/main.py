"""Command-line entry point for running overlay maintenance experiments."""

import argparse
import logging
import os
import sys
from pathlib import Path

from ..config.loader import dump_config, load_config
from ..config.schemas import ExperimentConfig
from ..errors import ConfigError, TopologyError
from ..experiment.harness import build_topology, run_experiment
from ..experiment.output import regenerate_aggregates, write_report
from ..experiment.storage import RUN_FILE_PATTERN
from .scenarios import get_scenario, list_scenarios, load_scenarios

logger = logging.getLogger(__name__)

OUT_ENV_VAR = "OVERLAY_SIM_OUT"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2


def default_out_dir() -> str:
    return os.environ.get(OUT_ENV_VAR, "out")


def _cli_overrides(args: argparse.Namespace) -> list[str]:
    overrides = list(args.set or [])
    if args.seed is not None:
        overrides.append(f"base_seed={args.seed}")
    if args.replicates is not None:
        overrides.append(f"replicates={args.replicates}")
    if args.protocol:
        overrides.append(f"protocols=[{', '.join(args.protocol)}]")
    return overrides


def _execute(cfg: ExperimentConfig, out_dir: Path, export_snapshots: bool = False) -> None:
    # an overlay that cannot be wired fails before anything is written
    build_topology(cfg.topology, cfg.base_seed)
    out_dir.mkdir(parents=True, exist_ok=True)
    dump_config(cfg, out_dir)
    report = run_experiment(cfg)
    write_report(report, out_dir, export_snapshots=export_snapshots)
    for protocol, protocol_report in report.protocols.items():
        if protocol_report.divergent_seeds:
            print(f"{protocol.value}: divergent runs for seeds {protocol_report.divergent_seeds}")


def cmd_run(
    config_path: str | Path | None,
    out_dir: str | Path,
    overrides: list[str] | None = None,
    export_snapshots: bool = False,
) -> int:
    """Run the experiment described by a configuration file.

    Args:
        config_path: YAML configuration (None for all defaults)
        out_dir: Directory receiving the CSV set and resolved configuration
        overrides: `key=value` strings applied on top of the file
        export_snapshots: Also write snapshot edge lists

    Returns:
        Process exit status
    """
    try:
        cfg = load_config(config_path, overrides)
        _execute(cfg, Path(out_dir), export_snapshots)
    except (ConfigError, TopologyError) as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    print(f"Results written to {out_dir}")
    return EXIT_OK


def cmd_scenario(
    name: str,
    out_dir: str | Path,
    overrides: list[str] | None = None,
    export_snapshots: bool = False,
) -> int:
    """Run a preconfigured scenario; variants go to their own sub-directories."""
    scenario = get_scenario(name)
    if scenario is None:
        print(f"Unknown scenario '{name}'. Valid names: {', '.join(list_scenarios())}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        for label, cfg in scenario.configs(overrides):
            target = Path(out_dir) / label if label else Path(out_dir)
            logger.info("Scenario %s%s", name, f" [{label}]" if label else "")
            _execute(cfg, target, export_snapshots)
    except (ConfigError, TopologyError) as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    print(f"Results written to {out_dir}")
    return EXIT_OK


def cmd_list() -> int:
    for name, scenario in load_scenarios().items():
        print(f"{name:<22} {scenario.description}")
    return EXIT_OK


def cmd_report(out_dir: str | Path) -> int:
    """Rebuild aggregate CSVs from the run CSVs found in `out_dir`."""
    out = Path(out_dir)
    if not out.is_dir():
        print(f"I/O error: {out} is not a directory", file=sys.stderr)
        return EXIT_IO
    protocols = sorted({
        match.group("protocol")
        for match in (RUN_FILE_PATTERN.match(p.name) for p in out.iterdir())
        if match
    })
    try:
        written = regenerate_aggregates(out, protocols)
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    print(f"Regenerated {len(written)} aggregate files in {out}")
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=default_out_dir(),
                        help=f"Output directory (default: ${OUT_ENV_VAR} or ./out)")
    parser.add_argument("--seed", type=int, help="Base seed of the replicates")
    parser.add_argument("--replicates", type=int, help="Number of paired seeds")
    parser.add_argument("--protocol", action="append", choices=["none", "p2n", "pecc"],
                        help="Protocol to run (repeatable; default: all)")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="Override a configuration key, e.g. topology.gamma=0.3")
    parser.add_argument("--export-snapshots", action="store_true",
                        help="Write snapshot edge lists at the snapshot round")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="overlay-sim",
        description="Self-healing P2P overlay simulator",
    )
    parser.add_argument("--log-level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run an experiment from a configuration file")
    run.add_argument("--config", help="YAML run configuration")
    _add_common(run)

    scenario = sub.add_parser("scenario", help="Run a preconfigured scenario")
    scenario.add_argument("name", help="Scenario name (see `list`)")
    _add_common(scenario)

    sub.add_parser("list", help="List the preconfigured scenarios")

    report = sub.add_parser("report", help="Rebuild aggregate CSVs from run CSVs")
    report.add_argument("out_dir", help="Directory holding run_<protocol>_<seed>.csv files")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT)

    if args.command == "run":
        return cmd_run(args.config, args.out, _cli_overrides(args), args.export_snapshots)
    if args.command == "scenario":
        return cmd_scenario(args.name, args.out, _cli_overrides(args), args.export_snapshots)
    if args.command == "list":
        return cmd_list()
    return cmd_report(args.out_dir)


if __name__ == "__main__":
    sys.exit(main())
