"""
Command-line interface for Ajnata experiments

This is a thin adapter layer that maps CLI arguments to the AjnataRunner API.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from nikhil.ajnata.ajnata_runner import AjnataRunner
from nikhil.ajnata.domain.exceptions import AjnataError
from nikhil.ajnata.domain.experiment.config import ExperimentConfig, LoggingConfig, validate_config


class Colors:
    HEADER = '\033[95m'
    OKGREEN = '\033[92m'
    WARNING = '\033[93m'
    FAIL = '\033[91m'
    ENDC = '\033[0m'
    BOLD = '\033[1m'


def print_header(title: str):
    print(f"\n{Colors.HEADER}{Colors.BOLD}{'='*60}{Colors.ENDC}")
    print(f"{Colors.HEADER}{Colors.BOLD}  Ajnata {title}{Colors.ENDC}")
    print(f"{Colors.HEADER}{Colors.BOLD}{'='*60}{Colors.ENDC}\n")


def print_success(msg: str):
    print(f"{Colors.OKGREEN}✅ {msg}{Colors.ENDC}")


def print_warning(msg: str):
    print(f"{Colors.WARNING}⚠️  {msg}{Colors.ENDC}")


def print_error(msg: str):
    print(f"{Colors.FAIL}❌ {msg}{Colors.ENDC}", file=sys.stderr)


def create_parser() -> argparse.ArgumentParser:
    """Create argument parser"""
    parser = argparse.ArgumentParser(
        prog='ajnata',
        description='Unknown distillation from video proposal streams for object-level OOD detection',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Check a config without running it
  ajnata validate config/ajnata_config.example.yaml

  # Run the acceptance benchmark
  ajnata run config/ajnata_config.example.yaml

  # Same config, another seed, separate directory
  ajnata run config/ajnata_config.example.yaml --seed 8 --output-dir runs/seed8

Outputs (per run directory):
  manifest.json, train_log.csv, params.jsonl, metrics_<method>.yaml,
  scores_<method>.csv, hist_<method>.csv, unknown_energy_hist.csv
  Sweeps add one subdirectory per value and summary.csv.

  See config/ajnata_config.example.yaml for template.
        """
    )
    parser.add_argument(
        '--verbose', '-v',
        action='store_true',
        help='Debug logging'
    )
    parser.add_argument(
        '--version',
        action='version',
        version='%(prog)s 0.1.0 (Ajnata)'
    )

    subparsers = parser.add_subparsers(dest='command', required=True)

    run_parser = subparsers.add_parser('run', help='Train, evaluate and write all reports')
    run_parser.add_argument('config', type=str, help='Path to ajnata_config.yaml')
    run_parser.add_argument('--output-dir', type=str, help='Override output.dir')
    run_parser.add_argument('--seed', type=int, help='Override sim.seed and train.seed')

    validate_parser = subparsers.add_parser('validate', help='Check a config without running it')
    validate_parser.add_argument('config', type=str, help='Path to ajnata_config.yaml')

    return parser


def setup_logging(level: str, fmt: str, verbose: bool = False):
    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, level.upper()),
        format=fmt,
        datefmt='%Y-%m-%d %H:%M:%S',
    )


def _logging_settings(config_path: str):
    """Logging section of the config, or defaults when the file cannot be read"""
    try:
        return ExperimentConfig.from_yaml(Path(config_path)).logging
    except AjnataError:
        return LoggingConfig()


def cmd_validate(args) -> int:
    print_header("Config Validation")
    report = validate_config(Path(args.config))
    for warning in report.warnings:
        print_warning(warning)
    if not report.ok:
        for error in report.errors:
            print_error(error)
        print_error(f"{args.config}: {len(report.errors)} error(s)")
        return 1
    print_success(f"{args.config}: valid ({len(report.warnings)} warning(s))")
    return 0


def cmd_run(args) -> int:
    print_header("Experiment")
    runner = AjnataRunner.from_cli_args(args)
    for warning in runner.config.warnings():
        print_warning(warning)

    result = runner.run()

    print(f"\n{Colors.BOLD}Results:{Colors.ENDC}\n")
    for run in result.runs:
        prefix = f"[{run.name}] " if run.name else ""
        for method, report in run.reports.items():
            initial = run.initial_reports[method]
            print(f"  {prefix}{method:7s} auroc={report.auroc:.4f} fpr95={report.fpr95:.4f} "
                  f"(at init: auroc={initial.auroc:.4f})")
    if result.summary_path:
        print_success(f"Sweep summary: {result.summary_path}")
    print_success(f"Outputs written to {result.output_dir}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point"""
    parser = create_parser()
    args = parser.parse_args(argv)

    settings = _logging_settings(args.config)
    setup_logging(settings.level, settings.format, verbose=args.verbose)

    try:
        if args.command == 'validate':
            return cmd_validate(args)
        return cmd_run(args)
    except AjnataError as e:
        print_error(str(e))
        return 1


if __name__ == "__main__":
    sys.exit(main())
