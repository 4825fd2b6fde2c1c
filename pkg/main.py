"""
Command-line entry point of the mixed-precision bit allocation engine.

Subcommands:
    train <config>          two-phase mixed-precision training
    allocate <sensitivity>  one-shot bit allocation from a sensitivity file
    sensitivity <config>    one probe pass, dump the sensitivity snapshot
    compare <config>        mixed precision vs. fixed precision vs. allocate-once

Exit codes: 0 on success, 1 on configuration or input errors, 2 on numeric
or infeasibility errors.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from mixed_precision import (
    AllocatorFactory,
    AvgBitwidth,
    BasicPhaseTracker,
    BatchSampler,
    ConfigError,
    ConfigurationLoader,
    ConstraintError,
    ContractError,
    FileReportOutputTarget,
    FormatError,
    GuardError,
    NumericError,
    PerElementAvg,
    QuantizationAwareTrainer,
    QuantizedMLP,
    ReportDispatcher,
    SensitivityEstimator,
    TrainingAborted,
    compare,
    load_config,
    objective,
    read_sensitivity_json,
    write_comparison_json,
    write_sensitivity_json,
)
from mixed_precision.io.writers import allocation_payload, atomic_write_text
from mixed_precision.quantsim import DEFAULT_B_MAX, DEFAULT_B_MIN

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2

logger = logging.getLogger("main")


def configure_logging(level_name: str) -> None:
    level = logging.getLevelName(level_name.upper())
    if not isinstance(level, int):
        level = logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(message)s", force=True)


def log_phase_transitions(transition) -> None:
    logger.info(
        "[PhaseTracker] Phase transition: %s → %s at iteration %d",
        transition.from_phase.value, transition.to_phase.value, transition.iteration,
    )
    if transition.metadata:
        logger.debug("[PhaseTracker] Transition metadata: %s", transition.metadata)


def _phase_tracker() -> BasicPhaseTracker:
    tracker = BasicPhaseTracker()
    tracker.register_phase_listener(log_phase_transitions)
    return tracker


def _report_dispatcher(directory: Path) -> ReportDispatcher:
    dispatcher = ReportDispatcher()
    target = FileReportOutputTarget()
    if target.initialize({"output_directory": directory}):
        dispatcher.add_target(target)
    return dispatcher


def run_train(args: argparse.Namespace, environment: dict) -> int:
    config = load_config(args.config, environment)
    train_set, test_set = config.DATASET.load()
    dispatcher = _report_dispatcher(config.OUTPUT_DIRECTORY)
    trainer = QuantizationAwareTrainer(config.MODEL_SPEC, config.TRAIN_CONFIG, _phase_tracker())
    try:
        report = trainer.train(train_set, test_set)
    except TrainingAborted as e:
        if e.report is not None:
            dispatcher.dispatch_report(e.report)
        raise
    dispatcher.dispatch_report(report)
    print(json.dumps(report.summary(), indent=2))
    return EXIT_OK


def run_sensitivity(args: argparse.Namespace, environment: dict) -> int:
    config = load_config(args.config, environment)
    train_config = config.TRAIN_CONFIG
    constraint = train_config.constraint
    train_set, _ = config.DATASET.load()

    model = QuantizedMLP(config.MODEL_SPEC, constraint.b_min, constraint.b_max, constraint.b_max)
    model.initialize_ranges(train_set)
    seeds = np.random.SeedSequence(train_config.seed).generate_state(3)
    batch = BatchSampler(train_set, train_config.batch_size, int(seeds[0])).next_batch()

    estimator = SensitivityEstimator(train_config.gamma, train_config.sensitivity_period, train_config.clip_sensitivities)
    estimator.update(model, batch)
    snapshot = estimator.snapshot(model.quantizers(), iteration=0)
    path = write_sensitivity_json(snapshot, config.OUTPUT_DIRECTORY / "sensitivity.json")
    logger.info("[Main] sensitivity snapshot written to %s", path)
    print(path)
    return EXIT_OK


def run_allocate(args: argparse.Namespace, environment: dict) -> int:
    problem, iteration = read_sensitivity_json(args.sensitivity)
    if args.per_element:
        beta_a = args.beta_a if args.beta_a is not None else args.beta
        constraint = PerElementAvg(args.beta, beta_a, args.b_min, args.b_max)
    else:
        constraint = AvgBitwidth(args.beta, args.b_min, args.b_max)
    allocator = AllocatorFactory.create_allocator(args.solver)
    allocation = allocator.allocate(problem, constraint)
    payload = allocation_payload(allocation, constraint.to_dict(), objective(allocation, problem))
    text = json.dumps(payload, indent=2) + "\n"
    if args.output:
        path = atomic_write_text(args.output, text)
        logger.info("[Main] allocation from iteration %d written to %s", iteration, path)
    sys.stdout.write(text)
    return EXIT_OK


def run_compare(args: argparse.Namespace, environment: dict) -> int:
    config = load_config(args.config, environment)
    train_set, test_set = config.DATASET.load()
    reports = compare(config.MODEL_SPEC, config.TRAIN_CONFIG, train_set, test_set, config.COMPARE_SCHEDULES)
    dispatcher = _report_dispatcher(config.OUTPUT_DIRECTORY)
    for label, report in reports.items():
        dispatcher.dispatch_report(report, {"prefix": f"{label}_"})
    path = write_comparison_json(reports, config.OUTPUT_DIRECTORY / "comparison.json")
    logger.info("[Main] comparison written to %s", path)
    print(json.dumps({label: report.summary() for label, report in reports.items()}, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixed-precision-bitopt",
        description="Sensitivity-driven mixed-precision bitwidth allocation during quantization-aware training.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    train_parser = subparsers.add_parser("train", help="two-phase mixed-precision training")
    train_parser.add_argument("config", type=Path, help="JSON run configuration")
    train_parser.set_defaults(handler=run_train)

    allocate_parser = subparsers.add_parser("allocate", help="one-shot allocation from a sensitivity file")
    allocate_parser.add_argument("sensitivity", type=Path, help="sensitivity JSON written by train or sensitivity")
    allocate_parser.add_argument("--beta", type=float, required=True, help="average bitwidth target")
    allocate_parser.add_argument("--per-element", action="store_true",
                                 help="element-weighted budget, separately for weights and activations")
    allocate_parser.add_argument("--beta-a", type=float, default=None,
                                 help="activation target with --per-element (default: --beta)")
    allocate_parser.add_argument("--solver", choices=AllocatorFactory.get_available_allocators(), default="greedy")
    allocate_parser.add_argument("--b-min", type=int, default=DEFAULT_B_MIN)
    allocate_parser.add_argument("--b-max", type=int, default=DEFAULT_B_MAX)
    allocate_parser.add_argument("--output", type=Path, default=None, help="also write the allocation JSON here")
    allocate_parser.set_defaults(handler=run_allocate)

    sensitivity_parser = subparsers.add_parser("sensitivity", help="one probe pass, dump the snapshot")
    sensitivity_parser.add_argument("config", type=Path)
    sensitivity_parser.set_defaults(handler=run_sensitivity)

    compare_parser = subparsers.add_parser("compare", help="mixed precision vs. fixed precision vs. allocate-once")
    compare_parser.add_argument("config", type=Path)
    compare_parser.set_defaults(handler=run_compare)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the mixed-precision bit allocation CLI."""
    environment = ConfigurationLoader.load_configuration()
    configure_logging(environment["log_level"])
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors, which would read as a numeric failure.
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG
    try:
        return args.handler(args, environment)
    except (ConfigError, FormatError, ContractError, OSError) as e:
        logger.error("[Main] %s", e)
        return EXIT_CONFIG
    except (NumericError, ConstraintError, GuardError) as e:
        logger.error("[Main] %s", e)
        return EXIT_NUMERIC


# --- Main ---
if __name__ == "__main__":
    sys.exit(main())
