"""exp: run a preset experiment and write its CSV"""
import argparse
import logging
from pathlib import Path

from msched.commands.common import parse_int_list, seed_line
from msched.schemas.experiment import ExperimentScenario
from msched.schemas.response import CommandResult
from msched.services.experiments import ExperimentService
from msched.utils.exceptions import AppException, ValidationError
from msched.utils.trace_io import format_rows

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("exp", help="run an experiment grid")
    parser.add_argument("--scenario", required=True, choices=[s.value for s in ExperimentScenario])
    parser.add_argument("--trials", type=int, help="realizations per cell")
    parser.add_argument("--seed", type=int, default=None, help="seed of the first trial")
    parser.add_argument("--workers", type=int, help="worker processes for trials")
    parser.add_argument("--horizon", type=int, help="arrival horizon in slots")
    parser.add_argument("--k", help="comma-separated K values replacing the preset's")
    parser.add_argument("--policies", help="comma-separated policies replacing the preset's")
    parser.add_argument("--references", action="store_true",
                        help="append reference_value and flow_ratio columns when the rows carry them")
    parser.add_argument("-o", "--output", help="CSV file to write; stdout when omitted")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> CommandResult:
    """Run the grid and emit one CSV row per cell"""
    try:
        config = ExperimentService.preset(
            args.scenario, trials=args.trials, seed_base=args.seed, workers=args.workers, horizon=args.horizon
        )
        updates = {}
        if args.k:
            updates["k_values"] = parse_int_list(args.k)
        if args.policies:
            updates["policies"] = [name.strip() for name in args.policies.split(",") if name.strip()]
        if updates:
            try:
                config = config.model_validate({**config.model_dump(), **updates})
            except ValueError as exc:
                raise ValidationError(str(exc))

        logger.info(f"Running {config.scenario.value}: K={config.k_values}, trials={config.trials}")
        rows = ExperimentService.run_experiment(config)
        extended = args.references or config.scenario == ExperimentScenario.rand_lb_theta
        csv_text = format_rows(rows, extended=extended)
        output = [seed_line(config.seed_base)]
        if args.output:
            Path(args.output).write_text(csv_text)
            output.append(f"rows={len(rows)}")
        else:
            output.extend(csv_text.splitlines())
        return CommandResult(output=output)
    except AppException as e:
        logger.error(f"Error in exp: {e.detail}")
        return CommandResult.failure(e)
