"""opt: exact offline optimum of a small trace"""
import argparse
import logging

from msched.commands.common import load_trace, seed_line
from msched.core.config import settings
from msched.schemas.response import CommandResult
from msched.services.oracle import OracleService
from msched.utils.exceptions import AppException
from msched.utils.trace_io import format_schedule, write_schedule

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("opt", help="solve for the offline optimum")
    parser.add_argument("-i", "--input", required=True, help="trace file")
    parser.add_argument("--k", type=int, help="override the trace's K")
    parser.add_argument("--force", action="store_true", help="ignore the size guideline")
    parser.add_argument("-o", "--output", help="write the witness schedule here")
    parser.add_argument("--seed", type=int, default=None, help="echoed for provenance")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> CommandResult:
    """Print the optimal flow time and its witness"""
    seed = settings.DEFAULT_SEED if args.seed is None else args.seed
    try:
        trace = load_trace(args.input)
        result = OracleService.opt_flow_time(trace, K=args.k, force=args.force)
        output = [seed_line(seed), f"opt_flow={result.opt_flow}", f"nodes={result.nodes_explored}"]
        if args.output:
            write_schedule(result.witness, args.output)
        elif result.witness:
            output.extend(format_schedule(result.witness).splitlines())
        return CommandResult(output=output)
    except AppException as e:
        logger.error(f"Error in opt: {e.detail}")
        return CommandResult.failure(e)
