"""check: validate a trace and optionally a schedule against it"""
import argparse
import logging

from msched.schemas.response import CommandResult
from msched.services.engine import EngineService
from msched.utils.exceptions import AppException
from msched.utils.trace_io import read_schedule, read_trace

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("check", help="validate a trace or schedule file")
    parser.add_argument("-i", "--input", required=True, help="trace file")
    parser.add_argument("--schedule", help="schedule file to check against the trace")
    parser.add_argument("--banks", type=int, choices=[1, 2], default=1)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> CommandResult:
    """Exit 1 when the trace breaks a rule or the schedule is infeasible"""
    try:
        trace = read_trace(args.input)
        violations = EngineService.validate_trace(trace)
        output = [f"trace valid={str(not violations).lower()} jobs={len(trace.jobs)}"]
        output.extend(str(violation) for violation in violations)
        ok = not violations

        if args.schedule and ok:
            check = EngineService.check_schedule(trace, read_schedule(args.schedule, trace), banks=args.banks)
            if check.feasible:
                output.append(f"schedule feasible=true flow={check.flow_total}")
            else:
                output.append(f"schedule feasible=false slot={check.first_bad_slot} reason={check.reason}")
                ok = False

        return CommandResult(
            success=ok,
            message="Success" if ok else "Check failed",
            exit_code=0 if ok else 1,
            output=output,
        )
    except AppException as e:
        logger.error(f"Error in check: {e.detail}")
        return CommandResult.failure(e)
