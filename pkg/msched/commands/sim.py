"""sim: run a policy on a trace file"""
import argparse
import logging
from typing import List

from msched.commands.common import load_trace, seed_line
from msched.core.config import settings
from msched.schemas.response import CommandResult
from msched.services.harness import HarnessService
from msched.services.monitors import MonitorService
from msched.services.oracle import OracleService
from msched.services.policies import POLICIES, policy_help
from msched.utils.exceptions import AppException, UsageError
from msched.utils.trace_io import format_monitors, write_schedule

logger = logging.getLogger(__name__)

MONITORS = ["relaxed", "full_bound", "volume_drift", "work", "packing"]
ORACLE_MONITORS = {"full_bound", "volume_drift"}


def register(subparsers) -> None:
    parser = subparsers.add_parser("sim", help="simulate a policy")
    parser.add_argument("-i", "--input", required=True, help="trace file")
    parser.add_argument("--policy", required=True, choices=list(POLICIES), help=policy_help())
    parser.add_argument("--k", type=int, help="override the trace's K")
    parser.add_argument("--banks", type=int, choices=[1, 2], help="override the policy's bank count")
    parser.add_argument("--monitors", default="none",
                        help=f"comma-separated subset of {','.join(MONITORS)}, 'all' or 'none'")
    parser.add_argument("--force", action="store_true", help="run the exact solver past its size guideline")
    parser.add_argument("--dump-schedule", help="write the run's schedule to this file")
    parser.add_argument("--seed", type=int, default=None, help="echoed for provenance")
    parser.set_defaults(handler=handle)


def parse_monitors(text: str) -> List[str]:
    if text == "none":
        return []
    if text == "all":
        return list(MONITORS)
    names = [name.strip() for name in text.split(",") if name.strip()]
    unknown = [name for name in names if name not in MONITORS]
    if unknown:
        raise UsageError(f"--monitors: unknown monitor(s) {', '.join(unknown)}")
    return names


def handle(args: argparse.Namespace) -> CommandResult:
    """Simulate, attach monitors and print the run summary"""
    seed = settings.DEFAULT_SEED if args.seed is None else args.seed
    try:
        names = parse_monitors(args.monitors)
        trace = load_trace(args.input)
        oracle = None
        if ORACLE_MONITORS & set(names):
            oracle = OracleService.opt_flow_time(trace, K=args.k, force=args.force)

        bound = {
            "relaxed": MonitorService.monitor_relaxed,
            "full_bound": lambda run: MonitorService.monitor_full_bound(run, oracle),
            "volume_drift": lambda run: MonitorService.monitor_volume_drift(run, trace, oracle),
            "work": lambda run: MonitorService.monitor_work(run, trace),
            "packing": lambda run: MonitorService.monitor_packing(run, trace),
        }
        run = HarnessService.simulate(
            trace, args.policy, K=args.k, banks=args.banks, monitors=[bound[name] for name in names]
        )
        if args.dump_schedule:
            write_schedule(run.schedule, args.dump_schedule)

        output = [
            seed_line(seed),
            f"policy={run.policy} K={run.K} banks={run.banks} jobs={run.job_count} "
            f"flow={run.flow_total} mean={run.mean_flow:.4f} slots={run.slots}",
        ]
        output.extend(format_monitors(run.monitor_reports))
        holds = run.all_monitors_hold()
        return CommandResult(
            success=holds,
            message="Success" if holds else "Monitor violated",
            exit_code=0 if holds else 1,
            output=output,
        )
    except AppException as e:
        logger.error(f"Error in sim: {e.detail}")
        return CommandResult.failure(e)
