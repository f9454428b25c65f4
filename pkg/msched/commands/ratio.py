"""ratio: exact competitive ratio of a policy on one trace"""
import argparse
import logging

from msched.commands.common import load_trace, seed_line
from msched.core.config import settings
from msched.schemas.response import CommandResult
from msched.services.harness import HarnessService
from msched.services.policies import POLICIES, policy_help
from msched.services.verification import VerificationService
from msched.utils.exceptions import AppException

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("ratio", help="F_policy / F_OPT as an exact fraction")
    parser.add_argument("-i", "--input", required=True, help="trace file")
    parser.add_argument("--policy", required=True, choices=list(POLICIES), help=policy_help())
    parser.add_argument("--k", type=int, help="override the trace's K")
    parser.add_argument("--banks", type=int, choices=[1, 2])
    parser.add_argument("--force", action="store_true", help="ignore the exact solver's size guideline")
    parser.add_argument("--seed", type=int, default=None, help="echoed for provenance")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> CommandResult:
    """Print the ratio and the policy's guarantee"""
    seed = settings.DEFAULT_SEED if args.seed is None else args.seed
    try:
        trace = load_trace(args.input)
        if args.k is not None:
            trace.K = args.k
        ratio = HarnessService.competitive_ratio(trace, args.policy, banks=args.banks, force=args.force)
        bound = VerificationService.ratio_bound(args.policy, trace)
        return CommandResult(output=[
            seed_line(seed),
            f"ratio = {ratio.numerator}/{ratio.denominator}",
            f"bound = {bound:g}",
        ])
    except AppException as e:
        logger.error(f"Error in ratio: {e.detail}")
        return CommandResult.failure(e)
