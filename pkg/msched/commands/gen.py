"""gen: write a generated trace"""
import argparse
import logging

from msched.commands.common import seed_line
from msched.core.config import settings
from msched.models.job import Trace
from msched.schemas.response import CommandResult
from msched.services.adversary import AdversaryService, NeedDistribution
from msched.utils.exceptions import AppException, UsageError
from msched.utils.trace_io import format_trace, write_trace

logger = logging.getLogger(__name__)

SCENARIOS = ["sfa-lb", "sfa-gap", "greedy-lb", "det-lb", "rand-lb", "stochastic"]


def register(subparsers) -> None:
    parser = subparsers.add_parser("gen", help="generate a trace")
    parser.add_argument("--scenario", required=True, choices=SCENARIOS)
    parser.add_argument("--k", type=int, required=True, help="server count K")
    parser.add_argument("--t", type=int, help="main-phase length T")
    parser.add_argument("--l", type=int, default=0, help="tail pairs L (det-lb)")
    parser.add_argument("--l1", type=int, help="first-phase length (greedy-lb)")
    parser.add_argument("--l2", type=int, help="pair-phase length (greedy-lb)")
    parser.add_argument("--policy", default="ra", help="policy the adaptive adversary plays against")
    parser.add_argument("--p", type=float, help="batch probability (rand-lb) or spike probability")
    parser.add_argument("--arr", type=float, help="mean arrivals per slot (stochastic)")
    parser.add_argument("--horizon", type=int, default=None, help="arrival horizon (stochastic)")
    parser.add_argument("--need-dist", choices=[d.value for d in NeedDistribution], default="uniform")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("-o", "--output", help="trace file to write; stdout when omitted")
    parser.set_defaults(handler=handle)


def _required(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{name.replace('_', '-')}" for name in names if getattr(args, name) is None]
    if missing:
        raise UsageError(f"--scenario {args.scenario} requires {', '.join(missing)}")


def build(args: argparse.Namespace, seed: int) -> Trace:
    """Generate the requested trace"""
    if args.scenario == "sfa-lb":
        _required(args, "t")
        return AdversaryService.sfa_lb_trace(args.k, args.t)
    if args.scenario == "sfa-gap":
        _required(args, "t")
        return AdversaryService.sfa_gap_trace(args.k, args.t)
    if args.scenario == "greedy-lb":
        _required(args, "l1", "l2")
        return AdversaryService.greedy_lb_trace(args.k, args.l1, args.l2)
    if args.scenario == "det-lb":
        _required(args, "t")
        outcome = AdversaryService.adaptive_det_lb(args.policy, args.k, args.t, args.l)
        logger.info(f"Adaptive adversary against {args.policy}: t1={outcome.t1}, branch={outcome.session.phase.value}")
        return outcome.trace
    if args.scenario == "rand-lb":
        _required(args, "t")
        return AdversaryService.rand_lb_trace(args.k, args.t, args.p, seed)
    _required(args, "arr")
    horizon = settings.EXPERIMENT_HORIZON if args.horizon is None else args.horizon
    return AdversaryService.stochastic_trace(args.k, args.arr, horizon, args.need_dist, seed, p=args.p)


def handle(args: argparse.Namespace) -> CommandResult:
    """Generate a trace and write it"""
    seed = settings.DEFAULT_SEED if args.seed is None else args.seed
    try:
        trace = build(args, seed)
        comments = [f"seed={seed}", f"scenario={args.scenario}"]
        if args.output:
            write_trace(trace, args.output, comments)
            return CommandResult(message=f"Wrote {len(trace.jobs)} jobs to {args.output}",
                                 output=[seed_line(seed), f"jobs={len(trace.jobs)}"])
        return CommandResult(output=format_trace(trace, comments).splitlines())
    except AppException as e:
        logger.error(f"Error in gen: {e.detail}")
        return CommandResult.failure(e)
