"""msched command-line entry point"""
from typing import List, Optional
import argparse
import logging
import sys

from msched.commands import check, exp, gen, opt, ratio, sim
from msched.core.config import settings

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msched",
        description="Slot-based multi-server job scheduling simulator and analysis toolkit",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Include commands
    gen.register(subparsers)
    sim.register(subparsers)
    opt.register(subparsers)
    ratio.register(subparsers)
    exp.register(subparsers)
    check.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, dispatch, print results and return the exit status"""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        result = args.handler(args)
    except Exception as e:
        logger.error(f"Unexpected error in {args.command}: {str(e)}")
        print(f"error: {e}", file=sys.stderr)
        return 1

    for line in result.output:
        print(line)
    if result.error:
        print(f"error: {result.error}", file=sys.stderr)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
