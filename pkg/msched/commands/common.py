"""Helpers shared by the subcommands"""
import logging

from msched.models.job import Trace
from msched.services.engine import EngineService
from msched.utils.exceptions import ValidationError
from msched.utils.trace_io import read_trace

logger = logging.getLogger(__name__)


def load_trace(path: str) -> Trace:
    """Read a trace file and reject it if any rule is broken"""
    trace = read_trace(path)
    violations = EngineService.validate_trace(trace)
    if violations:
        raise ValidationError(f"{path}: " + "; ".join(str(violation) for violation in violations[:5]))
    logger.debug(f"Loaded {len(trace.jobs)} jobs from {path}")
    return trace


def seed_line(seed: int) -> str:
    return f"# seed={seed}"


def parse_int_list(text: str) -> list:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValidationError(f"Expected a comma-separated list of integers, got '{text}'")
