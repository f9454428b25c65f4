"""Trace, schedule and experiment file formats"""
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union
import csv
import io
import re

from msched.models.job import SizeMode, Trace, TraceMode
from msched.models.run import MonitorReport
from msched.models.state import SlotDecision
from msched.schemas.experiment import ExperimentRow
from msched.utils.exceptions import ValidationError

HEADER = re.compile(r"^#\s*K=(\d+)\s+mode=(\w+)\s+size=(\w+)\s*$")
CSV_COLUMNS = ["scenario", "K", "param", "policy", "trials", "mean_per_job_flow"]

PathLike = Union[str, Path]


# ==================== TRACES ====================

def format_trace(trace: Trace, comments: Sequence[str] = ()) -> str:
    lines = [trace.header()]
    lines.extend(f"# {comment}" for comment in comments)
    lines.extend(f"{job.arrival},{job.size},{job.need}" for job in trace.jobs)
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> Trace:
    """Read the header, then one `arrival,size,need` record per line"""
    lines = text.splitlines()
    if not lines:
        raise ValidationError("line 1: empty trace file")
    match = HEADER.match(lines[0].strip())
    if match is None:
        raise ValidationError(f"line 1: expected '# K=<int> mode=<p2|gen> size=<unit|weighted>', got '{lines[0]}'")
    try:
        trace = Trace(K=int(match.group(1)), mode=TraceMode(match.group(2)), size_mode=SizeMode(match.group(3)))
    except ValueError as exc:
        raise ValidationError(f"line 1: {exc}")

    for number, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split(",")
        if len(fields) != 3:
            raise ValidationError(f"line {number}: expected arrival,size,need")
        try:
            arrival, size, need = (int(field) for field in fields)
            trace.add_job(arrival=arrival, need=need, size=size)
        except ValueError as exc:
            raise ValidationError(f"line {number}: {exc}")
    return trace


def read_trace(path: PathLike) -> Trace:
    try:
        return parse_trace(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValidationError(f"Cannot read trace {path}: {exc}")
    except UnicodeDecodeError as exc:
        raise ValidationError(f"Trace {path} is not UTF-8 text: {exc.reason}")


def write_trace(trace: Trace, path: PathLike, comments: Sequence[str] = ()) -> None:
    Path(path).write_text(format_trace(trace, comments))


# ==================== SCHEDULES ====================

def format_schedule(schedule: Sequence[SlotDecision]) -> str:
    """`slot: id,id,...`, with ` | ` before the free bank"""
    lines = []
    for slot, decision in enumerate(schedule, start=1):
        line = f"{slot}: " + ",".join(str(job_id) for job_id in sorted(decision.reserved))
        if decision.free:
            line += " | " + ",".join(str(job_id) for job_id in sorted(decision.free))
        lines.append(line.rstrip())
    return "\n".join(lines) + "\n"


def _ids(text: str, number: int) -> List[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise ValidationError(f"line {number}: job ids must be integers")


def parse_schedule(text: str, trace: Optional[Trace] = None) -> List[SlotDecision]:
    """Slots may be skipped; skipped slots are idle"""
    decisions = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        slot_text, sep, rest = line.partition(":")
        if not sep:
            raise ValidationError(f"line {number}: expected 'slot: ids'")
        try:
            slot = int(slot_text)
        except ValueError:
            raise ValidationError(f"line {number}: slot must be an integer")
        if slot < 1 or slot in decisions:
            raise ValidationError(f"line {number}: slot {slot} is out of order or repeated")
        reserved_text, _, free_text = rest.partition("|")
        reserved, free = _ids(reserved_text, number), _ids(free_text, number)

        def need(ids: List[int]) -> int:
            if trace is None:
                return 0
            return sum(trace.job(job_id).need for job_id in ids if trace.job(job_id) is not None)

        decisions[slot] = SlotDecision.model_construct(
            reserved=frozenset(reserved), free=frozenset(free),
            reserved_need=need(reserved), free_need=need(free),
        )
    last = max(decisions, default=0)
    return [decisions.get(slot, SlotDecision()) for slot in range(1, last + 1)]


def read_schedule(path: PathLike, trace: Optional[Trace] = None) -> List[SlotDecision]:
    try:
        return parse_schedule(Path(path).read_text(encoding="utf-8"), trace)
    except OSError as exc:
        raise ValidationError(f"Cannot read schedule {path}: {exc}")
    except UnicodeDecodeError as exc:
        raise ValidationError(f"Schedule {path} is not UTF-8 text: {exc.reason}")


def write_schedule(schedule: Sequence[SlotDecision], path: PathLike) -> None:
    Path(path).write_text(format_schedule(schedule))


# ==================== RESULTS ====================

def format_rows(rows: Sequence[ExperimentRow], extended: bool = False) -> str:
    """Experiment CSV; with `extended`, reference and ratio columns follow when some row has them"""
    columns = list(CSV_COLUMNS)
    if extended and any(row.reference_value is not None for row in rows):
        columns.append("reference_value")
    if extended and any(row.flow_ratio is not None for row in rows):
        columns.append("flow_ratio")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        values = row.model_dump()
        writer.writerow(["" if values[column] is None else _cell(values[column]) for column in columns])
    return buffer.getvalue()


def _cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def format_monitors(reports: Iterable[MonitorReport]) -> List[str]:
    return [report.to_line() for report in reports]
