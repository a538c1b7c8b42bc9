"""Trace serialization: JSON-lines with a header, one line per action
record, interleaved warning lines, and a terminal-status footer.

Lines are dumped with sorted keys and fixed separators so identical runs
produce identical bytes; golden tests pin the output of the bundled case.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .. import __version__
from .types import ActionRecord, CaseTrace


def _dump(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def record_line(r: ActionRecord) -> str:
    return _dump(
        {
            "step": r.step_index,
            "goal": r.goal,
            "tool": r.tool_name,
            "rationale": r.rationale,
            "arguments": r.arguments,
            "status": r.status,
            "outcome": r.outcome,
            "artifacts": list(r.artifact_keys),
            "wall_time": r.wall_time,
        }
    )


def dumps_trace(
    trace: CaseTrace, config_digest: str, engine_version: str = __version__
) -> str:
    """Serialize the whole trace; a prefix of the output is stable as the
    run appends further records."""
    header = {
        "query": {
            "text": trace.query.text,
            "case_id": trace.query.case_id,
            "organ": trace.query.organ,
        },
        "guideline": trace.guideline,
        "config_digest": config_digest,
        "engine_version": engine_version,
    }
    warnings_after: dict[int, list[str]] = {}
    for after_step, text in trace.warnings:
        warnings_after.setdefault(after_step, []).append(text)

    lines = [_dump(header)]
    for text in warnings_after.get(0, []):
        lines.append(_dump({"after_step": 0, "warning": text}))
    for r in trace.records:
        lines.append(record_line(r))
        for text in warnings_after.get(r.step_index, []):
            lines.append(_dump({"after_step": r.step_index, "warning": text}))
    if trace.terminal_status is not None:
        lines.append(_dump({"terminal_status": trace.terminal_status}))
    return "\n".join(lines) + "\n"


def write_trace(
    trace: CaseTrace,
    path: str | Path,
    config_digest: str,
    engine_version: str = __version__,
) -> bytes:
    blob = dumps_trace(trace, config_digest, engine_version).encode("utf-8")
    Path(path).write_bytes(blob)
    return blob


@dataclass
class ParsedTrace:
    header: dict
    records: list[dict] = field(default_factory=list)
    warnings: list[dict] = field(default_factory=list)
    terminal_status: str | None = None


def read_trace(path: str | Path) -> ParsedTrace:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"trace file {path} is empty")
    parsed = ParsedTrace(header=json.loads(lines[0]))
    for line in lines[1:]:
        obj = json.loads(line)
        if "terminal_status" in obj:
            parsed.terminal_status = obj["terminal_status"]
        elif "warning" in obj:
            parsed.warnings.append(obj)
        else:
            parsed.records.append(obj)
    return parsed
