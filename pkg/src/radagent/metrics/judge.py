"""Agent-level judging: prompt export over finished case traces,
structured 1..5 score parsing, and per-dimension histograms."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from ..agent.parsing import extract_json
from ..agent.trace_io import dumps_trace
from ..agent.types import CaseTrace
from ..errors import EvaluationError

# (key, display name, what the judge grades)
DIMENSIONS = (
    (
        "analysis-process",
        "Analysis Process",
        "how well the run understood the query and framed the case guideline",
    ),
    (
        "tool-selection",
        "Tool Selection",
        "whether each goal was routed to the right tool",
    ),
    (
        "action-planning",
        "Action Planning",
        "whether steps were ordered and scoped to finish the case",
    ),
    (
        "action-execution",
        "Action Execution",
        "whether tool arguments were correct and results were used",
    ),
)

DIMENSION_KEYS = tuple(key for key, _, _ in DIMENSIONS)


@dataclass(frozen=True)
class JudgeScore:
    dimension: str
    score: int

    def __post_init__(self) -> None:
        if self.dimension not in DIMENSION_KEYS:
            raise ValueError(f"unknown dimension {self.dimension!r}")
        if isinstance(self.score, bool) or not isinstance(self.score, int):
            raise ValueError("score must be an integer")
        if not 1 <= self.score <= 5:
            raise ValueError(f"score {self.score} outside 1..5")


def _compose(trace_text: str) -> str:
    rubric = "\n".join(
        f"- {name} ({key}): {blurb}" for key, name, blurb in DIMENSIONS
    )
    contract = json.dumps({key: "integer 1..5" for key in DIMENSION_KEYS})
    return (
        "Grade the following agent run on four dimensions, each scored as "
        "an integer from 1 (poor) to 5 (excellent):\n"
        f"{rubric}\n\n"
        "The run is recorded below as one JSON object per line (header, "
        "action records, terminal status).\n\n"
        f"{trace_text}\n"
        f"Reply with exactly one JSON object of the form {contract} "
        "and nothing else."
    )


def export_judge_prompt(
    trace: CaseTrace, config_digest: str, engine_version: str | None = None
) -> str:
    """Judging prompt for a finished run; refuses in-flight traces."""
    if trace.terminal_status is None:
        raise EvaluationError("cannot judge a trace without a terminal status")
    if engine_version is None:
        text = dumps_trace(trace, config_digest)
    else:
        text = dumps_trace(trace, config_digest, engine_version)
    return _compose(text)


def judge_prompt_for_text(trace_text: str) -> str:
    """Same prompt, built from an already-serialized trace file."""
    lines = [l for l in trace_text.splitlines() if l.strip()]
    if not lines:
        raise EvaluationError("trace text is empty")
    try:
        last = json.loads(lines[-1])
    except json.JSONDecodeError as exc:
        raise EvaluationError("trace text is not valid JSONL") from exc
    if not isinstance(last, dict) or "terminal_status" not in last:
        raise EvaluationError("cannot judge a trace without a terminal status")
    return _compose(trace_text if trace_text.endswith("\n") else trace_text + "\n")


def parse_judge_reply(text: str) -> tuple[JudgeScore, ...]:
    try:
        obj = extract_json(text)
    except Exception as exc:
        raise EvaluationError(f"judge reply is not JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise EvaluationError("judge reply must be a JSON object")
    scores = []
    for key in DIMENSION_KEYS:
        value = obj.get(key)
        if isinstance(value, bool) or not isinstance(value, int):
            raise EvaluationError(f"dimension {key!r} needs an integer score")
        if not 1 <= value <= 5:
            raise EvaluationError(f"dimension {key!r} score {value} outside 1..5")
        scores.append(JudgeScore(dimension=key, score=value))
    extras = set(obj) - set(DIMENSION_KEYS)
    if extras:
        raise EvaluationError(f"unexpected dimensions {sorted(extras)}")
    return tuple(scores)


def aggregate_judge_scores(
    scores: Iterable[JudgeScore],
) -> dict[str, dict[int, int]]:
    """counts[dimension][score 1..5]; zero-filled so shapes are stable."""
    counts = {key: {s: 0 for s in range(1, 6)} for key in DIMENSION_KEYS}
    for score in scores:
        counts[score.dimension][score.score] += 1
    return counts
