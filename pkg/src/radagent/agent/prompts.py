"""Prompt builders for the planner/executor/verifier chat calls.

Each prompt opens with a stable marker phrase so scripted transcripts can
match requests robustly; the markers are exported for transcript authors.
"""
from __future__ import annotations

from .types import ActionRecord, CaseTrace, PlannedAction, Query, ToolSpec

GUIDELINE_MARKER = "Draft a case guideline"
PLAN_MARKER = "Select the next action"
COMMAND_MARKER = "Emit the tool command"
VERIFY_MARKER = "Audit the case memory"

_JSON_RULES = "Reply with exactly one JSON object and nothing else."


def describe_tool(spec: ToolSpec) -> str:
    if spec.args:
        args = ", ".join(
            f"{a.name}:{a.kind}{'' if a.required else '?'}" for a in spec.args
        )
    else:
        args = "none"
    return f"- {spec.name}: {spec.description} (args: {args})"


def tool_listing(specs: list[ToolSpec]) -> str:
    return "\n".join(describe_tool(s) for s in specs)


def guideline_prompt(query: Query, specs: list[ToolSpec]) -> tuple[str, str]:
    """(system, user) for the one-shot case guideline."""
    system = (
        "You are the planning module of a radiology reporting engine. "
        f"{GUIDELINE_MARKER}: a short numbered plan describing how to satisfy "
        "the request with the tools at hand. Plain text, no JSON."
    )
    user = (
        f"Case {query.case_id}, organ target {query.organ}.\n"
        f"Request: {query.text}\n\n"
        f"Available tools:\n{tool_listing(specs)}"
    )
    return system, user


def plan_prompt(trace: CaseTrace, specs: list[ToolSpec]) -> tuple[str, str]:
    system = (
        f"{PLAN_MARKER} for the case. Pick one tool that moves the case "
        "forward and state the intermediate goal it serves. "
        f'{_JSON_RULES} Keys: "goal", "tool", "rationale".'
    )
    user = (
        f"Guideline:\n{trace.guideline}\n\n"
        f"Progress so far:\n{trace.memory_summary()}\n\n"
        f"Tools:\n{tool_listing(specs)}"
    )
    return system, user


def command_prompt(action: PlannedAction, spec: ToolSpec, trace: CaseTrace) -> tuple[str, str]:
    system = (
        f"{COMMAND_MARKER} for tool '{spec.name}'. Fill every required "
        "argument; reference stored artifacts as \"@key\" strings. "
        f'{_JSON_RULES} Keys: "arguments" (an object).'
    )
    arg_lines = "\n".join(
        f"- {a.name} ({a.kind}{', required' if a.required else ', optional'}): {a.description}"
        for a in spec.args
    ) or "(no arguments)"
    user = (
        f"Goal: {action.goal}\nRationale: {action.rationale}\n\n"
        f"Argument schema:\n{arg_lines}\n\n"
        f"Progress so far:\n{trace.memory_summary()}"
    )
    return system, user


def verify_prompt(
    trace: CaseTrace, pending: ActionRecord | None = None
) -> tuple[str, str]:
    """`pending` is the just-executed record not yet appended to the
    trace; its outcome belongs in the audit view."""
    system = (
        f"{VERIFY_MARKER} and decide whether the request is fully satisfied. "
        f'{_JSON_RULES} Keys: "verdict" ("continue" or "stop"); when stopping, '
        '"report_key" naming the memory key of the finished report.'
    )
    summary = trace.memory_summary()
    if pending is not None:
        outcome = (
            pending.outcome
            if len(pending.outcome) <= 200
            else pending.outcome[:197] + "..."
        )
        summary += (
            f"\nstep {pending.step_index} (just executed): goal={pending.goal!r} "
            f"tool={pending.tool_name} status={pending.status} outcome={outcome!r}"
        )
    user = f"Request: {trace.query.text}\n\nProgress so far:\n{summary}"
    return system, user


def repair_prompt(error: str) -> str:
    return (
        f"Your previous reply could not be used: {error}. "
        f"{_JSON_RULES}"
    )
