"""The planner/executor/memory loop.

Each iteration: plan the next action, turn it into a schema-valid tool
command, execute it, verify completion. Structured-output failures get
one repair reprompt, then the step lands as a status=error record; tool
exceptions are captured in the record and never crash the loop.

The time budget is enforced twice over: checked between steps, and
applied as a deadline on the in-flight step, whose body runs on a daemon
thread the loop simply stops waiting for. An abandoned step may have
stored artifacts, but its record is never appended, so the serialized
trace stays consistent.
"""
from __future__ import annotations

import queue
import threading
import time
from dataclasses import dataclass
from typing import Any, Callable

from ..errors import CaseAbortedError, GatewayError, StructuredOutputError
from ..gateway.core import Gateway
from ..gateway.types import chat_request
from ..volume.types import Volume
from .parsing import parse_command_args, parse_plan, parse_verdict, structured_chat
from .prompts import command_prompt, guideline_prompt, plan_prompt, verify_prompt
from .types import (
    ActionRecord,
    CaseTrace,
    PlannedAction,
    Query,
    ToolCommand,
    ToolRegistry,
    ToolSpec,
)

DETERMINISTIC_TICK = 0.001  # recorded wall time when timing is pinned


@dataclass
class ToolContext:
    """Everything a tool may need, bundled so tool signatures stay uniform."""

    query: Query
    volume: Volume | None
    gateway: Gateway
    memory: Any
    config: Any
    catalog: Any = None  # organ -> list of analysis items
    templates: Any = None  # list of report templates


def analyze_query(query: Query, specs: list[ToolSpec], gateway: Gateway) -> str:
    """One chat call producing the case guideline."""
    if not specs:
        raise ValueError("tool registry is empty")
    system, user = guideline_prompt(query, specs)
    text = gateway.chat(chat_request(system=system, user=user))
    if not text.strip():
        raise CaseAbortedError("backend returned an empty guideline")
    return text


def plan_next_action(
    trace: CaseTrace, registry: ToolRegistry, gateway: Gateway
) -> PlannedAction:
    if trace.terminal_status is not None:
        raise ValueError("trace is terminal")
    system, user = plan_prompt(trace, registry.specs())
    return structured_chat(gateway, system, user, lambda t: parse_plan(t, registry))


def generate_command(
    action: PlannedAction, spec: ToolSpec, trace: CaseTrace, gateway: Gateway
) -> ToolCommand:
    if action.tool_name != spec.name:
        raise ValueError(f"plan names {action.tool_name!r}, spec is {spec.name!r}")
    system, user = command_prompt(action, spec, trace)
    args = structured_chat(
        gateway, system, user, lambda t: parse_command_args(t, spec, trace.memory)
    )
    return ToolCommand(tool_name=spec.name, arguments=args)


def execute_command(
    command: ToolCommand,
    registry: ToolRegistry,
    ctx: ToolContext,
    step_index: int,
    action: PlannedAction,
    deterministic_timing: bool = False,
) -> ActionRecord:
    """Run the tool; failures become status=error records, never raises."""
    tool = registry.get(command.tool_name)
    t0 = time.monotonic()
    keys: list[str] = []
    try:
        resolved = {k: ctx.memory.resolve(v) for k, v in command.arguments.items()}
        result = tool.fn(ctx, resolved)
        for name, value in result.artifacts.items():
            keys.extend(ctx.memory.put(step_index, name, value))
        status, outcome = "ok", result.outcome
    except Exception as exc:
        status, outcome = "error", f"{type(exc).__name__}: {exc}"
    wall = DETERMINISTIC_TICK if deterministic_timing else round(time.monotonic() - t0, 6)
    return ActionRecord(
        step_index=step_index,
        goal=action.goal,
        tool_name=command.tool_name,
        rationale=action.rationale,
        arguments=command.arguments,
        status=status,
        outcome=outcome,
        artifact_keys=tuple(keys),
        wall_time=wall,
    )


def verify_completion(
    trace: CaseTrace, gateway: Gateway, pending: ActionRecord | None = None
) -> tuple[str, str | None, str | None]:
    """Returns (verdict, report_key, warning).

    A stop verdict must name a memory key holding a report object;
    anything else degrades to continue with a warning instead of
    trusting a bad reference.
    """
    if not trace.records and pending is None:
        raise ValueError("verification needs at least one record")
    system, user = verify_prompt(trace, pending)
    try:
        verdict, key = structured_chat(gateway, system, user, parse_verdict)
    except (StructuredOutputError, GatewayError) as exc:
        return "continue", None, f"verification reply unusable: {exc}"
    if verdict != "stop":
        return "continue", None, None
    if not trace.memory.has(key):
        return "continue", None, f"stop verdict named missing memory key {key!r}"
    value = trace.memory.get(key)
    if not (hasattr(value, "findings") and hasattr(value, "impression")):
        return "continue", None, f"memory key {key!r} does not hold a report"
    return "stop", key, None


def _error_record(step: int, action: PlannedAction | None, outcome: str) -> ActionRecord:
    return ActionRecord(
        step_index=step,
        goal=action.goal if action else "",
        tool_name=action.tool_name if action else None,
        rationale=action.rationale if action else "",
        arguments={},
        status="error",
        outcome=outcome,
        artifact_keys=(),
        wall_time=0.0,
    )


def _step_body(
    trace: CaseTrace,
    registry: ToolRegistry,
    gateway: Gateway,
    ctx: ToolContext,
    deterministic_timing: bool,
) -> tuple[ActionRecord, str | None, str | None]:
    """One full iteration; returns (record, stop_key, warning)."""
    step = len(trace.records) + 1
    try:
        action = plan_next_action(trace, registry, gateway)
    except (StructuredOutputError, GatewayError) as exc:
        return _error_record(step, None, f"planning failed: {exc}"), None, None

    spec = registry.get(action.tool_name).spec
    try:
        command = generate_command(action, spec, trace, gateway)
    except (StructuredOutputError, GatewayError) as exc:
        return (
            _error_record(step, action, f"command generation failed: {exc}"),
            None,
            None,
        )

    record = execute_command(
        command, registry, ctx, step, action, deterministic_timing
    )
    verdict, key, warning = verify_completion(trace, gateway, pending=record)
    return record, (key if verdict == "stop" else None), warning


def _with_deadline(fn: Callable[[], Any], deadline_s: float) -> Any | None:
    """Run fn on a daemon thread; None when the deadline passes first."""
    out: queue.Queue = queue.Queue(maxsize=1)

    def body() -> None:
        try:
            out.put(("ok", fn()))
        except BaseException as exc:
            out.put(("err", exc))

    threading.Thread(target=body, daemon=True).start()
    try:
        kind, value = out.get(timeout=deadline_s)
    except queue.Empty:
        return None
    if kind == "err":
        raise value
    return value


def run_case(
    query: Query,
    volume: Volume | None,
    registry: ToolRegistry,
    gateway: Gateway,
    config: Any,
    catalog: Any = None,
    templates: Any = None,
) -> tuple[Any | None, CaseTrace]:
    """Drive one case to a terminal status.

    Returns (final_report_or_None, trace). The trace is terminal on
    return: completed, step-cap, time-budget, or aborted (query analysis
    never got off the ground).
    """
    if len(registry) == 0:
        raise ValueError("tool registry is empty")
    trace = CaseTrace(query=query)
    start = time.monotonic()
    try:
        trace.guideline = analyze_query(query, registry.specs(), gateway)
    except (GatewayError, CaseAbortedError) as exc:
        trace.warn(f"query analysis failed: {exc}")
        trace.finish("aborted")
        return None, trace

    ctx = ToolContext(
        query=query,
        volume=volume,
        gateway=gateway,
        memory=trace.memory,
        config=config,
        catalog=catalog,
        templates=templates,
    )
    final_report: Any | None = None
    while True:
        if len(trace.records) >= config.max_steps:
            trace.finish("step-cap")
            break
        remaining = config.time_budget_s - (time.monotonic() - start)
        if remaining <= 0:
            trace.finish("time-budget")
            break
        result = _with_deadline(
            lambda: _step_body(
                trace, registry, gateway, ctx, config.deterministic_timing
            ),
            remaining,
        )
        if result is None:  # in-flight step hit the budget; abandon it
            trace.finish("time-budget")
            break
        record, stop_key, warning = result
        trace.append(record)
        if warning:
            trace.warn(warning)
        if stop_key is not None:
            final_report = trace.memory.get(stop_key)
            trace.finish("completed")
            break

    if final_report is None and trace.memory.has("report"):
        final_report = trace.memory.get("report")
    return final_report, trace
