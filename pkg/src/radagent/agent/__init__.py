"""Planner/executor/memory loop with structured tool commands and
append-only case traces."""
from .loop import (
    ToolContext,
    analyze_query,
    execute_command,
    generate_command,
    plan_next_action,
    run_case,
    verify_completion,
)
from .trace_io import ParsedTrace, dumps_trace, read_trace, write_trace
from .types import (
    ActionRecord,
    ArgSpec,
    CaseTrace,
    MemoryStore,
    PlannedAction,
    Query,
    Tool,
    ToolCommand,
    ToolRegistry,
    ToolResult,
    ToolSpec,
)

__all__ = [
    "Query",
    "ArgSpec",
    "ToolSpec",
    "PlannedAction",
    "ToolCommand",
    "ToolResult",
    "ActionRecord",
    "CaseTrace",
    "MemoryStore",
    "Tool",
    "ToolRegistry",
    "ToolContext",
    "analyze_query",
    "plan_next_action",
    "generate_command",
    "execute_command",
    "verify_completion",
    "run_case",
    "dumps_trace",
    "write_trace",
    "read_trace",
    "ParsedTrace",
]
