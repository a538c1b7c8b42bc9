"""Agent-loop domain types: queries, tool specs, planned actions,
commands, records, the case trace and its artifact memory."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

ARG_KINDS = ("string", "integer", "real", "boolean", "list", "object")

_PY_KINDS: dict[str, tuple[type, ...]] = {
    "string": (str,),
    "integer": (int,),
    "real": (int, float),
    "boolean": (bool,),
    "list": (list,),
    "object": (dict,),
}


@dataclass(frozen=True)
class Query:
    text: str
    case_id: str
    organ: str

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("query text must be non-empty")
        if not self.case_id:
            raise ValueError("case id must be non-empty")


@dataclass(frozen=True)
class ArgSpec:
    name: str
    kind: str
    required: bool = True
    description: str = ""

    def __post_init__(self) -> None:
        if self.kind not in ARG_KINDS:
            raise ValueError(f"kind {self.kind!r} not in {ARG_KINDS}")

    def accepts(self, value: Any) -> bool:
        # bool is an int subclass; keep integer/real strictly numeric
        if self.kind in ("integer", "real") and isinstance(value, bool):
            return False
        return isinstance(value, _PY_KINDS[self.kind])


@dataclass(frozen=True)
class ToolSpec:
    name: str
    description: str
    args: tuple[ArgSpec, ...] = ()

    def __post_init__(self) -> None:
        names = [a.name for a in self.args]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate argument names in tool {self.name}")

    def arg(self, name: str) -> ArgSpec | None:
        for a in self.args:
            if a.name == name:
                return a
        return None


@dataclass(frozen=True)
class PlannedAction:
    goal: str
    tool_name: str
    rationale: str = ""


@dataclass(frozen=True)
class ToolCommand:
    tool_name: str
    arguments: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ToolResult:
    outcome: str
    artifacts: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ActionRecord:
    """One loop iteration. tool_name is None only when planning or command
    generation failed twice and no action could be formed."""

    step_index: int
    goal: str
    tool_name: str | None
    rationale: str
    arguments: dict[str, Any]
    status: str  # "ok" | "error"
    outcome: str
    artifact_keys: tuple[str, ...] = ()
    wall_time: float = 0.0

    def __post_init__(self) -> None:
        if self.step_index < 1:
            raise ValueError("step_index is 1-based")
        if self.status not in ("ok", "error"):
            raise ValueError(f"status {self.status!r} not in (ok, error)")


class MemoryStore:
    """Step-keyed artifact store. Each artifact lands under
    "step{k}.{name}" and a latest-wins alias "{name}"."""

    def __init__(self) -> None:
        self._data: dict[str, Any] = {}

    def put(self, step: int, name: str, value: Any) -> list[str]:
        key = f"step{step}.{name}"
        self._data[key] = value
        self._data[name] = value
        return [key]

    def has(self, key: str) -> bool:
        return key in self._data

    def get(self, key: str) -> Any:
        if key not in self._data:
            raise KeyError(f"memory has no key {key!r}")
        return self._data[key]

    def resolve(self, value: Any) -> Any:
        """Strings starting with '@' dereference a memory key."""
        if isinstance(value, str) and value.startswith("@"):
            return self.get(value[1:])
        return value

    def keys(self) -> list[str]:
        return list(self._data.keys())


TERMINAL_STATUSES = ("completed", "step-cap", "time-budget", "aborted")


@dataclass
class CaseTrace:
    query: Query
    guideline: str = ""
    records: list[ActionRecord] = field(default_factory=list)
    warnings: list[tuple[int, str]] = field(default_factory=list)  # (after_step, text)
    memory: MemoryStore = field(default_factory=MemoryStore)
    terminal_status: str | None = None

    def append(self, record: ActionRecord) -> None:
        if self.terminal_status is not None:
            raise ValueError("trace is terminal; no further records")
        expected = len(self.records) + 1
        if record.step_index != expected:
            raise ValueError(
                f"step_index {record.step_index}, expected {expected} (no gaps)"
            )
        self.records.append(record)

    def warn(self, text: str) -> None:
        self.warnings.append((len(self.records), text))

    def finish(self, status: str) -> None:
        if status not in TERMINAL_STATUSES:
            raise ValueError(f"unknown terminal status {status!r}")
        self.terminal_status = status

    def memory_summary(self, full_tail: int = 5) -> str:
        """Bounded rolling view: one-line digests of old steps, fuller
        text for the last few, plus the memory key list."""
        lines: list[str] = []
        split = max(0, len(self.records) - full_tail)
        for r in self.records[:split]:
            lines.append(f"step {r.step_index}: {r.tool_name or '(no action)'} -> {r.status}")
        for r in self.records[split:]:
            outcome = r.outcome if len(r.outcome) <= 200 else r.outcome[:197] + "..."
            lines.append(
                f"step {r.step_index}: goal={r.goal!r} tool={r.tool_name} "
                f"status={r.status} outcome={outcome!r}"
            )
        if not self.records:
            lines.append("(no steps taken yet)")
        lines.append("memory keys: " + (", ".join(self.memory.keys()) or "(empty)"))
        return "\n".join(lines)


@dataclass(frozen=True)
class Tool:
    """A registered tool: its public spec plus the callable that runs it.

    The callable receives (context, resolved_arguments) and returns a
    ToolResult; context is engine-supplied (volume, gateway, config,
    memory, query).
    """

    spec: ToolSpec
    fn: Callable[[Any, dict[str, Any]], ToolResult]


class ToolRegistry:
    def __init__(self, tools: list[Tool] | None = None):
        self._tools: dict[str, Tool] = {}
        for t in tools or []:
            self.add(t)

    def add(self, tool: Tool) -> None:
        if tool.spec.name in self._tools:
            raise ValueError(f"duplicate tool name {tool.spec.name!r}")
        self._tools[tool.spec.name] = tool

    def __contains__(self, name: str) -> bool:
        return name in self._tools

    def __len__(self) -> int:
        return len(self._tools)

    def get(self, name: str) -> Tool:
        if name not in self._tools:
            raise KeyError(f"no tool named {name!r}")
        return self._tools[name]

    def names(self) -> list[str]:
        return list(self._tools.keys())

    def specs(self) -> list[ToolSpec]:
        return [t.spec for t in self._tools.values()]
