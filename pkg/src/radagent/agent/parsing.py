"""Parsing of structured model replies, and the one-repair-then-fail
protocol shared by every structured chat exchange."""
from __future__ import annotations

import json
from typing import Any, Callable, TypeVar

from ..errors import StructuredOutputError
from ..gateway.core import Gateway
from ..gateway.types import ChatMessage, ChatRequest
from .prompts import repair_prompt
from .types import MemoryStore, PlannedAction, ToolRegistry, ToolSpec

T = TypeVar("T")


def extract_json(text: str) -> Any:
    """Parse the first balanced top-level {...} block in the reply.

    Models often wrap JSON in prose or code fences; scanning for balance
    (string-aware) tolerates that without accepting garbage.
    """
    start = text.find("{")
    if start < 0:
        raise StructuredOutputError("reply contains no JSON object")
    depth = 0
    in_string = False
    escaped = False
    for i in range(start, len(text)):
        ch = text[i]
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                try:
                    return json.loads(text[start : i + 1])
                except json.JSONDecodeError as exc:
                    raise StructuredOutputError(f"invalid JSON: {exc}") from exc
    raise StructuredOutputError("unbalanced JSON object in reply")


def structured_chat(
    gateway: Gateway,
    system: str,
    user: str,
    parse: Callable[[str], T],
) -> T:
    """Ask once; on a parse/validation failure, reprompt once with the
    error appended; a second failure raises StructuredOutputError."""
    messages = [ChatMessage("system", system), ChatMessage("user", user)]
    reply = gateway.chat(ChatRequest(messages=tuple(messages)))
    try:
        return parse(reply)
    except StructuredOutputError as first:
        messages = messages + [
            ChatMessage("assistant", reply),
            ChatMessage("user", repair_prompt(str(first))),
        ]
        reply = gateway.chat(ChatRequest(messages=tuple(messages)))
        return parse(reply)  # second failure propagates


def parse_plan(text: str, registry: ToolRegistry) -> PlannedAction:
    obj = extract_json(text)
    if not isinstance(obj, dict):
        raise StructuredOutputError("plan must be a JSON object")
    for key in ("goal", "tool"):
        if key not in obj:
            raise StructuredOutputError(f"plan is missing key {key!r}")
        if not isinstance(obj[key], str) or not obj[key]:
            raise StructuredOutputError(f"plan key {key!r} must be a non-empty string")
    tool = obj["tool"]
    if tool not in registry:
        raise StructuredOutputError(
            f"tool {tool!r} is not registered; choose from {registry.names()}"
        )
    rationale = obj.get("rationale", "")
    if not isinstance(rationale, str):
        raise StructuredOutputError("plan key 'rationale' must be a string")
    return PlannedAction(goal=obj["goal"], tool_name=tool, rationale=rationale)


def parse_command_args(
    text: str, spec: ToolSpec, memory: MemoryStore
) -> dict[str, Any]:
    obj = extract_json(text)
    if not isinstance(obj, dict) or "arguments" not in obj:
        raise StructuredOutputError('command must be a JSON object with "arguments"')
    args = obj["arguments"]
    if not isinstance(args, dict):
        raise StructuredOutputError('"arguments" must be an object')
    for name in args:
        if spec.arg(name) is None:
            raise StructuredOutputError(
                f"unknown argument {name!r} for tool {spec.name}"
            )
    for a in spec.args:
        if a.required and a.name not in args:
            raise StructuredOutputError(
                f"missing required argument {a.name!r} for tool {spec.name}"
            )
    for name, value in args.items():
        a = spec.arg(name)
        if isinstance(value, str) and value.startswith("@"):
            if not memory.has(value[1:]):
                raise StructuredOutputError(
                    f"argument {name!r} references unknown memory key {value[1:]!r}"
                )
        elif not a.accepts(value):
            raise StructuredOutputError(
                f"argument {name!r} must be {a.kind}, got {type(value).__name__}"
            )
    return args


def parse_verdict(text: str) -> tuple[str, str | None]:
    obj = extract_json(text)
    if not isinstance(obj, dict) or "verdict" not in obj:
        raise StructuredOutputError('verdict must be a JSON object with "verdict"')
    verdict = obj["verdict"]
    if verdict == "continue":
        return ("continue", None)
    if verdict == "stop":
        key = obj.get("report_key")
        if not isinstance(key, str) or not key:
            raise StructuredOutputError('stop verdict needs a string "report_key"')
        return ("stop", key)
    raise StructuredOutputError(f"verdict must be continue or stop, got {verdict!r}")
