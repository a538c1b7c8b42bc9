"""Request/response types and backend interfaces for model access.

Four backend roles: chat (planning and text generation), vision (region
analysis), embedding (template derivation), segmentation (mask lookup).
Each is a small Protocol so scripted mocks and HTTP clients are
interchangeable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

from ..volume.types import Image8, Mask

ALLOWED_ROLES = ("system", "user", "assistant")


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ALLOWED_ROLES:
            raise ValueError(f"role {self.role!r} not in {ALLOWED_ROLES}")


@dataclass(frozen=True)
class ChatRequest:
    messages: tuple[ChatMessage, ...]
    model: str = "default"
    temperature: float = 0.0
    max_output_tokens: int = 2048

    def __post_init__(self) -> None:
        if not self.messages:
            raise ValueError("chat request needs at least one message")
        if self.temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")
        if self.max_output_tokens <= 0:
            raise ValueError("max_output_tokens must be positive")

    def text(self) -> str:
        """All message contents joined, for matcher-style inspection."""
        return "\n".join(m.content for m in self.messages)


def chat_request(
    *, system: str | None = None, user: str, model: str = "default"
) -> ChatRequest:
    msgs: list[ChatMessage] = []
    if system is not None:
        msgs.append(ChatMessage("system", system))
    msgs.append(ChatMessage("user", user))
    return ChatRequest(messages=tuple(msgs), model=model)


@dataclass(frozen=True)
class VisionRequest:
    prompt: str
    images: tuple[Image8, ...]
    model: str = "default"
    volume_ref: str | None = None  # where the crop came from, for logging

    def __post_init__(self) -> None:
        if not self.images:
            raise ValueError("vision request needs at least one image")


@dataclass(frozen=True)
class EmbeddingVector:
    components: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("embedding must have at least one component")
        if not all(math.isfinite(c) for c in self.components):
            raise ValueError("embedding components must be finite")

    @property
    def dimension(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class BackendPolicy:
    request_timeout: float = 120.0  # seconds per attempt
    max_retries: int = 2  # extra attempts after the first
    retry_backoff: float = 0.5  # seconds between attempts

    def __post_init__(self) -> None:
        if self.request_timeout <= 0:
            raise ValueError("request_timeout must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.retry_backoff < 0:
            raise ValueError("retry_backoff must be >= 0")


@runtime_checkable
class ChatBackend(Protocol):
    def complete(self, req: ChatRequest) -> str: ...


@runtime_checkable
class VisionBackend(Protocol):
    def analyze(self, req: VisionRequest) -> str: ...


@runtime_checkable
class EmbeddingBackend(Protocol):
    def embed(self, texts: list[str]) -> list[EmbeddingVector]: ...


@runtime_checkable
class SegmentationBackend(Protocol):
    def segment(self, case_ref: str, targets: list[str]) -> tuple[Mask, Mask]: ...


@dataclass
class AttemptLog:
    """Per-call attempt counts, appended by the gateway for observability."""

    entries: list[tuple[str, int]] = field(default_factory=list)

    def record(self, op: str, attempts: int) -> None:
        self.entries.append((op, attempts))

    def last(self) -> tuple[str, int] | None:
        return self.entries[-1] if self.entries else None
