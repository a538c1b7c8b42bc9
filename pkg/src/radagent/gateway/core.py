"""The gateway: one front door to all four backend roles, with a shared
retry/timeout policy.

Each attempt runs the backend call on a daemon thread and waits up to the
policy timeout for its result; a slow backend therefore cannot wedge the
engine. Transport failures and timeouts are retried with backoff up to
max_retries; malformed responses are never retried, since resending the
same request cannot fix a shape mismatch.
"""
from __future__ import annotations

import queue
import threading
import time
from typing import Callable, TypeVar

from ..errors import (
    GatewayError,
    GatewayTimeoutError,
    MalformedResponseError,
    TransportError,
)
from ..volume.types import Mask
from .types import (
    AttemptLog,
    BackendPolicy,
    ChatBackend,
    ChatRequest,
    EmbeddingBackend,
    EmbeddingVector,
    SegmentationBackend,
    VisionBackend,
    VisionRequest,
)

T = TypeVar("T")

_RETRYABLE = (TransportError, GatewayTimeoutError)


class Gateway:
    def __init__(
        self,
        chat_backend: ChatBackend | None = None,
        vision_backend: VisionBackend | None = None,
        embedding_backend: EmbeddingBackend | None = None,
        segmentation_backend: SegmentationBackend | None = None,
        policy: BackendPolicy | None = None,
    ):
        self.chat_backend = chat_backend
        self.vision_backend = vision_backend
        self.embedding_backend = embedding_backend
        self.segmentation_backend = segmentation_backend
        self.policy = policy if policy is not None else BackendPolicy()
        self.attempts = AttemptLog()

    # ------------------------------------------------------------ plumbing

    def _timed(self, fn: Callable[[], T]) -> T:
        """Run fn on a daemon thread; give up after the policy timeout."""
        out: queue.Queue = queue.Queue(maxsize=1)

        def body() -> None:
            try:
                out.put(("ok", fn()))
            except BaseException as exc:  # ferried to the caller
                out.put(("err", exc))

        threading.Thread(target=body, daemon=True).start()
        try:
            kind, value = out.get(timeout=self.policy.request_timeout)
        except queue.Empty:
            raise GatewayTimeoutError(
                f"backend call exceeded {self.policy.request_timeout}s"
            ) from None
        if kind == "err":
            raise value
        return value

    def _call(self, op: str, fn: Callable[[], T]) -> T:
        attempts = 0
        while True:
            attempts += 1
            try:
                result = self._timed(fn)
            except _RETRYABLE:
                if attempts > self.policy.max_retries:
                    self.attempts.record(op, attempts)
                    raise
                if self.policy.retry_backoff > 0:
                    time.sleep(self.policy.retry_backoff)
                continue
            self.attempts.record(op, attempts)
            return result

    def _require(self, backend: T | None, role: str) -> T:
        if backend is None:
            raise GatewayError(f"no {role} backend configured")
        return backend

    # ------------------------------------------------------------ operations

    def chat(self, req: ChatRequest) -> str:
        backend = self._require(self.chat_backend, "chat")
        text = self._call("chat", lambda: backend.complete(req))
        if not isinstance(text, str):
            raise MalformedResponseError(
                f"chat backend returned {type(text).__name__}, expected str"
            )
        return text

    def analyze_image(self, req: VisionRequest) -> str:
        backend = self._require(self.vision_backend, "vision")
        text = self._call("vision", lambda: backend.analyze(req))
        if not isinstance(text, str):
            raise MalformedResponseError(
                f"vision backend returned {type(text).__name__}, expected str"
            )
        return text

    def embed(self, texts: list[str]) -> list[EmbeddingVector]:
        if not texts:
            raise ValueError("embed needs a non-empty list of texts")
        backend = self._require(self.embedding_backend, "embedding")
        vectors = self._call("embed", lambda: backend.embed(texts))
        if len(vectors) != len(texts):
            raise MalformedResponseError(
                f"embedding backend returned {len(vectors)} vectors for {len(texts)} texts"
            )
        dims = {v.dimension for v in vectors}
        if len(dims) > 1:
            raise MalformedResponseError(f"mixed embedding dimensions {sorted(dims)}")
        return vectors

    def segment(self, case_ref: str, targets: list[str]) -> tuple[Mask, Mask]:
        if not targets:
            raise ValueError("segment needs at least one target")
        backend = self._require(self.segmentation_backend, "segmentation")
        organ, lesion = self._call(
            "segment", lambda: backend.segment(case_ref, targets)
        )
        if organ.dims != lesion.dims:
            raise MalformedResponseError(
                f"mask dims disagree: organ {organ.dims}, lesion {lesion.dims}"
            )
        return organ, lesion
