"""HTTP chat/vision clients speaking the open completions protocol.

POST {base_url}/chat/completions with a JSON body of model, messages and
temperature; the assistant text is choices[0].message.content. Vision
requests ride the same endpoint with images inlined as data URIs, so any
hosted LLM or VLM exposing this protocol plugs in unmodified.
"""
from __future__ import annotations

import base64
from typing import Any, Callable

import requests

from ..errors import MalformedResponseError, TransportError
from .types import ChatRequest, EmbeddingVector, VisionRequest


def build_chat_body(req: ChatRequest) -> dict:
    return {
        "model": req.model,
        "messages": [{"role": m.role, "content": m.content} for m in req.messages],
        "temperature": req.temperature,
        "max_tokens": req.max_output_tokens,
    }


def build_vision_body(req: VisionRequest) -> dict:
    content: list[dict] = [{"type": "text", "text": req.prompt}]
    for img in req.images:
        uri = "data:image/x-portable-graymap;base64," + base64.b64encode(
            img.to_pgm()
        ).decode("ascii")
        content.append({"type": "image_url", "image_url": {"url": uri}})
    return {
        "model": req.model,
        "messages": [{"role": "user", "content": content}],
        "temperature": 0.0,
    }


def _extract_text(payload: Any) -> str:
    try:
        text = payload["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as exc:
        raise MalformedResponseError(f"completion response missing text: {exc}") from exc
    if not isinstance(text, str):
        raise MalformedResponseError(f"completion text has type {type(text).__name__}")
    return text


class _HttpClient:
    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str | None = None,
        timeout: float = 120.0,
        post: Callable[..., requests.Response] | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.timeout = timeout
        self._post = post if post is not None else requests.post

    def _request(self, path: str, body: dict) -> Any:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            resp = self._post(
                f"{self.base_url}{path}",
                json=body,
                headers=headers,
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(f"request failed: {exc}") from exc
        if resp.status_code != 200:
            raise TransportError(f"backend returned HTTP {resp.status_code}")
        try:
            return resp.json()
        except ValueError as exc:
            raise MalformedResponseError("response body is not JSON") from exc

    def _send(self, body: dict) -> str:
        return _extract_text(self._request("/chat/completions", body))


class HttpChatBackend(_HttpClient):
    def complete(self, req: ChatRequest) -> str:
        body = build_chat_body(req)
        body["model"] = req.model if req.model != "default" else self.model
        return self._send(body)


class HttpVisionBackend(_HttpClient):
    def analyze(self, req: VisionRequest) -> str:
        body = build_vision_body(req)
        body["model"] = req.model if req.model != "default" else self.model
        return self._send(body)


class HttpEmbeddingBackend(_HttpClient):
    def embed(self, texts: list[str]) -> list[EmbeddingVector]:
        payload = self._request(
            "/embeddings", {"model": self.model, "input": list(texts)}
        )
        try:
            rows = sorted(payload["data"], key=lambda r: r.get("index", 0))
            vectors = [
                tuple(float(x) for x in row["embedding"]) for row in rows
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedResponseError(
                f"embedding response missing vectors: {exc}"
            ) from exc
        return [EmbeddingVector(components=v) for v in vectors]
