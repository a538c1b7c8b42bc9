"""Engine configuration: one JSON file describing backends, caps, render
settings and paths.

Unknown keys are rejected at every level so a typo cannot silently fall
back to a default. Secrets never live in the file; backends name an
environment variable (`token_env`) and the key is read at build time.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .errors import ConfigError
from .gateway.types import BackendPolicy

_BACKEND_KINDS = {
    "chat": {"scripted", "http"},
    "vision": {"scripted", "http"},
    "embedding": {"hash", "http"},
    "segmentation": {"file-store"},
}


@dataclass(frozen=True)
class BackendConfig:
    """One backend role: kind plus kind-specific settings."""

    kind: str
    transcript: Path | None = None  # scripted
    base_url: str | None = None  # http
    model: str = "default"  # http
    token_env: str | None = None  # http
    seed: int = 0  # hash embedding
    store: Path | None = None  # file-store segmentation
    organs: tuple[str, ...] = ()  # file-store segmentation

    def api_key(self) -> str | None:
        if self.token_env is None:
            return None
        value = os.environ.get(self.token_env)
        if value is None:
            raise ConfigError(f"environment variable {self.token_env} is not set")
        return value


@dataclass(frozen=True)
class EngineConfig:
    chat: BackendConfig
    vision: BackendConfig
    embedding: BackendConfig
    segmentation: BackendConfig
    policy: BackendPolicy = field(default_factory=BackendPolicy)
    max_steps: int = 10
    time_budget_s: float = 500.0
    qc_max_rounds: int = 3
    deterministic_timing: bool = False
    window_center: float = 40.0
    window_width: float = 400.0
    roi_margin: int = 2
    k: int = 6
    seed: int = 0
    catalog_path: Path | None = None
    templates_path: Path | None = None
    out_dir: Path = Path("out")

    def __post_init__(self) -> None:
        if self.max_steps < 1:
            raise ConfigError(f"max_steps must be >= 1, got {self.max_steps}")
        if self.time_budget_s <= 0:
            raise ConfigError(f"time_budget_s must be positive, got {self.time_budget_s}")
        if self.qc_max_rounds < 1:
            raise ConfigError(f"qc_max_rounds must be >= 1, got {self.qc_max_rounds}")
        if self.window_width <= 0:
            raise ConfigError("window_width must be positive")
        if self.roi_margin < 0:
            raise ConfigError("roi_margin must be >= 0")
        if self.k < 1:
            raise ConfigError("k must be >= 1")

    def digest(self) -> str:
        """Short stable fingerprint of everything that shapes a run."""
        def norm(value: Any) -> Any:
            if isinstance(value, Path):
                # fingerprint by filename: a bundle moved wholesale to
                # another directory is still the same run
                return value.name
            if isinstance(value, tuple):
                return [norm(v) for v in value]
            if hasattr(value, "__dataclass_fields__"):
                return {
                    k: norm(getattr(value, k)) for k in value.__dataclass_fields__
                }
            return value

        blob = json.dumps(norm(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


def _require_keys(section: Mapping, allowed: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")


def _path(base: Path, value: str | None) -> Path | None:
    if value is None:
        return None
    p = Path(value)
    return p if p.is_absolute() else base / p


def _backend(role: str, raw: Mapping, base: Path) -> BackendConfig:
    _require_keys(
        raw,
        {"kind", "transcript", "base_url", "model", "token_env", "seed", "store", "organs"},
        f"backends.{role}",
    )
    kind = raw.get("kind")
    if kind not in _BACKEND_KINDS[role]:
        raise ConfigError(
            f"backends.{role}.kind must be one of {sorted(_BACKEND_KINDS[role])}, got {kind!r}"
        )
    if kind == "scripted" and "transcript" not in raw:
        raise ConfigError(f"backends.{role}: scripted backend needs 'transcript'")
    if kind == "http" and "base_url" not in raw:
        raise ConfigError(f"backends.{role}: http backend needs 'base_url'")
    if kind == "file-store" and "store" not in raw:
        raise ConfigError(f"backends.{role}: file-store backend needs 'store'")
    return BackendConfig(
        kind=kind,
        transcript=_path(base, raw.get("transcript")),
        base_url=raw.get("base_url"),
        model=raw.get("model", "default"),
        token_env=raw.get("token_env"),
        seed=int(raw.get("seed", 0)),
        store=_path(base, raw.get("store")),
        organs=tuple(raw.get("organs", ())),
    )


def load_config(path: str | Path) -> EngineConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(raw, base=path.parent)


def parse_config(raw: Mapping, base: str | Path = ".") -> EngineConfig:
    base = Path(base)
    _require_keys(
        raw,
        {"backends", "policy", "engine", "render", "clustering", "paths"},
        "config root",
    )
    backends = raw.get("backends")
    if not isinstance(backends, Mapping):
        raise ConfigError("config needs a 'backends' object")
    _require_keys(
        backends, {"chat", "vision", "embedding", "segmentation"}, "backends"
    )
    roles = {}
    for role in ("chat", "vision", "embedding", "segmentation"):
        if role not in backends:
            raise ConfigError(f"backends.{role} is required")
        roles[role] = _backend(role, backends[role], base)

    policy_raw = raw.get("policy", {})
    _require_keys(
        policy_raw, {"request_timeout", "max_retries", "retry_backoff"}, "policy"
    )
    policy = BackendPolicy(
        request_timeout=float(policy_raw.get("request_timeout", 120.0)),
        max_retries=int(policy_raw.get("max_retries", 2)),
        retry_backoff=float(policy_raw.get("retry_backoff", 0.5)),
    )

    engine = raw.get("engine", {})
    _require_keys(
        engine,
        {"max_steps", "time_budget_s", "qc_max_rounds", "deterministic_timing"},
        "engine",
    )
    render = raw.get("render", {})
    _require_keys(render, {"window_center", "window_width", "roi_margin"}, "render")
    clustering = raw.get("clustering", {})
    _require_keys(clustering, {"k", "seed"}, "clustering")
    paths = raw.get("paths", {})
    _require_keys(paths, {"catalog", "templates", "out_dir"}, "paths")

    return EngineConfig(
        chat=roles["chat"],
        vision=roles["vision"],
        embedding=roles["embedding"],
        segmentation=roles["segmentation"],
        policy=policy,
        max_steps=int(engine.get("max_steps", 10)),
        time_budget_s=float(engine.get("time_budget_s", 500.0)),
        qc_max_rounds=int(engine.get("qc_max_rounds", 3)),
        deterministic_timing=bool(engine.get("deterministic_timing", False)),
        window_center=float(render.get("window_center", 40.0)),
        window_width=float(render.get("window_width", 400.0)),
        roi_margin=int(render.get("roi_margin", 2)),
        k=int(clustering.get("k", 6)),
        seed=int(clustering.get("seed", 0)),
        catalog_path=_path(base, paths.get("catalog")),
        templates_path=_path(base, paths.get("templates")),
        out_dir=_path(base, paths.get("out_dir", "out")),
    )
