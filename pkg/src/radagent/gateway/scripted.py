"""Deterministic scripted backends for offline runs and tests.

Chat and vision mocks replay a transcript: an ordered JSON list of
records shaped

    {"match": {"role": "user", "contains": "plan"} | null,
     "response": "...",
     "repeat": 1,          # uses before the record is spent; 0 = unlimited
     "delay_s": 0,         # sleep before answering (timeout tests)
     "error": "transport"} # raise instead of answering

A request consumes the first unspent record whose matcher accepts it;
no match raises ScriptExhaustedError with the request text, which makes
transcript authoring mistakes loud instead of silently wrong.
"""
from __future__ import annotations

import hashlib
import json
import struct
import time
from pathlib import Path

import numpy as np

from ..errors import (
    ScriptExhaustedError,
    TransportError,
    UnknownCaseError,
    UnknownTargetError,
)
from ..volume.nifti import parse_nifti
from ..volume.types import Mask, mask_from_volume
from .types import ChatRequest, EmbeddingVector, VisionRequest


class _Record:
    def __init__(self, raw: dict):
        unknown = set(raw) - {"match", "response", "repeat", "delay_s", "error"}
        if unknown:
            raise ValueError(f"unknown transcript record keys {sorted(unknown)}")
        self.match = raw.get("match")
        self.response = raw.get("response", "")
        self.repeat = int(raw.get("repeat", 1))
        self.delay_s = float(raw.get("delay_s", 0))
        self.error = raw.get("error")
        if self.error not in (None, "transport"):
            raise ValueError(f"unknown transcript error kind {self.error!r}")
        self.remaining = self.repeat  # 0 means unlimited

    def accepts(self, messages: list[tuple[str, str]]) -> bool:
        if self.match is None:
            return True
        role = self.match.get("role")
        needle = self.match.get("contains", "")
        pool = [c for r, c in messages if role is None or r == role]
        return any(needle in c for c in pool)

    def spent(self) -> bool:
        return self.repeat != 0 and self.remaining <= 0


class Transcript:
    """Ordered matcher/response records with consumption state."""

    def __init__(self, records: list[dict]):
        self.records = [_Record(r) for r in records]
        self.consumed = 0

    @classmethod
    def from_file(cls, path: str | Path) -> "Transcript":
        return cls(json.loads(Path(path).read_text()))

    def reply(self, messages: list[tuple[str, str]]) -> str:
        for rec in self.records:
            if rec.spent() or not rec.accepts(messages):
                continue
            if rec.repeat != 0:
                rec.remaining -= 1
            self.consumed += 1
            if rec.delay_s > 0:
                time.sleep(rec.delay_s)
            if rec.error == "transport":
                raise TransportError("scripted transport failure")
            return rec.response
        preview = " | ".join(f"{r}: {c[:80]}" for r, c in messages[-2:])
        raise ScriptExhaustedError(f"no transcript record matches request ({preview})")


class ScriptedChatBackend:
    """Chat backend that replays a transcript; logs every request."""

    def __init__(self, transcript: Transcript):
        self.transcript = transcript
        self.calls: list[ChatRequest] = []

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedChatBackend":
        return cls(Transcript.from_file(path))

    def complete(self, req: ChatRequest) -> str:
        self.calls.append(req)
        return self.transcript.reply([(m.role, m.content) for m in req.messages])


class ScriptedVisionBackend:
    """Vision backend matching transcript records against the prompt."""

    def __init__(self, transcript: Transcript):
        self.transcript = transcript
        self.calls: list[VisionRequest] = []

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedVisionBackend":
        return cls(Transcript.from_file(path))

    def analyze(self, req: VisionRequest) -> str:
        self.calls.append(req)
        return self.transcript.reply([("user", req.prompt)])


class HashEmbeddingBackend:
    """64-dimensional vectors derived from a seeded hash of the text.

    Pure function of (text, seed): identical texts embed identically, and
    distinct texts scatter, which is all clustering tests need.
    """

    DIMENSION = 64

    def __init__(self, seed: int = 0):
        self.seed = seed

    def _vector(self, text: str) -> EmbeddingVector:
        comps: list[float] = []
        block = 0
        while len(comps) < self.DIMENSION:
            h = hashlib.sha256(
                f"{self.seed}:{block}:".encode() + text.encode()
            ).digest()
            for i in range(0, len(h) - 7, 8):
                (u,) = struct.unpack_from("<Q", h, i)
                comps.append(u / 2**63 - 1.0)  # [-1, 1)
                if len(comps) == self.DIMENSION:
                    break
            block += 1
        return EmbeddingVector(components=tuple(comps))

    def embed(self, texts: list[str]) -> list[EmbeddingVector]:
        return [self._vector(t) for t in texts]


class FileStoreSegmentationBackend:
    """Mask lookup from `<store>/<case_id>/organ.nii.gz` (+ lesion.nii.gz).

    `organs` is the coverage list; asking for anything else is an
    unknown-target error. A missing lesion file means a clean case and
    yields an all-zero lesion mask.
    """

    def __init__(self, store: str | Path, organs: list[str]):
        self.store = Path(store)
        self.organs = list(organs)

    def segment(self, case_ref: str, targets: list[str]) -> tuple[Mask, Mask]:
        for t in targets:
            if t not in self.organs:
                raise UnknownTargetError(
                    f"target {t!r} not covered; store handles {self.organs}"
                )
        case_dir = self.store / case_ref
        organ_path = case_dir / "organ.nii.gz"
        if not organ_path.exists():
            organ_path = case_dir / "organ.nii"
        if not organ_path.exists():
            raise UnknownCaseError(f"no masks stored for case {case_ref!r}")
        organ = mask_from_volume(parse_nifti(organ_path))
        lesion_path = case_dir / "lesion.nii.gz"
        if not lesion_path.exists():
            lesion_path = case_dir / "lesion.nii"
        if lesion_path.exists():
            lesion = mask_from_volume(parse_nifti(lesion_path))
        else:
            w, h, d = organ.dims
            lesion = Mask(dims=organ.dims, labels=np.zeros((d, h, w), dtype=np.int32))
        return organ, lesion
