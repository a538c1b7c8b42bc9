"""Domain types for the orchestrated tools: analysis plans and results,
reports with key slices, and quality assessments."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from ..volume.types import Image8

RUBRIC_KEYS = ("format", "content", "language-expression")

ORGAN_LABEL = 1  # convention for stored organ masks
LESION_LABEL = 1  # convention for stored lesion masks


@dataclass(frozen=True)
class AnalysisItem:
    name: str
    prompt_fragment: str
    lesion_related: bool = False

    def __post_init__(self) -> None:
        if not self.name or not self.prompt_fragment:
            raise ValueError("analysis item needs a name and a prompt fragment")


@dataclass(frozen=True)
class AnalysisResult:
    organ: str
    item_findings: tuple[tuple[str, str], ...]  # (item name, finding), planned order
    lesion_present: bool
    region: str  # human-readable ROI descriptor

    UNAVAILABLE_PREFIX = "[unavailable] "

    def __post_init__(self) -> None:
        names = [n for n, _ in self.item_findings]
        if len(names) != len(set(names)):
            raise ValueError("duplicate item names in analysis result")

    def finding(self, name: str) -> str:
        for n, f in self.item_findings:
            if n == name:
                return f
        raise KeyError(f"no finding for item {name!r}")

    def missing_items(self) -> list[str]:
        """Items whose vision call failed; their findings carry a marker."""
        return [
            n for n, f in self.item_findings if f.startswith(self.UNAVAILABLE_PREFIX)
        ]

    def as_text(self) -> str:
        lines = [f"Organ: {self.organ}", f"Region: {self.region}",
                 f"Lesion present: {'yes' if self.lesion_present else 'no'}"]
        for name, finding in self.item_findings:
            lines.append(f"- {name}: {finding}")
        return "\n".join(lines)

    def digest(self) -> str:
        blob = json.dumps(
            {
                "organ": self.organ,
                "items": list(self.item_findings),
                "lesion_present": self.lesion_present,
                "region": self.region,
            },
            sort_keys=True,
        ).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


@dataclass(frozen=True)
class QCOutcome:
    qualified: bool
    rounds: int
    comments: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.rounds < 1:
            raise ValueError("qc rounds must be >= 1")


@dataclass(frozen=True)
class Report:
    findings: str
    impression: str
    key_slices: tuple[tuple[int, str], ...]  # (z index, image filename)
    template_id: int
    analysis_digest: str
    revision: int = 0
    qc: QCOutcome | None = None
    images: tuple[Image8, ...] = field(default=(), repr=False)  # not serialized

    def __post_init__(self) -> None:
        if not self.findings or not self.impression:
            raise ValueError("report needs non-empty findings and impression")
        if len(self.key_slices) != 3:
            raise ValueError(f"report needs exactly 3 key slices, got {len(self.key_slices)}")
        if self.revision < 0:
            raise ValueError("revision must be >= 0")

    def to_json_dict(self) -> dict:
        return {
            "findings": self.findings,
            "impression": self.impression,
            "key_slices": [
                {"z": z, "image_path": path} for z, path in self.key_slices
            ],
            "revision": self.revision,
            "provenance": {
                "template_id": self.template_id,
                "analysis_digest": self.analysis_digest,
            },
            "qc": (
                {
                    "qualified": self.qc.qualified,
                    "rounds": self.qc.rounds,
                    "comments": list(self.qc.comments),
                }
                if self.qc is not None
                else None
            ),
        }


@dataclass(frozen=True)
class Assessment:
    qualified: bool
    comments: str
    rubric: tuple[tuple[str, bool], ...]  # (rubric key, passed)
    feedback: str | None = None

    def __post_init__(self) -> None:
        keys = tuple(k for k, _ in self.rubric)
        if keys != RUBRIC_KEYS:
            raise ValueError(f"rubric keys must be {RUBRIC_KEYS}, got {keys}")
        if self.qualified and self.feedback is not None:
            raise ValueError("qualified assessments carry no feedback")
        if not self.qualified and not self.feedback:
            raise ValueError("unqualified assessments require feedback")
