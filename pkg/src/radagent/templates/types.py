"""Types for the offline template-derivation pipeline."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class CorpusReport:
    case_id: str
    full_text: str
    organ_section: str | None = None

    def __post_init__(self) -> None:
        if not self.full_text:
            raise ValueError("corpus report text must be non-empty")


@dataclass(frozen=True)
class Template:
    template_id: int
    text: str
    cluster_id: int
    member_count: int

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("template text must be non-empty")


def save_templates(templates: list[Template], path: str | Path) -> None:
    payload = [
        {
            "template_id": t.template_id,
            "text": t.text,
            "cluster_id": t.cluster_id,
            "member_count": t.member_count,
        }
        for t in templates
    ]
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_templates(path: str | Path) -> list[Template]:
    raw = json.loads(Path(path).read_text())
    templates = [Template(**item) for item in raw]
    ids = [t.template_id for t in templates]
    if len(ids) != len(set(ids)):
        raise ValueError("duplicate template ids")
    return templates
