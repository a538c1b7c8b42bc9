"""Corpus-to-template derivation and analysis-item summarization.

Offline path: filter reports to organ sections, embed them, cluster,
keep each cluster's most central member as a template, then ask the
chat backend to distill the templates into an analysis-item catalog.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..agent.parsing import extract_json, structured_chat
from ..errors import CorpusError, StructuredOutputError
from ..gateway.core import Gateway
from ..tools.types import AnalysisItem
from .kmeans import kmeans
from .sections import extract_organ_section
from .types import CorpusReport, Template

SUMMARIZE_MARKER = "Summarize the analysis items"


def load_corpus(path: str | Path) -> list[CorpusReport]:
    """JSON-lines corpus: one {case_id, report_text} object per line."""
    reports: list[CorpusReport] = []
    seen: set[str] = set()
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"line {lineno}: not valid JSON ({exc})") from exc
        if not isinstance(obj, dict) or not isinstance(obj.get("case_id"), str):
            raise CorpusError(f"line {lineno}: needs a string case_id")
        if not isinstance(obj.get("report_text"), str) or not obj["report_text"]:
            raise CorpusError(f"line {lineno}: needs non-empty report_text")
        if obj["case_id"] in seen:
            raise CorpusError(f"line {lineno}: duplicate case_id {obj['case_id']!r}")
        seen.add(obj["case_id"])
        reports.append(CorpusReport(case_id=obj["case_id"], full_text=obj["report_text"]))
    if not reports:
        raise CorpusError(f"corpus {path} holds no reports")
    return reports


def save_corpus(reports: list[CorpusReport], path: str | Path) -> None:
    lines = [
        json.dumps({"case_id": r.case_id, "report_text": r.full_text}, sort_keys=True)
        for r in reports
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def derive_templates(
    corpus: list[CorpusReport],
    organ: str,
    k: int,
    seed: int,
    gateway: Gateway,
    keywords: tuple[str, ...] | None = None,
) -> list[Template]:
    """One template per non-empty cluster: the member section nearest
    its centroid, ties broken by smallest case-id."""
    usable: list[tuple[str, str]] = []
    for report in corpus:
        section = report.organ_section
        if section is None:
            section = extract_organ_section(report.full_text, organ, keywords)
        if section:
            usable.append((report.case_id, section))
    if len(usable) < k:
        raise CorpusError(
            f"need at least {k} reports with {organ} sections, found {len(usable)}"
        )

    vectors = gateway.embed([text for _, text in usable])
    points = np.asarray([v.components for v in vectors], dtype=np.float64)
    model = kmeans(points, k=k, seed=seed)

    templates: list[Template] = []
    for cluster_id in range(model.k):
        members = model.members(cluster_id)
        if not members:
            continue
        d2 = ((points[members] - model.centroids[cluster_id]) ** 2).sum(axis=1)
        best = d2.min()
        candidates = [m for m, d in zip(members, d2) if d == best]
        winner = min(candidates, key=lambda m: usable[m][0])
        templates.append(
            Template(
                template_id=cluster_id,
                text=usable[winner][1],
                cluster_id=cluster_id,
                member_count=len(members),
            )
        )
    return templates


def _parse_items(text: str) -> list[AnalysisItem]:
    obj = extract_json(text)
    if not isinstance(obj, dict) or not isinstance(obj.get("items"), list):
        raise StructuredOutputError('reply needs an "items" array')
    if not obj["items"]:
        raise StructuredOutputError("items array is empty")
    items: list[AnalysisItem] = []
    for raw in obj["items"]:
        if not isinstance(raw, dict):
            raise StructuredOutputError("each item must be a JSON object")
        name = raw.get("name")
        fragment = raw.get("prompt_fragment")
        flag = raw.get("lesion_related")
        if not isinstance(name, str) or not name:
            raise StructuredOutputError("item needs a non-empty string name")
        if not isinstance(fragment, str) or not fragment:
            raise StructuredOutputError(f"item {name!r} needs a prompt_fragment")
        if not isinstance(flag, bool):
            raise StructuredOutputError(f"item {name!r} needs a boolean lesion_related")
        items.append(AnalysisItem(name=name, prompt_fragment=fragment, lesion_related=flag))
    names = [i.name for i in items]
    if len(names) != len(set(names)):
        raise StructuredOutputError("item names must be unique")
    return items


def summarize_analysis_items(
    templates: list[Template], organ: str, gateway: Gateway
) -> list[AnalysisItem]:
    if not templates:
        raise ValueError("summarization needs at least one template")
    listing = "\n\n".join(f"#{t.template_id}: {t.text}" for t in templates)
    system = (
        f"{SUMMARIZE_MARKER} covered by these {organ} report templates. "
        "Each item is one aspect a reader should examine, phrased as an "
        "instruction. Reply with exactly one JSON object of the form "
        '{"items": [{"name": string, "prompt_fragment": string, '
        '"lesion_related": boolean}, ...]} and nothing else.'
    )
    user = f"Templates:\n{listing}"
    return structured_chat(gateway, system, user, _parse_items)
