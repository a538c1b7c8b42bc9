"""Template choice and report composition with key-slice rendering."""
from __future__ import annotations

from dataclasses import replace

from ..agent.parsing import extract_json, structured_chat
from ..errors import StructuredOutputError, ToolError
from ..gateway.core import Gateway
from ..gateway.types import chat_request
from ..templates.types import Template
from ..volume.ops import largest_component, render_slice, select_key_slices
from ..volume.types import Mask, Volume
from .types import LESION_LABEL, ORGAN_LABEL, AnalysisResult, Report

TEMPLATE_CHOICE_MARKER = "Choose the template number"
COMPOSE_MARKER = "Compose the report sections"


def select_template(
    analysis: AnalysisResult, templates: list[Template], gateway: Gateway
) -> Template:
    """Ask the chat backend to pick by number; two bad answers fall back
    to the lowest-id template so a flaky model never kills the case."""
    if not templates:
        raise ToolError("no templates available")
    if len(templates) == 1:
        return templates[0]
    by_id = {t.template_id: t for t in templates}
    listing = "\n".join(f"#{t.template_id}: {t.text}" for t in templates)
    system = (
        f"{TEMPLATE_CHOICE_MARKER} best matching the analysis. "
        "Reply with the template number only, nothing else."
    )
    user = (
        f"Templates:\n{listing}\n\n"
        f"Analysis ({analysis.digest()}):\n{analysis.as_text()}"
    )
    last_reply = None
    for _ in range(2):
        if last_reply is None:
            req = chat_request(system=system, user=user)
        else:
            req = chat_request(
                system=system,
                user=(
                    f"{user}\n\nYour previous reply {last_reply!r} was not a "
                    "valid template number. Reply with the number only."
                ),
            )
        reply = gateway.chat(req)
        last_reply = reply
        try:
            chosen = int(reply.strip())
        except ValueError:
            continue
        if chosen in by_id:
            return by_id[chosen]
    return by_id[min(by_id)]


def _parse_sections(text: str) -> tuple[str, str]:
    obj = extract_json(text)
    if not isinstance(obj, dict):
        raise StructuredOutputError("report sections must be a JSON object")
    for key in ("findings", "impression"):
        if not isinstance(obj.get(key), str) or not obj[key].strip():
            raise StructuredOutputError(f"report needs a non-empty string {key!r}")
    return obj["findings"], obj["impression"]


def key_slice_plan(
    m_organ: Mask, m_lesion: Mask, lesion_present: bool
) -> tuple[list[int], Mask]:
    """Key slices track the largest lesion when one exists, else the organ."""
    if lesion_present:
        target = largest_component(m_lesion, LESION_LABEL)
        return select_key_slices(target, 1), target
    return select_key_slices(m_organ, ORGAN_LABEL), m_organ


def generate_report(
    analysis: AnalysisResult,
    template: Template,
    m_organ: Mask,
    m_lesion: Mask,
    volume: Volume,
    gateway: Gateway,
    *,
    feedback: str | None = None,
    previous: Report | None = None,
    window_center: float = 40.0,
    window_width: float = 400.0,
) -> Report:
    """Compose findings and impression against the template; attach the
    three rendered key slices. Feedback regeneration bumps the revision
    and quotes the reviewer's text verbatim in the prompt."""
    zs, _ = key_slice_plan(m_organ, m_lesion, analysis.lesion_present)
    images = tuple(
        render_slice(volume, z, center=window_center, width=window_width) for z in zs
    )
    key_slices = tuple((z, f"slice_{z:03d}.pgm") for z in zs)

    system = (
        f"{COMPOSE_MARKER} for the case. Write the findings as objective "
        "imaging observations and the impression as a ranked diagnostic "
        "summary. Use the template as a style and structure reference. "
        'Reply with exactly one JSON object with keys "findings" and "impression".'
    )
    user = f"Template:\n{template.text}\n\nAnalysis:\n{analysis.as_text()}"
    if feedback is not None:
        user += f"\n\nReviewer feedback to address:\n{feedback}"
    findings, impression = structured_chat(gateway, system, user, _parse_sections)

    revision = previous.revision + 1 if previous is not None else 0
    return Report(
        findings=findings,
        impression=impression,
        key_slices=key_slices,
        template_id=template.template_id,
        analysis_digest=analysis.digest(),
        revision=revision,
        qc=None,
        images=images,
    )


def with_qc(report: Report, qc) -> Report:
    return replace(report, qc=qc)
