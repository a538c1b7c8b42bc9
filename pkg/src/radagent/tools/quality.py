"""Quality control: rubric assessment and feedback-driven refinement."""
from __future__ import annotations

from ..agent.parsing import extract_json, structured_chat
from ..errors import StructuredOutputError
from ..gateway.core import Gateway
from ..templates.types import Template
from ..volume.types import Mask, Volume
from .reporting import generate_report, select_template, with_qc
from .types import RUBRIC_KEYS, AnalysisResult, Assessment, QCOutcome, Report

QC_MARKER = "Assess the report quality"

_RUBRIC_GUIDE = (
    "format: findings hold objective imaging observations and the "
    "impression is a ranked diagnostic summary; "
    "content: anatomy is correct, lesions are characterized, and the "
    "impression is consistent with the findings; "
    "language-expression: standard radiological terminology, correct "
    "spelling, clear and concise wording without redundancy or vagueness."
)


def _parse_assessment(text: str) -> Assessment:
    obj = extract_json(text)
    if not isinstance(obj, dict):
        raise StructuredOutputError("assessment must be a JSON object")
    if not isinstance(obj.get("qualified"), bool):
        raise StructuredOutputError('assessment needs a boolean "qualified"')
    rubric_raw = obj.get("rubric")
    if not isinstance(rubric_raw, dict):
        raise StructuredOutputError('assessment needs a "rubric" object')
    rubric: list[tuple[str, bool]] = []
    for key in RUBRIC_KEYS:
        verdict = rubric_raw.get(key)
        if verdict not in ("pass", "fail"):
            raise StructuredOutputError(
                f'rubric key {key!r} must be "pass" or "fail", got {verdict!r}'
            )
        rubric.append((key, verdict == "pass"))
    unknown = set(rubric_raw) - set(RUBRIC_KEYS)
    if unknown:
        raise StructuredOutputError(f"unknown rubric keys {sorted(unknown)}")
    comments = obj.get("comments", "")
    if not isinstance(comments, str):
        raise StructuredOutputError('"comments" must be a string')
    qualified = obj["qualified"]
    feedback = obj.get("feedback")
    if qualified:
        feedback = None  # stray feedback on a pass is dropped, not fatal
    else:
        if not isinstance(feedback, str) or not feedback.strip():
            raise StructuredOutputError(
                "unqualified assessments must carry non-empty feedback"
            )
    return Assessment(
        qualified=qualified,
        comments=comments,
        rubric=tuple(rubric),
        feedback=feedback,
    )


def assess_quality(report: Report, gateway: Gateway) -> Assessment:
    system = (
        f"{QC_MARKER} against three rubric criteria. {_RUBRIC_GUIDE} "
        "Reply with exactly one JSON object with keys: "
        '"qualified" (boolean), "rubric" (object mapping "format", '
        '"content" and "language-expression" each to "pass" or "fail"), '
        '"comments" (string), and "feedback" (string, required when not '
        "qualified) telling the author what to fix."
    )
    user = f"Findings:\n{report.findings}\n\nImpression:\n{report.impression}"
    return structured_chat(gateway, system, user, _parse_assessment)


def refine_report(
    report: Report,
    analysis: AnalysisResult,
    template: Template,
    m_organ: Mask,
    m_lesion: Mask,
    volume: Volume,
    gateway: Gateway,
    *,
    max_rounds: int = 3,
    window_center: float = 40.0,
    window_width: float = 400.0,
) -> tuple[Report, list[Assessment]]:
    """Assess; while unqualified and rounds remain, regenerate with the
    reviewer feedback. One generation per assessment round past the first."""
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    history: list[Assessment] = []
    while True:
        assessment = assess_quality(report, gateway)
        history.append(assessment)
        if assessment.qualified or len(history) >= max_rounds:
            break
        report = generate_report(
            analysis,
            template,
            m_organ,
            m_lesion,
            volume,
            gateway,
            feedback=assessment.feedback,
            previous=report,
            window_center=window_center,
            window_width=window_width,
        )
    qc = QCOutcome(
        qualified=history[-1].qualified,
        rounds=len(history),
        comments=tuple(a.comments for a in history),
    )
    return with_qc(report, qc), history


def quality_controlled_generation(
    analysis: AnalysisResult,
    templates: list[Template],
    m_organ: Mask,
    m_lesion: Mask,
    volume: Volume,
    gateway: Gateway,
    *,
    max_rounds: int = 3,
    window_center: float = 40.0,
    window_width: float = 400.0,
) -> tuple[Report, list[Assessment]]:
    """Generate, then assess/regenerate until qualified or rounds run out.

    Exhausting the rounds still returns the final report, flagged
    unqualified in its qc block - never an exception.
    """
    template = select_template(analysis, templates, gateway)
    report = generate_report(
        analysis,
        template,
        m_organ,
        m_lesion,
        volume,
        gateway,
        window_center=window_center,
        window_width=window_width,
    )
    return refine_report(
        report,
        analysis,
        template,
        m_organ,
        m_lesion,
        volume,
        gateway,
        max_rounds=max_rounds,
        window_center=window_center,
        window_width=window_width,
    )
