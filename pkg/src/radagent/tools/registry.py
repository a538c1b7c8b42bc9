"""The agent-facing tool registry.

Five tools: segmentator, analyzer, report_generator, quality_controller,
finish_case. Each wraps the library ops, reading shared state (volume,
catalog, templates, config) from the ToolContext and artifact inputs
from resolved "@key" arguments.
"""
from __future__ import annotations

import numpy as np

from ..agent.types import ArgSpec, Tool, ToolRegistry, ToolResult, ToolSpec
from ..errors import ToolError
from ..volume.types import Mask, Volume
from .analyzer import analyzer_tool, segmentator_tool
from .catalog import plan_region_analysis
from .quality import refine_report
from .reporting import generate_report, select_template
from .types import LESION_LABEL, AnalysisResult, Report


def _need_volume(ctx) -> Volume:
    if ctx.volume is None:
        raise ToolError("no volume loaded for this case")
    return ctx.volume


def _as_mask(value, name: str) -> Mask:
    if not isinstance(value, Mask):
        raise ToolError(f"argument {name!r} must reference a stored mask")
    return value


def _as_analysis(value) -> AnalysisResult:
    if not isinstance(value, AnalysisResult):
        raise ToolError("argument 'analysis' must reference a stored analysis result")
    return value


def _run_segmentator(ctx, args) -> ToolResult:
    targets = args["targets"]
    if not isinstance(targets, list) or not all(isinstance(t, str) for t in targets):
        raise ToolError("'targets' must be a list of organ names")
    volume = _need_volume(ctx)
    organ, lesion = segmentator_tool(ctx.query.case_id, volume, targets, ctx.gateway)
    o_count = int(np.count_nonzero(organ.labels))
    l_count = int(np.count_nonzero(lesion.labels))
    return ToolResult(
        outcome=(
            f"segmented {', '.join(targets)}: organ mask {o_count} voxels, "
            f"lesion mask {l_count} voxels"
        ),
        artifacts={"organ_mask": organ, "lesion_mask": lesion},
    )


def _run_analyzer(ctx, args) -> ToolResult:
    volume = _need_volume(ctx)
    m_organ = _as_mask(args["organ_mask"], "organ_mask")
    m_lesion = _as_mask(args["lesion_mask"], "lesion_mask")
    organ = ctx.query.organ
    catalog = (ctx.catalog or {}).get(organ, [])
    lesion_present = bool(np.count_nonzero(m_lesion.labels == LESION_LABEL))
    items = plan_region_analysis(organ, lesion_present, catalog)
    result = analyzer_tool(
        volume,
        m_organ,
        m_lesion,
        items,
        ctx.gateway,
        organ=organ,
        window_center=ctx.config.window_center,
        window_width=ctx.config.window_width,
        roi_margin=ctx.config.roi_margin,
    )
    missing = result.missing_items()
    note = f"; {len(missing)} item(s) unavailable" if missing else ""
    return ToolResult(
        outcome=(
            f"analyzed {len(items)} item(s) for {organ}; "
            f"lesion_present={str(result.lesion_present).lower()}{note}"
        ),
        artifacts={"analysis": result},
    )


def _run_report_generator(ctx, args) -> ToolResult:
    volume = _need_volume(ctx)
    analysis = _as_analysis(args["analysis"])
    m_organ = _as_mask(args["organ_mask"], "organ_mask")
    m_lesion = _as_mask(args["lesion_mask"], "lesion_mask")
    templates = ctx.templates or []
    template = select_template(analysis, templates, ctx.gateway)
    feedback = args.get("feedback")
    # feedback means a revision of the latest draft, not a fresh report
    previous = None
    if feedback is not None and ctx.memory.has("report"):
        candidate = ctx.memory.get("report")
        if isinstance(candidate, Report):
            previous = candidate
    report = generate_report(
        analysis,
        template,
        m_organ,
        m_lesion,
        volume,
        ctx.gateway,
        feedback=feedback,
        previous=previous,
        window_center=ctx.config.window_center,
        window_width=ctx.config.window_width,
    )
    zs = [z for z, _ in report.key_slices]
    return ToolResult(
        outcome=(
            f"report drafted from template #{template.template_id}, "
            f"key slices {zs}"
        ),
        artifacts={"report": report},
    )


def _run_quality_controller(ctx, args) -> ToolResult:
    volume = _need_volume(ctx)
    report = args["report"]
    if not isinstance(report, Report):
        raise ToolError("argument 'report' must reference a stored report")
    analysis = _as_analysis(args["analysis"])
    m_organ = _as_mask(args["organ_mask"], "organ_mask")
    m_lesion = _as_mask(args["lesion_mask"], "lesion_mask")
    templates = {t.template_id: t for t in (ctx.templates or [])}
    if report.template_id not in templates:
        raise ToolError(f"template #{report.template_id} is not loaded")
    final, history = refine_report(
        report,
        analysis,
        templates[report.template_id],
        m_organ,
        m_lesion,
        volume,
        ctx.gateway,
        max_rounds=ctx.config.qc_max_rounds,
        window_center=ctx.config.window_center,
        window_width=ctx.config.window_width,
    )
    return ToolResult(
        outcome=(
            f"quality check ran {len(history)} round(s); "
            f"qualified={str(final.qc.qualified).lower()}"
        ),
        artifacts={"report": final},
    )


def _run_finish_case(ctx, args) -> ToolResult:
    key = args["report_key"]
    if not ctx.memory.has(key):
        raise ToolError(f"memory has no key {key!r}")
    value = ctx.memory.get(key)
    if not isinstance(value, Report):
        raise ToolError(f"memory key {key!r} does not hold a report")
    return ToolResult(outcome=f"case closed; final report at {key!r}")


def build_registry() -> ToolRegistry:
    return ToolRegistry(
        [
            Tool(
                spec=ToolSpec(
                    name="segmentator",
                    description="produce organ and lesion masks for the case volume",
                    args=(
                        ArgSpec(
                            "targets", "list", True, "organ names to segment"
                        ),
                    ),
                ),
                fn=_run_segmentator,
            ),
            Tool(
                spec=ToolSpec(
                    name="analyzer",
                    description=(
                        "examine the masked region and collect per-item findings"
                    ),
                    args=(
                        ArgSpec("organ_mask", "string", True, "@key of the organ mask"),
                        ArgSpec("lesion_mask", "string", True, "@key of the lesion mask"),
                    ),
                ),
                fn=_run_analyzer,
            ),
            Tool(
                spec=ToolSpec(
                    name="report_generator",
                    description=(
                        "compose findings and impression from the analysis "
                        "using a reference template"
                    ),
                    args=(
                        ArgSpec("analysis", "string", True, "@key of the analysis result"),
                        ArgSpec("organ_mask", "string", True, "@key of the organ mask"),
                        ArgSpec("lesion_mask", "string", True, "@key of the lesion mask"),
                        ArgSpec(
                            "feedback", "string", False,
                            "reviewer feedback to address in a revision",
                        ),
                    ),
                ),
                fn=_run_report_generator,
            ),
            Tool(
                spec=ToolSpec(
                    name="quality_controller",
                    description=(
                        "assess the draft and refine it with feedback until "
                        "qualified or rounds run out"
                    ),
                    args=(
                        ArgSpec("report", "string", True, "@key of the draft report"),
                        ArgSpec("analysis", "string", True, "@key of the analysis result"),
                        ArgSpec("organ_mask", "string", True, "@key of the organ mask"),
                        ArgSpec("lesion_mask", "string", True, "@key of the lesion mask"),
                    ),
                ),
                fn=_run_quality_controller,
            ),
            Tool(
                spec=ToolSpec(
                    name="finish_case",
                    description=(
                        "declare the case complete, naming the memory key "
                        "holding the final report"
                    ),
                    args=(
                        ArgSpec(
                            "report_key", "string", True,
                            "literal memory key of the final report",
                        ),
                    ),
                ),
                fn=_run_finish_case,
            ),
        ]
    )
