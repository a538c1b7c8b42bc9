from .analyzer import analyzer_tool, region_descriptor, segmentator_tool
from .catalog import (
    DEFAULT_LIVER_ITEMS,
    default_catalog,
    load_catalog,
    plan_region_analysis,
    save_catalog,
)
from .quality import (
    QC_MARKER,
    assess_quality,
    quality_controlled_generation,
    refine_report,
)
from .registry import build_registry
from .reporting import (
    COMPOSE_MARKER,
    TEMPLATE_CHOICE_MARKER,
    generate_report,
    key_slice_plan,
    select_template,
    with_qc,
)
from .types import (
    LESION_LABEL,
    ORGAN_LABEL,
    RUBRIC_KEYS,
    AnalysisItem,
    AnalysisResult,
    Assessment,
    QCOutcome,
    Report,
)

__all__ = [
    "AnalysisItem",
    "AnalysisResult",
    "Assessment",
    "COMPOSE_MARKER",
    "DEFAULT_LIVER_ITEMS",
    "LESION_LABEL",
    "ORGAN_LABEL",
    "QCOutcome",
    "QC_MARKER",
    "RUBRIC_KEYS",
    "Report",
    "TEMPLATE_CHOICE_MARKER",
    "analyzer_tool",
    "assess_quality",
    "build_registry",
    "default_catalog",
    "generate_report",
    "key_slice_plan",
    "load_catalog",
    "plan_region_analysis",
    "quality_controlled_generation",
    "refine_report",
    "region_descriptor",
    "save_catalog",
    "select_template",
    "segmentator_tool",
    "with_qc",
]
