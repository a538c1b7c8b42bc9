"""Analysis-item catalogs: which aspects to examine per organ.

Catalogs are data, not code: the derivation pipeline can write new ones,
but a liver catalog ships as the default so the engine runs out of the
box.
"""
from __future__ import annotations

import json
from pathlib import Path

from ..errors import ToolError
from .types import AnalysisItem

DEFAULT_LIVER_ITEMS = (
    AnalysisItem(
        name="liver-surface",
        prompt_fragment="Describe the liver surface: contour, smoothness, and any nodularity.",
        lesion_related=False,
    ),
    AnalysisItem(
        name="liver-parenchyma",
        prompt_fragment="Describe the liver parenchyma: density, homogeneity, and attenuation.",
        lesion_related=False,
    ),
    AnalysisItem(
        name="bile-ducts",
        prompt_fragment="Describe the intrahepatic bile ducts: caliber and any dilation.",
        lesion_related=False,
    ),
    AnalysisItem(
        name="liver-lesions",
        prompt_fragment="Describe any focal liver lesions: size, shape, and density.",
        lesion_related=True,
    ),
)


def default_catalog() -> dict[str, list[AnalysisItem]]:
    return {"liver": list(DEFAULT_LIVER_ITEMS)}


def save_catalog(catalog: dict[str, list[AnalysisItem]], path: str | Path) -> None:
    payload = {
        organ: [
            {
                "name": i.name,
                "prompt_fragment": i.prompt_fragment,
                "lesion_related": i.lesion_related,
            }
            for i in items
        ]
        for organ, items in catalog.items()
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_catalog(path: str | Path) -> dict[str, list[AnalysisItem]]:
    raw = json.loads(Path(path).read_text())
    return {
        organ: [AnalysisItem(**item) for item in items]
        for organ, items in raw.items()
    }


def plan_region_analysis(
    organ: str, lesion_present: bool, catalog: list[AnalysisItem]
) -> list[AnalysisItem]:
    """All non-lesion items, plus lesion-related items iff a lesion exists."""
    if not catalog:
        raise ToolError(f"no analysis items cataloged for organ {organ!r}")
    names = [i.name for i in catalog]
    if len(names) != len(set(names)):
        raise ToolError(f"duplicate analysis item names for organ {organ!r}")
    return [i for i in catalog if lesion_present or not i.lesion_related]
