"""Segmentation wrapper and per-item region analysis."""
from __future__ import annotations

import numpy as np

from ..errors import GatewayError, ToolError
from ..gateway.core import Gateway
from ..gateway.types import VisionRequest
from ..volume.ops import extract_roi, mask_bounding_box, render_slice, select_key_slices
from ..volume.types import Mask, Volume
from .types import LESION_LABEL, ORGAN_LABEL, AnalysisItem, AnalysisResult


def segmentator_tool(
    case_id: str, volume: Volume, targets: list[str], gateway: Gateway
) -> tuple[Mask, Mask]:
    """Fetch (organ, lesion) masks and check they fit the volume."""
    organ, lesion = gateway.segment(case_id, targets)
    if organ.dims != volume.dims:
        raise ToolError(
            f"organ mask dims {organ.dims} do not match volume dims {volume.dims}"
        )
    if lesion.dims != volume.dims:
        raise ToolError(
            f"lesion mask dims {lesion.dims} do not match volume dims {volume.dims}"
        )
    return organ, lesion


def region_descriptor(volume: Volume, m_organ: Mask, margin: int) -> str:
    box = mask_bounding_box(m_organ, ORGAN_LABEL)
    if box is None:
        raise ToolError("organ mask is empty")
    w, h, d = volume.dims
    x0, x1 = max(box.x[0] - margin, 0), min(box.x[1] + margin, w - 1)
    y0, y1 = max(box.y[0] - margin, 0), min(box.y[1] + margin, h - 1)
    z0, z1 = max(box.z[0] - margin, 0), min(box.z[1] + margin, d - 1)
    return (
        f"x{x0}..{x1} y{y0}..{y1} z{z0}..{z1} (margin {margin}) of {w}x{h}x{d}"
    )


def analyzer_tool(
    volume: Volume,
    m_organ: Mask,
    m_lesion: Mask,
    items: list[AnalysisItem],
    gateway: Gateway,
    *,
    organ: str,
    window_center: float = 40.0,
    window_width: float = 400.0,
    roi_margin: int = 2,
) -> AnalysisResult:
    """One vision request per planned item over the organ ROI.

    The VLM sees the three central windowed slices of the organ region;
    a failing vision call flags that item rather than killing the rest.
    """
    if mask_bounding_box(m_organ, ORGAN_LABEL) is None:
        raise ToolError("organ mask is empty")
    if not items:
        raise ToolError("no analysis items planned")

    lesion_present = bool(np.count_nonzero(m_lesion.labels == LESION_LABEL))
    region = region_descriptor(volume, m_organ, roi_margin)
    roi = extract_roi(volume, m_organ, ORGAN_LABEL, margin=roi_margin)

    # central three slices of the organ, mapped into ROI coordinates
    zs = select_key_slices(m_organ, ORGAN_LABEL)
    box = mask_bounding_box(m_organ, ORGAN_LABEL)
    z0 = max(box.z[0] - roi_margin, 0)
    images = tuple(
        render_slice(roi, z - z0, center=window_center, width=window_width)
        for z in zs
    )

    findings: list[tuple[str, str]] = []
    for item in items:
        prompt = (
            f"{item.prompt_fragment}\n"
            f"Organ: {organ}. Region: {region}."
        )
        req = VisionRequest(prompt=prompt, images=images, volume_ref=region)
        try:
            text = gateway.analyze_image(req)
        except GatewayError as exc:
            text = f"{AnalysisResult.UNAVAILABLE_PREFIX}{exc}"
        findings.append((item.name, text))

    return AnalysisResult(
        organ=organ,
        item_findings=tuple(findings),
        lesion_present=lesion_present,
        region=region,
    )
