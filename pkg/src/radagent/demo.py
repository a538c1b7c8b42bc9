"""Bundled synthetic liver case, runnable offline.

`python -m radagent.demo [ROOT]` materializes a complete case bundle
(volume, segmentation store, templates, catalog, scripted transcripts,
config) and runs it end to end. The same builder feeds the test suite,
so the bundle doubles as the reference scenario for the golden files.

Scene: a 64x64x64 CT at (1.5, 1.5, 3.0) mm spacing holding a soft-tissue
liver block with two bright lesions. The larger lesion spans slices
29..31, which pins the key-slice selection; the smaller one exists so
largest-component extraction has something to reject.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .agent.types import Query
from .config import load_config
from .runner import execute_case, write_case_outputs  # noqa: F401  (re-export for tests)
from .templates.types import Template, save_templates
from .tools.catalog import default_catalog, save_catalog
from .volume.nifti import write_nifti
from .volume.types import Volume

CASE_ID = "demo-001"
ORGAN = "liver"
QUERY_TEXT = "Write a CT report for the liver."

# voxel geometry of the synthetic scene (inclusive bounds, x/y/z order)
DIMS = (64, 64, 64)
SPACING = (1.5, 1.5, 3.0)
LIVER_BOX = ((10, 40), (12, 44), (20, 44))
MAIN_LESION = ((20, 22), (20, 20), (29, 31))  # 9 voxels, spans z 29..31
MINOR_LESION = ((30, 34), (30, 30), (25, 25))  # 5 voxels, single slice
LIVER_HU = 60
LESION_HU = 120

FINDINGS = (
    "The liver is normal in size with a smooth contour. "
    "The parenchyma is homogeneous. "
    "A focal hypodense lesion is seen in the right lobe spanning three "
    "consecutive slices. "
    "The intrahepatic bile ducts are not dilated."
)
IMPRESSION = (
    "Focal liver lesion; recommend contrast-enhanced follow-up imaging."
)

TEMPLATES = [
    Template(
        template_id=0,
        text=(
            "The liver is normal in size and contour. The parenchyma is "
            "homogeneous without focal lesion. The intrahepatic bile ducts "
            "are not dilated."
        ),
        cluster_id=0,
        member_count=4,
    ),
    Template(
        template_id=1,
        text=(
            "The liver is normal in size. A focal lesion is noted within "
            "the parenchyma; describe its site, size, and density. The "
            "intrahepatic bile ducts are not dilated."
        ),
        cluster_id=1,
        member_count=3,
    ),
    Template(
        template_id=2,
        text=(
            "The liver is small with a nodular surface. The parenchyma is "
            "heterogeneous. Findings are compatible with chronic disease."
        ),
        cluster_id=2,
        member_count=2,
    ),
]


def _fill(data: np.ndarray, box, value: int) -> None:
    (x0, x1), (y0, y1), (z0, z1) = box
    data[z0 : z1 + 1, y0 : y1 + 1, x0 : x1 + 1] = value


def build_volume() -> Volume:
    d, h, w = DIMS[2], DIMS[1], DIMS[0]
    data = np.zeros((d, h, w), dtype=np.int16)
    _fill(data, LIVER_BOX, LIVER_HU)
    _fill(data, MAIN_LESION, LESION_HU)
    _fill(data, MINOR_LESION, LESION_HU)
    return Volume(dims=DIMS, spacing=SPACING, data=data, dtype_tag="int16")


def _mask_volume(boxes) -> Volume:
    d, h, w = DIMS[2], DIMS[1], DIMS[0]
    data = np.zeros((d, h, w), dtype=np.uint8)
    for box in boxes:
        _fill(data, box, 1)
    return Volume(dims=DIMS, spacing=SPACING, data=data, dtype_tag="uint8")


def _sys(marker: str, response: str, **extra) -> dict:
    rec = {"match": {"role": "system", "contains": marker}, "response": response}
    rec.update(extra)
    return rec


def _chat_transcript() -> list[dict]:
    def plan(goal: str, tool: str, why: str) -> str:
        return json.dumps({"goal": goal, "tool": tool, "rationale": why})

    def command(arguments: dict) -> str:
        return json.dumps({"arguments": arguments})

    sections = json.dumps({"findings": FINDINGS, "impression": IMPRESSION})
    verdict_pass = json.dumps(
        {
            "qualified": True,
            "rubric": {"format": "pass", "content": "pass", "language-expression": "pass"},
            "comments": "Clear, complete, and grounded in the analysis.",
        }
    )
    continue_ = json.dumps({"verdict": "continue"})
    stop = json.dumps({"verdict": "stop", "report_key": "report"})

    return [
        _sys(
            "Draft a case guideline",
            "1. Segment the liver and any lesions.\n"
            "2. Analyze each catalog item on the rendered slices.\n"
            "3. Draft the report from the best-fitting template.\n"
            "4. Run quality control and revise if needed.\n"
            "5. Close the case with the final report.",
        ),
        _sys("Select the next action", plan("segment the study", "segmentator", "masks first")),
        _sys("Emit the tool command", command({"targets": [ORGAN]})),
        _sys("Audit the case memory", continue_),
        _sys(
            "Select the next action",
            plan("analyze the organ", "analyzer", "findings need visual evidence"),
        ),
        _sys(
            "Emit the tool command",
            command({"organ_mask": "@organ_mask", "lesion_mask": "@lesion_mask"}),
        ),
        _sys("Audit the case memory", continue_),
        _sys(
            "Select the next action",
            plan("draft the report", "report_generator", "analysis is complete"),
        ),
        _sys(
            "Emit the tool command",
            command(
                {
                    "analysis": "@analysis",
                    "organ_mask": "@organ_mask",
                    "lesion_mask": "@lesion_mask",
                }
            ),
        ),
        _sys("Choose the template number", "1"),
        _sys("Compose the report sections", sections),
        _sys("Audit the case memory", continue_),
        _sys(
            "Select the next action",
            plan("check the draft", "quality_controller", "reports ship only after review"),
        ),
        _sys(
            "Emit the tool command",
            command(
                {
                    "report": "@report",
                    "analysis": "@analysis",
                    "organ_mask": "@organ_mask",
                    "lesion_mask": "@lesion_mask",
                }
            ),
        ),
        _sys("Assess the report quality", verdict_pass),
        _sys("Audit the case memory", continue_),
        _sys(
            "Select the next action",
            plan("close the case", "finish_case", "report is qualified"),
        ),
        _sys("Emit the tool command", command({"report_key": "report"})),
        _sys("Audit the case memory", stop),
    ]


def _vision_transcript() -> list[dict]:
    def rec(needle: str, response: str) -> dict:
        return {"match": {"role": "user", "contains": needle}, "response": response}

    return [
        rec("liver surface", "The liver surface is smooth without nodularity."),
        rec(
            "liver parenchyma",
            "The parenchyma is homogeneous with normal attenuation.",
        ),
        rec("bile ducts", "No intrahepatic bile duct dilation."),
        rec(
            "focal liver lesions",
            "A focal hypodense lesion spans three consecutive slices; "
            "no further lesions are seen.",
        ),
    ]


def _config_payload() -> dict:
    return {
        "backends": {
            "chat": {"kind": "scripted", "transcript": "chat.json"},
            "vision": {"kind": "scripted", "transcript": "vision.json"},
            "embedding": {"kind": "hash", "seed": 0},
            "segmentation": {
                "kind": "file-store",
                "store": "segstore",
                "organs": [ORGAN],
            },
        },
        "policy": {"request_timeout": 30, "max_retries": 0, "retry_backoff": 0},
        "engine": {
            "max_steps": 10,
            "time_budget_s": 500.0,
            "qc_max_rounds": 3,
            "deterministic_timing": True,
        },
        "render": {"window_center": 40.0, "window_width": 400.0, "roi_margin": 2},
        "clustering": {"k": 3, "seed": 0},
        "paths": {
            "catalog": "catalog.json",
            "templates": "templates.json",
            "out_dir": "out",
        },
    }


def build_demo_case(root: str | Path) -> Path:
    """Write the full bundle under `root`; returns the config path."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)

    volume = build_volume()
    write_nifti(root / "volume.nii.gz", volume)
    store = root / "segstore" / CASE_ID
    store.mkdir(parents=True, exist_ok=True)
    # the service resolves relative volume_refs inside the case's store dir
    write_nifti(store / "volume.nii.gz", volume)
    write_nifti(store / "organ.nii.gz", _mask_volume([LIVER_BOX]))
    write_nifti(store / "lesion.nii.gz", _mask_volume([MAIN_LESION, MINOR_LESION]))

    save_templates(TEMPLATES, root / "templates.json")
    save_catalog(default_catalog(), root / "catalog.json")
    (root / "chat.json").write_text(json.dumps(_chat_transcript(), indent=2) + "\n")
    (root / "vision.json").write_text(json.dumps(_vision_transcript(), indent=2) + "\n")
    (root / "config.json").write_text(
        json.dumps(_config_payload(), indent=2, sort_keys=True) + "\n"
    )
    return root / "config.json"


def demo_query() -> Query:
    return Query(text=QUERY_TEXT, case_id=CASE_ID, organ=ORGAN)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="radagent-demo",
        description="Build the bundled synthetic liver case and run it.",
    )
    parser.add_argument(
        "root",
        nargs="?",
        default="demo",
        help="directory to place the bundle in (default: ./demo)",
    )
    args = parser.parse_args(argv)

    config_path = build_demo_case(args.root)
    config = load_config(config_path)  # out/ resolves inside the bundle
    volume = build_volume()
    outcome = execute_case(config, demo_query(), volume)

    print(f"case {CASE_ID}: {outcome.terminal_status}", file=sys.stderr)
    print(f"trace:  {outcome.trace_path}", file=sys.stderr)
    if outcome.report_path is not None:
        print(f"report: {outcome.report_path}", file=sys.stderr)
    return outcome.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
