"""Case execution shared by the CLI and the service.

Both fronts build the same gateway, run the same loop, and write the
same files, so a report requested over HTTP is byte-identical to one
produced from the command line.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .agent.loop import run_case
from .agent.trace_io import write_trace
from .agent.types import CaseTrace, Query
from .config import BackendConfig, EngineConfig
from .errors import ConfigError
from .gateway import (
    FileStoreSegmentationBackend,
    Gateway,
    HashEmbeddingBackend,
    HttpChatBackend,
    HttpEmbeddingBackend,
    HttpVisionBackend,
    ScriptedChatBackend,
    ScriptedVisionBackend,
)
from .templates import (
    Template,
    derive_templates,
    load_corpus,
    load_templates,
    save_templates,
    summarize_analysis_items,
)
from .tools import Report, build_registry, default_catalog, load_catalog, save_catalog
from .tools.types import AnalysisItem
from .volume.nifti import parse_nifti
from .volume.types import Volume

# exit codes are a total function of how the run ended
EXIT_CODES = {"completed": 0, "aborted": 1, "step-cap": 2, "time-budget": 2}


def _existing(path: Path | None, what: str) -> Path:
    if path is None or not Path(path).exists():
        raise ConfigError(f"{what} not found: {path}")
    return Path(path)


def _chat_backend(cfg: BackendConfig, timeout: float):
    if cfg.kind == "scripted":
        return ScriptedChatBackend.from_file(_existing(cfg.transcript, "chat transcript"))
    return HttpChatBackend(
        cfg.base_url, model=cfg.model, api_key=cfg.api_key(), timeout=timeout
    )


def _vision_backend(cfg: BackendConfig, timeout: float):
    if cfg.kind == "scripted":
        return ScriptedVisionBackend.from_file(
            _existing(cfg.transcript, "vision transcript")
        )
    return HttpVisionBackend(
        cfg.base_url, model=cfg.model, api_key=cfg.api_key(), timeout=timeout
    )


def _embedding_backend(cfg: BackendConfig, timeout: float):
    if cfg.kind == "hash":
        return HashEmbeddingBackend(seed=cfg.seed)
    return HttpEmbeddingBackend(
        cfg.base_url, model=cfg.model, api_key=cfg.api_key(), timeout=timeout
    )


def build_gateway(config: EngineConfig) -> Gateway:
    timeout = config.policy.request_timeout
    return Gateway(
        chat_backend=_chat_backend(config.chat, timeout),
        vision_backend=_vision_backend(config.vision, timeout),
        embedding_backend=_embedding_backend(config.embedding, timeout),
        segmentation_backend=FileStoreSegmentationBackend(
            _existing(config.segmentation.store, "segmentation store"),
            organs=list(config.segmentation.organs),
        ),
        policy=config.policy,
    )


def load_assets(
    config: EngineConfig,
) -> tuple[dict[str, list[AnalysisItem]], list[Template]]:
    if config.catalog_path is not None:
        catalog = load_catalog(_existing(config.catalog_path, "analysis catalog"))
    else:
        catalog = default_catalog()
    if config.templates_path is None:
        raise ConfigError("paths.templates must point at a template file")
    templates = load_templates(_existing(config.templates_path, "template file"))
    return catalog, templates


@dataclass(frozen=True)
class CaseOutcome:
    terminal_status: str
    exit_code: int
    trace: CaseTrace
    report: Report | None
    out_dir: Path
    report_path: Path | None
    trace_path: Path


def write_case_outputs(
    config: EngineConfig, report: Report | None, trace: CaseTrace
) -> CaseOutcome:
    # structural invariant behind the exit codes: 0 always has a report
    if trace.terminal_status == "completed" and report is None:
        raise ValueError("completed case without a report")
    out_dir = Path(config.out_dir) / trace.query.case_id
    out_dir.mkdir(parents=True, exist_ok=True)
    trace_path = out_dir / "trace.jsonl"
    write_trace(trace, trace_path, config.digest())
    report_path = None
    if report is not None:
        report_path = out_dir / "report.json"
        blob = json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n"
        report_path.write_text(blob)
        for (_, filename), image in zip(report.key_slices, report.images):
            (out_dir / filename).write_bytes(image.to_pgm())
    status = trace.terminal_status or "aborted"
    return CaseOutcome(
        terminal_status=status,
        exit_code=EXIT_CODES[status],
        trace=trace,
        report=report,
        out_dir=out_dir,
        report_path=report_path,
        trace_path=trace_path,
    )


def execute_case(
    config: EngineConfig,
    query: Query,
    volume: Volume,
    gateway: Gateway | None = None,
) -> CaseOutcome:
    """Run one case end to end and write its output directory."""
    gw = gateway if gateway is not None else build_gateway(config)
    catalog, templates = load_assets(config)
    registry = build_registry()
    report, trace = run_case(
        query,
        volume,
        registry,
        gw,
        config,
        catalog=catalog,
        templates=templates,
    )
    return write_case_outputs(config, report, trace)


def execute_case_from_files(
    config: EngineConfig,
    volume_path: str | Path,
    case_id: str,
    query_text: str,
    organ: str,
) -> CaseOutcome:
    volume = parse_nifti(volume_path)
    query = Query(text=query_text, case_id=case_id, organ=organ)
    return execute_case(config, query, volume)


def derive_assets(
    config: EngineConfig,
    corpus_path: str | Path,
    organ: str,
    out_templates: str | Path | None = None,
    out_catalog: str | Path | None = None,
) -> tuple[Path, Path]:
    """Corpus -> templates + analysis-item catalog, written to disk."""
    gateway = build_gateway(config)
    corpus = load_corpus(corpus_path)
    templates = derive_templates(
        corpus, organ, k=config.k, seed=config.seed, gateway=gateway
    )
    items = summarize_analysis_items(templates, organ, gateway)
    templates_path = Path(
        out_templates
        if out_templates is not None
        else (config.templates_path or Path(config.out_dir) / "templates.json")
    )
    catalog_path = Path(
        out_catalog
        if out_catalog is not None
        else (config.catalog_path or Path(config.out_dir) / "catalog.json")
    )
    templates_path.parent.mkdir(parents=True, exist_ok=True)
    catalog_path.parent.mkdir(parents=True, exist_ok=True)
    save_templates(templates, templates_path)
    save_catalog({organ: items}, catalog_path)
    return templates_path, catalog_path
