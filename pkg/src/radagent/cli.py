"""Command-line front: report runs, template derivation, evaluation,
judge-prompt export, and the HTTP service.

Exit codes for case runs are a function of how the run ended:
0 completed, 1 aborted (or any startup failure), 2 step-cap/time-budget.
Diagnostics go to stderr; file outputs land under <out_dir>/<case_id>/.
"""
from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import click

from . import __version__
from .config import EngineConfig, load_config
from .errors import RadAgentError
from .metrics import evaluate_corpus, judge_prompt_for_text, load_text_lines
from .runner import CaseOutcome, derive_assets, execute_case_from_files


def _fail(message: str) -> "sys.NoReturn":
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _load(config_path: Path, **overrides) -> EngineConfig:
    """Parse the file, then apply any non-None field overrides."""
    fields = {k: v for k, v in overrides.items() if v is not None}
    try:
        config = load_config(config_path)
        return replace(config, **fields) if fields else config
    except RadAgentError as exc:
        _fail(str(exc))


@click.group()
@click.version_option(__version__, prog_name="radagent")
def main() -> None:
    """Agentic radiology-report engine."""


# ---------------------------------------------------------------- report

def _run_one(
    config: EngineConfig,
    volume_path: Path,
    case_id: str,
    query_text: str,
    organ: str,
) -> CaseOutcome:
    return execute_case_from_files(config, volume_path, case_id, query_text, organ)


def _report_line(outcome: CaseOutcome) -> str:
    return (
        f"case {outcome.trace.query.case_id}: {outcome.terminal_status}"
        f" -> {outcome.out_dir}"
    )


def _load_manifest(path: Path) -> list[dict]:
    raw = json.loads(path.read_text())
    if not isinstance(raw, list) or not raw:
        raise ValueError("manifest must be a non-empty JSON list")
    entries = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict):
            raise ValueError(f"manifest entry {i} is not an object")
        for key in ("case_id", "volume", "organ"):
            if not isinstance(item.get(key), str) or not item[key]:
                raise ValueError(f"manifest entry {i} needs a string {key!r}")
        entries.append(item)
    ids = [e["case_id"] for e in entries]
    if len(ids) != len(set(ids)):
        raise ValueError("manifest holds duplicate case ids")
    return entries


@main.command("report")
@click.option("--config", "config_path", required=True, type=click.Path(path_type=Path))
@click.option("--volume", "volume_path", type=click.Path(path_type=Path))
@click.option("--case-id", "case_id")
@click.option("--query", "query_text", help="request text (default derived from --organ)")
@click.option("--organ")
@click.option(
    "--batch",
    "batch_path",
    type=click.Path(path_type=Path),
    help="JSON manifest of cases; replaces --volume/--case-id/--organ",
)
@click.option(
    "--jobs",
    type=int,
    default=None,
    help="parallel cases in batch mode (default: processor count)",
)
@click.option("--max-steps", type=int, help="override engine.max_steps")
@click.option("--time-budget-s", type=float, help="override engine.time_budget_s")
@click.option("--qc-max-rounds", type=int, help="override engine.qc_max_rounds")
@click.option("--out-dir", type=click.Path(path_type=Path), help="override paths.out_dir")
def cmd_report(
    config_path: Path,
    volume_path: Path | None,
    case_id: str | None,
    query_text: str | None,
    organ: str | None,
    batch_path: Path | None,
    jobs: int | None,
    max_steps: int | None,
    time_budget_s: float | None,
    qc_max_rounds: int | None,
    out_dir: Path | None,
) -> None:
    """Run one case (or a batch) end to end and write its outputs."""
    config = _load(
        config_path,
        max_steps=max_steps,
        time_budget_s=time_budget_s,
        qc_max_rounds=qc_max_rounds,
        out_dir=out_dir,
    )

    if batch_path is not None:
        if volume_path or case_id or organ:
            raise click.UsageError("--batch excludes --volume/--case-id/--organ")
        try:
            entries = _load_manifest(batch_path)
        except (OSError, ValueError, json.JSONDecodeError) as exc:
            _fail(f"manifest unusable: {exc}")
        base = batch_path.parent
        workers = jobs if jobs and jobs > 0 else (os.cpu_count() or 1)

        def run(entry: dict) -> int:
            vol = Path(entry["volume"])
            if not vol.is_absolute():
                vol = base / vol
            text = entry.get("query") or f"Write a CT report for the {entry['organ']}."
            try:
                outcome = _run_one(config, vol, entry["case_id"], text, entry["organ"])
            except (RadAgentError, OSError) as exc:
                click.echo(f"case {entry['case_id']}: failed ({exc})", err=True)
                return 1
            click.echo(_report_line(outcome), err=True)
            return outcome.exit_code

        with ThreadPoolExecutor(max_workers=workers) as pool:
            codes = list(pool.map(run, entries))
        sys.exit(max(codes))

    if not (volume_path and case_id and organ):
        raise click.UsageError("--volume, --case-id, and --organ are required (or use --batch)")
    text = query_text or f"Write a CT report for the {organ}."
    try:
        outcome = _run_one(config, volume_path, case_id, text, organ)
    except (RadAgentError, OSError) as exc:
        _fail(str(exc))
    click.echo(_report_line(outcome), err=True)
    sys.exit(outcome.exit_code)


# ------------------------------------------------------- derive-templates

@main.command("derive-templates")
@click.option("--config", "config_path", required=True, type=click.Path(path_type=Path))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(path_type=Path))
@click.option("--organ", required=True)
@click.option("--out-templates", type=click.Path(path_type=Path))
@click.option("--out-catalog", type=click.Path(path_type=Path))
@click.option("--k", type=int, help="override clustering.k")
@click.option("--seed", type=int, help="override clustering.seed")
def cmd_derive_templates(
    config_path: Path,
    corpus_path: Path,
    organ: str,
    out_templates: Path | None,
    out_catalog: Path | None,
    k: int | None,
    seed: int | None,
) -> None:
    """Cluster a report corpus into templates + an analysis catalog."""
    config = _load(config_path, k=k, seed=seed)
    try:
        templates_path, catalog_path = derive_assets(
            config, corpus_path, organ, out_templates, out_catalog
        )
    except (RadAgentError, OSError) as exc:
        _fail(str(exc))
    click.echo(f"templates: {templates_path}", err=True)
    click.echo(f"catalog:   {catalog_path}", err=True)


# ---------------------------------------------------------------- evaluate

@main.command("evaluate")
@click.option("--predictions", required=True, type=click.Path(path_type=Path))
@click.option("--references", required=True, type=click.Path(path_type=Path))
@click.option("--out", "out_path", type=click.Path(path_type=Path))
def cmd_evaluate(predictions: Path, references: Path, out_path: Path | None) -> None:
    """Score predictions against references; table to stdout."""
    try:
        preds = load_text_lines(predictions)
        refs = load_text_lines(references)
        report = evaluate_corpus(preds, refs)
    except (RadAgentError, OSError) as exc:
        _fail(str(exc))
    click.echo(report.render_table())
    if out_path is not None:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(
            json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n"
        )
        click.echo(f"wrote {out_path}", err=True)


# ------------------------------------------------------------ judge-export

@main.command("judge-export")
@click.option("--trace", "trace_path", required=True, type=click.Path(path_type=Path))
@click.option("--out", "out_path", type=click.Path(path_type=Path))
def cmd_judge_export(trace_path: Path, out_path: Path | None) -> None:
    """Turn a finished trace into a four-dimension judge prompt."""
    try:
        prompt = judge_prompt_for_text(trace_path.read_text())
    except (RadAgentError, OSError) as exc:
        _fail(str(exc))
    if out_path is None:
        click.echo(prompt)
    else:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(prompt)
        click.echo(f"wrote {out_path}", err=True)


# -------------------------------------------------------------------- serve

@main.command("serve")
@click.option("--config", "config_path", required=True, type=click.Path(path_type=Path))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def cmd_serve(config_path: Path, host: str, port: int) -> None:
    """Serve POST /v1/report for the configured engine."""
    import uvicorn

    from .service import create_app

    config = _load(config_path)
    app = create_app(config)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
