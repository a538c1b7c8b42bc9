"""Corpus-level metric aggregation and report rendering."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import EvaluationError
from .nlg import bleu1, meteor_basic, rouge_l
from .text import tokenize

# model-based metrics stay external; the report reserves their columns
EXTERNAL_METRICS = ("bertscore", "f1_radgraph", "green")

MEAN_KEYS = ("bleu1", "rouge_l_precision", "rouge_l_recall", "rouge_l_f1", "meteor")


@dataclass(frozen=True)
class CaseScores:
    case_id: str
    bleu1: float
    rouge_l_precision: float
    rouge_l_recall: float
    rouge_l_f1: float
    meteor: float

    def __post_init__(self) -> None:
        for key in MEAN_KEYS:
            value = getattr(self, key)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{key} out of [0, 1]: {value}")


@dataclass(frozen=True)
class MetricReport:
    cases: tuple[CaseScores, ...]
    means: dict[str, float]
    case_count: int

    def to_json_dict(self) -> dict:
        externals = {name: None for name in EXTERNAL_METRICS}
        return {
            "case_count": self.case_count,
            "cases": [
                {
                    "case_id": c.case_id,
                    **{key: getattr(c, key) for key in MEAN_KEYS},
                    "external": dict(externals),
                }
                for c in self.cases
            ],
            "means": {**self.means, "external": dict(externals)},
        }

    def render_table(self) -> str:
        headers = ["case_id", *MEAN_KEYS]
        rows = [
            [c.case_id, *(f"{getattr(c, key):.4f}" for key in MEAN_KEYS)]
            for c in self.cases
        ]
        rows.append(["mean", *(f"{self.means[key]:.4f}" for key in MEAN_KEYS)])
        widths = [
            max(len(headers[i]), *(len(r[i]) for r in rows))
            for i in range(len(headers))
        ]
        def fmt(cells):
            return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
        ruler = "  ".join("-" * w for w in widths)
        return "\n".join([fmt(headers), ruler, *map(fmt, rows)])


def evaluate_corpus(
    predictions: dict[str, str], references: dict[str, str]
) -> MetricReport:
    """Score each aligned (prediction, reference) pair; unweighted means."""
    if not predictions or not references:
        raise EvaluationError("need at least one prediction and reference")
    missing_refs = sorted(set(predictions) - set(references))
    missing_preds = sorted(set(references) - set(predictions))
    if missing_refs or missing_preds:
        raise EvaluationError(
            f"case ids misaligned: no reference for {missing_refs}, "
            f"no prediction for {missing_preds}"
        )
    cases = []
    for case_id in sorted(predictions):
        cand = tokenize(predictions[case_id])
        ref = tokenize(references[case_id])
        if not ref:
            raise EvaluationError(f"reference for {case_id!r} has no tokens")
        p, r, f1 = rouge_l(cand, ref)
        cases.append(
            CaseScores(
                case_id=case_id,
                bleu1=bleu1(cand, ref),
                rouge_l_precision=p,
                rouge_l_recall=r,
                rouge_l_f1=f1,
                meteor=meteor_basic(cand, ref),
            )
        )
    means = {
        key: sum(getattr(c, key) for c in cases) / len(cases) for key in MEAN_KEYS
    }
    return MetricReport(cases=tuple(cases), means=means, case_count=len(cases))


def load_text_lines(path: str | Path) -> dict[str, str]:
    """JSON-lines of {case_id, text} keyed by case id."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise EvaluationError(f"{path} line {lineno}: not valid JSON") from exc
        if (
            not isinstance(obj, dict)
            or not isinstance(obj.get("case_id"), str)
            or not isinstance(obj.get("text"), str)
        ):
            raise EvaluationError(
                f"{path} line {lineno}: needs string case_id and text"
            )
        if obj["case_id"] in out:
            raise EvaluationError(
                f"{path} line {lineno}: duplicate case_id {obj['case_id']!r}"
            )
        out[obj["case_id"]] = obj["text"]
    if not out:
        raise EvaluationError(f"{path} holds no cases")
    return out
