from .corpus import (
    EXTERNAL_METRICS,
    MEAN_KEYS,
    CaseScores,
    MetricReport,
    evaluate_corpus,
    load_text_lines,
)
from .judge import (
    DIMENSION_KEYS,
    DIMENSIONS,
    JudgeScore,
    aggregate_judge_scores,
    export_judge_prompt,
    judge_prompt_for_text,
    parse_judge_reply,
)
from .nlg import bleu1, meteor_basic, rouge_l
from .text import porter_stem, tokenize

__all__ = [
    "CaseScores",
    "DIMENSIONS",
    "DIMENSION_KEYS",
    "EXTERNAL_METRICS",
    "JudgeScore",
    "MEAN_KEYS",
    "MetricReport",
    "aggregate_judge_scores",
    "bleu1",
    "evaluate_corpus",
    "export_judge_prompt",
    "judge_prompt_for_text",
    "load_text_lines",
    "meteor_basic",
    "parse_judge_reply",
    "porter_stem",
    "rouge_l",
    "tokenize",
]
