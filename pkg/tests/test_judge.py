"""Judge protocol: prompt export, score parsing, histogram aggregation."""
from __future__ import annotations

import json

import pytest

from radagent.agent import ActionRecord, CaseTrace, Query
from radagent.errors import EvaluationError
from radagent.metrics import (
    DIMENSION_KEYS,
    JudgeScore,
    aggregate_judge_scores,
    export_judge_prompt,
    judge_prompt_for_text,
    parse_judge_reply,
)

DISPLAY_NAMES = (
    "Analysis Process",
    "Tool Selection",
    "Action Planning",
    "Action Execution",
)


def finished_trace() -> CaseTrace:
    trace = CaseTrace(
        query=Query(text="Report the liver.", case_id="case-3", organ="liver"),
        guideline="Segment, analyze, report.",
    )
    trace.append(
        ActionRecord(
            step_index=1,
            goal="close out",
            tool_name="finish_case",
            rationale="",
            arguments={"report_key": "report"},
            status="ok",
            outcome="case closed",
            artifact_keys=(),
            wall_time=0.001,
        )
    )
    trace.finish("completed")
    return trace


def test_prompt_contains_each_dimension_name_once():
    prompt = export_judge_prompt(finished_trace(), config_digest="abc123")
    for name in DISPLAY_NAMES:
        assert prompt.count(name) == 1, name
    assert '"case_id":"case-3"' in prompt  # serialized trace is embedded
    assert "terminal_status" in prompt


def test_prompt_requires_terminal_trace():
    trace = CaseTrace(
        query=Query(text="q", case_id="c", organ="liver"), guideline="g"
    )
    with pytest.raises(EvaluationError, match="terminal"):
        export_judge_prompt(trace, config_digest="abc123")


def test_prompt_from_serialized_text():
    text = (
        '{"query":{"text":"q","case_id":"c","organ":"liver"}}\n'
        '{"terminal_status":"completed"}\n'
    )
    prompt = judge_prompt_for_text(text)
    for name in DISPLAY_NAMES:
        assert prompt.count(name) == 1
    with pytest.raises(EvaluationError, match="terminal"):
        judge_prompt_for_text('{"query":{}}\n')
    with pytest.raises(EvaluationError, match="empty"):
        judge_prompt_for_text("")


def test_parse_judge_reply_happy_path():
    reply = json.dumps(
        {
            "analysis-process": 5,
            "tool-selection": 5,
            "action-planning": 4,
            "action-execution": 5,
        }
    )
    scores = parse_judge_reply(reply)
    assert [s.score for s in scores] == [5, 5, 4, 5]
    assert tuple(s.dimension for s in scores) == DIMENSION_KEYS


def test_parse_judge_reply_rejects_out_of_range():
    base = {key: 3 for key in DIMENSION_KEYS}
    for bad in (0, 6, -1):
        with pytest.raises(EvaluationError, match="outside"):
            parse_judge_reply(json.dumps({**base, "tool-selection": bad}))
    with pytest.raises(EvaluationError, match="integer"):
        parse_judge_reply(json.dumps({**base, "tool-selection": True}))
    with pytest.raises(EvaluationError, match="integer"):
        parse_judge_reply(json.dumps({**base, "tool-selection": "4"}))
    missing = {k: 3 for k in DIMENSION_KEYS[:-1]}
    with pytest.raises(EvaluationError):
        parse_judge_reply(json.dumps(missing))
    with pytest.raises(EvaluationError, match="unexpected"):
        parse_judge_reply(json.dumps({**base, "style": 3}))


def test_judge_score_type_guards():
    with pytest.raises(ValueError):
        JudgeScore(dimension="vibes", score=3)
    with pytest.raises(ValueError):
        JudgeScore(dimension="tool-selection", score=0)


def test_aggregate_empty_input_is_all_zero():
    counts = aggregate_judge_scores([])
    for key in DIMENSION_KEYS:
        assert counts[key] == {1: 0, 2: 0, 3: 0, 4: 0, 5: 0}


def test_aggregate_uniform_fives():
    scores = [
        JudgeScore(dimension=key, score=5) for key in DIMENSION_KEYS for _ in range(3)
    ]
    counts = aggregate_judge_scores(scores)
    for key in DIMENSION_KEYS:
        assert counts[key][5] == 3
        assert sum(counts[key].values()) == 3


def test_aggregate_matches_hand_tally_on_ten_cases():
    # ten cases, scores chosen by hand; tallied independently below
    per_case = [
        (5, 4, 4, 5),
        (3, 5, 4, 4),
        (5, 5, 5, 5),
        (2, 3, 4, 4),
        (4, 4, 4, 3),
        (5, 4, 3, 5),
        (1, 2, 4, 5),
        (4, 4, 5, 5),
        (5, 5, 4, 2),
        (3, 4, 4, 4),
    ]
    scores = [
        JudgeScore(dimension=key, score=vals[d])
        for vals in per_case
        for d, key in enumerate(DIMENSION_KEYS)
    ]
    counts = aggregate_judge_scores(scores)
    assert counts["analysis-process"] == {1: 1, 2: 1, 3: 2, 4: 2, 5: 4}
    assert counts["tool-selection"] == {1: 0, 2: 1, 3: 1, 4: 5, 5: 3}
    assert counts["action-planning"] == {1: 0, 2: 0, 3: 1, 4: 7, 5: 2}
    assert counts["action-execution"] == {1: 0, 2: 1, 3: 1, 4: 3, 5: 5}
    for key in DIMENSION_KEYS:
        assert sum(counts[key].values()) == len(per_case)
