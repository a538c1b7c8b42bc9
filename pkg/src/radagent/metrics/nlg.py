"""Reference-based text metrics over token lists: BLEU-1, ROUGE-L, and
a reduced METEOR (exact + stem matching, no synonym stage)."""
from __future__ import annotations

import math
from collections import Counter

from ..errors import EvaluationError
from .text import porter_stem


def bleu1(candidate: list[str], reference: list[str]) -> float:
    """Clipped unigram precision with the standard brevity penalty."""
    if not reference:
        raise EvaluationError("bleu1 reference must be non-empty")
    if not candidate:
        return 0.0
    ref_counts = Counter(reference)
    clipped = sum(min(n, ref_counts[tok]) for tok, n in Counter(candidate).items())
    precision = clipped / len(candidate)
    brevity = math.exp(min(0.0, 1.0 - len(reference) / len(candidate)))
    return precision * brevity


def _lcs_length(a: list[str], b: list[str]) -> int:
    # one-row DP; O(len(a) * len(b))
    if not a or not b:
        return 0
    row = [0] * (len(b) + 1)
    for x in a:
        prev_diag = 0
        for j, y in enumerate(b, start=1):
            prev_row = row[j]
            if x == y:
                row[j] = prev_diag + 1
            elif row[j - 1] > row[j]:
                row[j] = row[j - 1]
            prev_diag = prev_row
    return row[-1]


def rouge_l(candidate: list[str], reference: list[str]) -> tuple[float, float, float]:
    """(precision, recall, f1) from the longest common subsequence."""
    if not candidate or not reference:
        return (0.0, 0.0, 0.0)
    lcs = _lcs_length(candidate, reference)
    precision = lcs / len(candidate)
    recall = lcs / len(reference)
    if precision + recall == 0.0:
        return (0.0, 0.0, 0.0)
    f1 = 2.0 * precision * recall / (precision + recall)
    return (precision, recall, f1)


def _align(candidate: list[str], reference: list[str]) -> list[tuple[int, int]]:
    """Greedy left-to-right unigram alignment: exact pass, then stems."""
    taken = [False] * len(reference)
    pairs: dict[int, int] = {}
    for i, tok in enumerate(candidate):
        for j, ref_tok in enumerate(reference):
            if not taken[j] and ref_tok == tok:
                pairs[i] = j
                taken[j] = True
                break
    cand_stems = [porter_stem(t) for t in candidate]
    ref_stems = [porter_stem(t) for t in reference]
    for i in range(len(candidate)):
        if i in pairs:
            continue
        for j in range(len(reference)):
            if not taken[j] and ref_stems[j] == cand_stems[i]:
                pairs[i] = j
                taken[j] = True
                break
    return sorted(pairs.items())


def meteor_basic(candidate: list[str], reference: list[str]) -> float:
    """F_mean weighted toward recall, discounted by a fragmentation
    penalty; 0 when nothing aligns."""
    if not candidate or not reference:
        return 0.0
    pairs = _align(candidate, reference)
    matches = len(pairs)
    if matches == 0:
        return 0.0
    precision = matches / len(candidate)
    recall = matches / len(reference)
    f_mean = 10.0 * precision * recall / (recall + 9.0 * precision)
    chunks = 0
    prev = None
    for i, j in pairs:
        if prev is None or i != prev[0] + 1 or j != prev[1] + 1:
            chunks += 1
        prev = (i, j)
    penalty = 0.5 * (chunks / matches) ** 3
    return f_mean * (1.0 - penalty)
