"""Core metric primitives: chrF1, WER edit scripts, hPER/rPER, corpus BLEU."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .corpus import Corpus, Segment

CHRF_ORDERS = range(1, 7)
BLEU_ORDERS = range(1, 5)

MATCH = "match"
SUBSTITUTION = "substitution"
INSERTION = "insertion"
DELETION = "deletion"


@dataclass(frozen=True)
class MetricScore:
    value: float
    scale: str  # "0-100" or "0-1"
    level: str  # "segment" or "corpus"


@dataclass(frozen=True)
class EditScript:
    """Per-token labels from one Levenshtein alignment of hypothesis to reference."""

    hyp_labels: tuple[str, ...]  # match | substitution | insertion
    ref_labels: tuple[str, ...]  # match | substitution | deletion
    distance: int


@dataclass(frozen=True)
class BleuResult:
    score: MetricScore
    precisions: tuple[float, ...]
    brevity_penalty: float
    hyp_length: int
    ref_length: int
    degenerate: bool  # some n-gram order had zero matches


def _char_ngrams(seg: Segment, n: int) -> Counter:
    text = "".join(seg.tokens)  # chrF strips spaces before extraction
    return Counter(text[i:i + n] for i in range(len(text) - n + 1))


def _chrf_segment_stats(hyp: Segment, ref: Segment) -> list[tuple[int, int, int]]:
    """Per order n=1..6: (matched, hyp total, ref total) character n-gram counts."""
    stats = []
    for n in CHRF_ORDERS:
        h = _char_ngrams(hyp, n)
        r = _char_ngrams(ref, n)
        matched = sum((h & r).values())
        stats.append((matched, sum(h.values()), sum(r.values())))
    return stats


def _chrf_from_stats(stats: list[tuple[int, int, int]]) -> float:
    """Mean of per-order F1 x 100.

    Orders where neither side has any n-gram carry no information and are
    excluded from the mean (this keeps the score symmetric in its operands).
    A pair of empty texts scores 100 (identical).
    """
    f_scores = []
    for matched, hyp_total, ref_total in stats:
        if hyp_total == 0 and ref_total == 0:
            continue
        p = matched / hyp_total if hyp_total else 0.0
        r = matched / ref_total if ref_total else 0.0
        f = 2.0 * p * r / (p + r) if p + r > 0 else 0.0
        f_scores.append(f)
    if not f_scores:
        return 100.0
    return 100.0 * sum(f_scores) / len(f_scores)


def chrf1(hypothesis: Corpus, reference: Corpus) -> tuple[MetricScore, list[float]]:
    """Corpus-level chrF1 plus per-segment scores.

    The corpus score aggregates n-gram counts over all segments before
    computing precision/recall, rather than averaging segment scores.
    """
    if len(hypothesis) != len(reference):
        raise ValueError(
            f"segment count mismatch: {len(hypothesis)} vs {len(reference)}")
    totals = [(0, 0, 0)] * len(CHRF_ORDERS)
    segment_scores = []
    for hyp_seg, ref_seg in zip(hypothesis, reference):
        stats = _chrf_segment_stats(hyp_seg, ref_seg)
        segment_scores.append(_chrf_from_stats(stats))
        totals = [(tm + m, th + h, tr + r)
                  for (tm, th, tr), (m, h, r) in zip(totals, stats)]
    corpus = MetricScore(_chrf_from_stats(totals), scale="0-100", level="corpus")
    return corpus, segment_scores


def chrf1_stats(hypothesis: Corpus, reference: Corpus) -> list[list[tuple[int, int, int]]]:
    """Per-segment chrF sufficient statistics (for resampling without rescoring)."""
    if len(hypothesis) != len(reference):
        raise ValueError(
            f"segment count mismatch: {len(hypothesis)} vs {len(reference)}")
    return [_chrf_segment_stats(h, r) for h, r in zip(hypothesis, reference)]


def chrf1_from_stats(stats_sum: list[tuple[int, int, int]]) -> float:
    """chrF1 from summed per-segment sufficient statistics."""
    return _chrf_from_stats(stats_sum)


def wer_align(hyp: Segment, ref: Segment) -> tuple[EditScript, MetricScore]:
    """Levenshtein alignment with unit costs and a WER score.

    Backtrace ties are broken in the order match > substitution > deletion
    > insertion, so the edit script is deterministic.  WER divides by the
    reference length (min 1), so it can exceed 1 for long hypotheses.
    """
    m, n = len(hyp), len(ref)
    dist = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        dist[i][0] = i
    for j in range(1, n + 1):
        dist[0][j] = j
    for i in range(1, m + 1):
        hyp_tok = hyp.tokens[i - 1]
        for j in range(1, n + 1):
            cost = 0 if hyp_tok == ref.tokens[j - 1] else 1
            dist[i][j] = min(dist[i - 1][j - 1] + cost,
                             dist[i][j - 1] + 1,   # deletion (ref token unmatched)
                             dist[i - 1][j] + 1)   # insertion (hyp token extra)
    hyp_labels: list[str] = []
    ref_labels: list[str] = []
    i, j = m, n
    while i > 0 or j > 0:
        here = dist[i][j]
        if i > 0 and j > 0 and hyp.tokens[i - 1] == ref.tokens[j - 1] \
                and here == dist[i - 1][j - 1]:
            hyp_labels.append(MATCH)
            ref_labels.append(MATCH)
            i, j = i - 1, j - 1
        elif i > 0 and j > 0 and here == dist[i - 1][j - 1] + 1:
            hyp_labels.append(SUBSTITUTION)
            ref_labels.append(SUBSTITUTION)
            i, j = i - 1, j - 1
        elif j > 0 and here == dist[i][j - 1] + 1:
            ref_labels.append(DELETION)
            j -= 1
        else:
            hyp_labels.append(INSERTION)
            i -= 1
    script = EditScript(tuple(reversed(hyp_labels)),
                        tuple(reversed(ref_labels)),
                        dist[m][n])
    wer = MetricScore(dist[m][n] / max(1, n), scale="0-1", level="segment")
    return script, wer


def per_errors(hyp: Segment, ref: Segment) -> tuple[tuple[bool, ...], tuple[bool, ...]]:
    """Position-independent error flags (hPER on the hypothesis side, rPER on
    the reference side).

    Bag-of-words matching with multiplicity: tokens are consumed left to
    right, each token pairing with at most one identical token on the other
    side.  Unconsumed tokens are flagged.
    """
    def flag(side: Segment, other: Segment) -> tuple[bool, ...]:
        pool = Counter(other.tokens)
        flags = []
        for tok in side.tokens:
            if pool[tok] > 0:
                pool[tok] -= 1
                flags.append(False)
            else:
                flags.append(True)
        return tuple(flags)

    return flag(hyp, ref), flag(ref, hyp)


def _token_ngrams(seg: Segment, n: int) -> Counter:
    toks = seg.tokens
    return Counter(tuple(toks[i:i + n]) for i in range(len(toks) - n + 1))


def bleu(hypothesis: Corpus, reference: Corpus) -> BleuResult:
    """Corpus BLEU: geometric mean of modified n-gram precisions (n=1..4)
    with the exponential brevity penalty, unsmoothed and case-sensitive.

    Any order with zero matches makes the score 0 and sets ``degenerate``.
    """
    if len(hypothesis) != len(reference):
        raise ValueError(
            f"segment count mismatch: {len(hypothesis)} vs {len(reference)}")
    matched = [0] * len(BLEU_ORDERS)
    total = [0] * len(BLEU_ORDERS)
    hyp_len = 0
    ref_len = 0
    for hyp_seg, ref_seg in zip(hypothesis, reference):
        hyp_len += len(hyp_seg)
        ref_len += len(ref_seg)
        for k, n in enumerate(BLEU_ORDERS):
            h = _token_ngrams(hyp_seg, n)
            r = _token_ngrams(ref_seg, n)
            matched[k] += sum((h & r).values())
            total[k] += sum(h.values())
    precisions = tuple(m / t if t else 0.0 for m, t in zip(matched, total))
    if hyp_len == 0:
        bp = 0.0
    elif hyp_len < ref_len:
        bp = math.exp(1.0 - ref_len / hyp_len)
    else:
        bp = 1.0
    degenerate = any(p == 0.0 for p in precisions)
    if degenerate or bp == 0.0:
        value = 0.0
    else:
        value = 100.0 * bp * math.exp(sum(math.log(p) for p in precisions)
                                      / len(precisions))
    return BleuResult(MetricScore(value, scale="0-100", level="corpus"),
                      precisions, bp, hyp_len, ref_len, degenerate)


def bleu_stats(hypothesis: Corpus, reference: Corpus) -> list[tuple[int, ...]]:
    """Per-segment BLEU sufficient statistics:
    (matched_1..4, total_1..4, hyp_len, ref_len)."""
    if len(hypothesis) != len(reference):
        raise ValueError(
            f"segment count mismatch: {len(hypothesis)} vs {len(reference)}")
    out = []
    for hyp_seg, ref_seg in zip(hypothesis, reference):
        matched = []
        total = []
        for n in BLEU_ORDERS:
            h = _token_ngrams(hyp_seg, n)
            r = _token_ngrams(ref_seg, n)
            matched.append(sum((h & r).values()))
            total.append(sum(h.values()))
        out.append(tuple(matched) + tuple(total) + (len(hyp_seg), len(ref_seg)))
    return out


def bleu_from_stats(stats_sum) -> float:
    """Corpus BLEU from summed per-segment sufficient statistics."""
    k = len(BLEU_ORDERS)
    matched = stats_sum[:k]
    total = stats_sum[k:2 * k]
    hyp_len, ref_len = stats_sum[2 * k], stats_sum[2 * k + 1]
    precisions = [m / t if t else 0.0 for m, t in zip(matched, total)]
    if hyp_len == 0:
        return 0.0
    bp = math.exp(1.0 - ref_len / hyp_len) if hyp_len < ref_len else 1.0
    if any(p == 0.0 for p in precisions):
        return 0.0
    return 100.0 * bp * math.exp(sum(math.log(p) for p in precisions) / k)
