"""Shared statistics: paired bootstrap resampling, Pearson correlation and
sentence-length bucketing / quality curves."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .corpus import Corpus, EvalBundle
from .metrics import chrf1_from_stats, chrf1_stats


@dataclass(frozen=True)
class BootstrapResult:
    wins_a: int
    wins_b: int
    ties: int
    iterations: int
    p_value: float
    significant: bool
    alpha: float


def _bootstrap_indices(n_segments: int, iterations: int, seed: int) -> np.ndarray:
    """All resample index draws up front, from one seeded 64-bit generator,
    so runs are bit-reproducible and parallel-safe."""
    rng = np.random.default_rng(seed)
    return rng.integers(0, n_segments, size=(iterations, n_segments))


def _tally(scores_a: Sequence[float], scores_b: Sequence[float],
           iterations: int, alpha: float) -> BootstrapResult:
    wins_a = sum(1 for a, b in zip(scores_a, scores_b) if a > b)
    wins_b = sum(1 for a, b in zip(scores_a, scores_b) if b > a)
    ties = iterations - wins_a - wins_b
    p_value = 1.0 - max(wins_a, wins_b) / iterations
    return BootstrapResult(wins_a, wins_b, ties, iterations, p_value,
                           p_value < alpha, alpha)


def paired_bootstrap(score_fn: Callable[[Corpus, Corpus], float],
                     sys_a: Corpus, sys_b: Corpus, ref: Corpus,
                     iterations: int = 1000, alpha: float = 0.05,
                     seed: int = 42) -> BootstrapResult:
    """Paired bootstrap resampling over test-set segments.

    Each iteration resamples segment indices with replacement, scores both
    systems on the resample with ``score_fn(hyp, ref)`` and records the
    winner.  ``p_value = 1 - max(wins) / iterations``; significant iff
    ``p_value < alpha``.
    """
    if not (len(sys_a) == len(sys_b) == len(ref)):
        raise ValueError("corpora must have equal segment counts")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    indices = _bootstrap_indices(len(ref), iterations, seed)
    scores_a = []
    scores_b = []
    for row in indices:
        idx = row.tolist()
        ref_sample = ref.subset(idx)
        scores_a.append(score_fn(sys_a.subset(idx), ref_sample))
        scores_b.append(score_fn(sys_b.subset(idx), ref_sample))
    return _tally(scores_a, scores_b, iterations, alpha)


def paired_bootstrap_values(per_segment_a: Sequence[float],
                            per_segment_b: Sequence[float],
                            iterations: int = 1000, alpha: float = 0.05,
                            seed: int = 42) -> BootstrapResult:
    """Bootstrap where each system's resample score is the mean of
    precomputed per-segment values (same index draws as paired_bootstrap)."""
    if len(per_segment_a) != len(per_segment_b):
        raise ValueError("per-segment value lists must have equal length")
    a = np.asarray(per_segment_a, dtype=float)
    b = np.asarray(per_segment_b, dtype=float)
    indices = _bootstrap_indices(len(a), iterations, seed)
    scores_a = a[indices].mean(axis=1)
    scores_b = b[indices].mean(axis=1)
    return _tally(scores_a.tolist(), scores_b.tolist(), iterations, alpha)


def paired_bootstrap_stats(stats_a: Sequence[Sequence[float]],
                           stats_b: Sequence[Sequence[float]],
                           score_from_sums: Callable[[np.ndarray], float],
                           iterations: int = 1000, alpha: float = 0.05,
                           seed: int = 42) -> BootstrapResult:
    """Bootstrap over per-segment sufficient statistics: each resample sums
    the stat rows and scores the sums, avoiding rescoring from raw text."""
    a = np.asarray(stats_a, dtype=float)
    b = np.asarray(stats_b, dtype=float)
    if a.shape[0] != b.shape[0]:
        raise ValueError("stat matrices must have equal row counts")
    indices = _bootstrap_indices(a.shape[0], iterations, seed)
    scores_a = [score_from_sums(a[row].sum(axis=0)) for row in indices]
    scores_b = [score_from_sums(b[row].sum(axis=0)) for row in indices]
    return _tally(scores_a, scores_b, iterations, alpha)


def pearson(xs: Sequence[float], ys: Sequence[float]) -> Optional[float]:
    """Sample Pearson correlation; None (N/A) for constant input."""
    if len(xs) != len(ys):
        raise ValueError("sequences must have equal length")
    if len(xs) < 2:
        raise ValueError("need at least 2 points")
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    dx = x - x.mean()
    dy = y - y.mean()
    denom = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if denom == 0.0:
        return None
    return float(dx @ dy) / denom


@dataclass(frozen=True)
class LengthBucket:
    lo: int
    hi: Optional[int]  # None = unbounded (the > cap bucket)
    indices: tuple[int, ...]
    mean_length: Optional[float]  # None when empty

    @property
    def label(self) -> str:
        return f"{self.lo}-{self.hi}" if self.hi is not None else f">{self.lo - 1}"

    @property
    def empty(self) -> bool:
        return not self.indices


def bucket_by_length(source: Corpus, width: int = 5,
                     cap: int = 50) -> list[LengthBucket]:
    """Partition segments by source token count into [1,5], [6,10], ...,
    [46,50], (>50).  Zero-token segments fall into the first bucket; empty
    buckets are retained (flagged via ``empty``)."""
    if width < 1:
        raise ValueError("width must be >= 1")
    ranges: list[tuple[int, Optional[int]]] = []
    lo = 1
    while lo <= cap:
        ranges.append((lo, lo + width - 1))
        lo += width
    ranges.append((cap + 1, None))
    members: list[list[int]] = [[] for _ in ranges]
    lengths: list[list[int]] = [[] for _ in ranges]
    for idx, seg in enumerate(source):
        n = len(seg)
        b = len(ranges) - 1
        for k, (b_lo, b_hi) in enumerate(ranges[:-1]):
            if n <= b_hi:
                b = k
                break
        members[b].append(idx)
        lengths[b].append(n)
    buckets = []
    for (lo, hi), idxs, lens in zip(ranges, members, lengths):
        mean = sum(lens) / len(lens) if lens else None
        buckets.append(LengthBucket(lo, hi, tuple(idxs), mean))
    return buckets


@dataclass(frozen=True)
class LengthCurvePoint:
    label: str
    mean_length: float
    chrf_nmt: float
    chrf_pbmt: float
    relative_improvement: float  # (chrF_NMT - chrF_PBMT) / chrF_PBMT * 100


@dataclass(frozen=True)
class LengthCurve:
    points: tuple[LengthCurvePoint, ...]  # nonempty buckets only, in order
    empty_bucket_labels: tuple[str, ...]
    correlation: Optional[float]  # Pearson r over (mean length, improvement)


def length_curve(bundle: EvalBundle, nmt_id: str, pbmt_id: str,
                 width: int = 5, cap: int = 50) -> LengthCurve:
    """Bucketed chrF1 comparison of one NMT and one PBMT system.

    Bucket scores are corpus-level chrF1 over the bucket's segments; the
    correlation uses each nonempty bucket's mean source length as x.
    """
    nmt = bundle.system(nmt_id).corpus
    pbmt = bundle.system(pbmt_id).corpus
    nmt_stats = chrf1_stats(nmt, bundle.reference)
    pbmt_stats = chrf1_stats(pbmt, bundle.reference)
    buckets = bucket_by_length(bundle.source, width=width, cap=cap)
    points = []
    empty_labels = []
    for bucket in buckets:
        if bucket.empty:
            empty_labels.append(bucket.label)
            continue
        score_n = chrf1_from_stats(_sum_stats(nmt_stats, bucket.indices))
        score_p = chrf1_from_stats(_sum_stats(pbmt_stats, bucket.indices))
        if score_p == 0.0:
            continue  # improvement undefined on this bucket
        improvement = (score_n - score_p) / score_p * 100.0
        points.append(LengthCurvePoint(bucket.label, bucket.mean_length,
                                       score_n, score_p, improvement))
    correlation = None
    if len(points) >= 2:
        correlation = pearson([p.mean_length for p in points],
                              [p.relative_improvement for p in points])
    return LengthCurve(tuple(points), tuple(empty_labels), correlation)


def average_improvement_curve(curves: Sequence[LengthCurve]) -> LengthCurve:
    """Macro-average of several per-direction curves: improvements and mean
    lengths averaged per bucket label over the curves that have that bucket."""
    by_label: dict[str, list[LengthCurvePoint]] = {}
    order: list[str] = []
    for curve in curves:
        for point in curve.points:
            if point.label not in by_label:
                by_label[point.label] = []
                order.append(point.label)
            by_label[point.label].append(point)
    points = []
    for label in order:
        group = by_label[label]
        k = len(group)
        points.append(LengthCurvePoint(
            label,
            sum(p.mean_length for p in group) / k,
            sum(p.chrf_nmt for p in group) / k,
            sum(p.chrf_pbmt for p in group) / k,
            sum(p.relative_improvement for p in group) / k))
    correlation = None
    if len(points) >= 2:
        correlation = pearson([p.mean_length for p in points],
                              [p.relative_improvement for p in points])
    return LengthCurve(tuple(points), (), correlation)


def _sum_stats(per_segment: list[list[tuple[int, int, int]]],
               indices: tuple[int, ...]) -> list[tuple[int, int, int]]:
    n_orders = len(per_segment[0])
    totals = [(0, 0, 0)] * n_orders
    for i in indices:
        totals = [(tm + m, th + h, tr + r)
                  for (tm, th, tr), (m, h, r) in zip(totals, per_segment[i])]
    return totals
