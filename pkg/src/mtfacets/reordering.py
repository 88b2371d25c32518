"""Reordering analysis: word alignments -> permutations -> Kendall's tau."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .corpus import EvalBundle
from .stats import BootstrapResult, paired_bootstrap_values

Permutation = tuple[int, ...]


def alignment_to_permutation(links: frozenset[tuple[int, int]],
                             src_len: int) -> Permutation:
    """Source-position ranks under the target order implied by the alignment.

    Each source position takes its minimum aligned target index as sort key;
    unaligned positions inherit the key of the nearest preceding aligned
    position (-1 if none).  Ranks come from a stable sort by (key, source
    index), so the result is always a bijection on 0..src_len-1.
    """
    min_target: dict[int, int] = {}
    for i, j in links:
        if i not in min_target or j < min_target[i]:
            min_target[i] = j
    keys = []
    last_key = -1
    for i in range(src_len):
        if i in min_target:
            last_key = min_target[i]
        keys.append(last_key)
    order = sorted(range(src_len), key=lambda i: (keys[i], i))
    perm = [0] * src_len
    for rank, i in enumerate(order):
        perm[i] = rank
    return tuple(perm)


def kendall_similarity(p: Permutation) -> float:
    """1 minus the fraction of discordant position pairs versus monotone
    order; 1.0 for length <= 1."""
    n = len(p)
    if n <= 1:
        return 1.0
    discordant = _count_inversions(list(p))
    return 1.0 - discordant / (n * (n - 1) / 2)


def relative_kendall(a: Permutation, b: Permutation) -> float:
    """1 minus the fraction of position pairs on which the two permutations
    disagree about relative order."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    n = len(a)
    if n <= 1:
        return 1.0
    # relabel positions by b's order; discordances of a in that frame are
    # exactly the pairs the two orders disagree on
    by_b = sorted(range(n), key=lambda i: b[i])
    relabeled = [a[i] for i in by_b]
    discordant = _count_inversions(relabeled)
    return 1.0 - discordant / (n * (n - 1) / 2)


def _count_inversions(values: list[int]) -> int:
    """Merge-sort inversion count; O(n log n)."""
    if len(values) <= 1:
        return 0
    mid = len(values) // 2
    left, right = values[:mid], values[mid:]
    count = _count_inversions(left) + _count_inversions(right)
    merged = []
    i = j = 0
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            merged.append(left[i])
            i += 1
        else:
            count += len(left) - i
            merged.append(right[j])
            j += 1
    merged.extend(left[i:])
    merged.extend(right[j:])
    values[:] = merged
    return count


@dataclass(frozen=True)
class ReorderingRow:
    system_id: str
    vs_monotone: float
    vs_reference: Optional[float]  # None for the reference row itself


@dataclass(frozen=True)
class ReorderingReport:
    rows: tuple[ReorderingRow, ...]  # systems first, reference last
    # (system_a, system_b) -> bootstrap over per-segment vs-reference values
    significance: dict[tuple[str, str], BootstrapResult]


def system_permutations(bundle: EvalBundle, name: str) -> list[Permutation]:
    """Per-segment permutations for one aligned corpus ('reference' or a
    system id)."""
    if name not in bundle.alignments:
        raise ValueError(f"no alignments for {name!r}")
    alignment = bundle.alignments[name]
    return [alignment_to_permutation(links, len(seg))
            for links, seg in zip(alignment.links, bundle.source)]


def reordering_report(bundle: EvalBundle, iterations: int = 1000,
                      alpha: float = 0.05, seed: int = 42) -> ReorderingReport:
    """Macro-averaged Kendall similarities versus monotone order and versus
    the reference permutation, with paired-bootstrap significance of the
    vs-reference differences between each pair of systems."""
    ref_perms = system_permutations(bundle, "reference")
    rows = []
    vs_ref_per_segment: dict[str, list[float]] = {}
    for sys in bundle.systems:
        perms = system_permutations(bundle, sys.system_id)
        monotone = [kendall_similarity(p) for p in perms]
        vs_ref = [relative_kendall(p, r) for p, r in zip(perms, ref_perms)]
        vs_ref_per_segment[sys.system_id] = vs_ref
        rows.append(ReorderingRow(sys.system_id,
                                  sum(monotone) / len(monotone),
                                  sum(vs_ref) / len(vs_ref)))
    ref_monotone = [kendall_similarity(p) for p in ref_perms]
    rows.append(ReorderingRow("reference",
                              sum(ref_monotone) / len(ref_monotone), None))
    significance = {}
    ids = [sys.system_id for sys in bundle.systems]
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            significance[(ids[i], ids[j])] = paired_bootstrap_values(
                vs_ref_per_segment[ids[i]], vs_ref_per_segment[ids[j]],
                iterations=iterations, alpha=alpha, seed=seed)
    return ReorderingReport(tuple(rows), significance)
