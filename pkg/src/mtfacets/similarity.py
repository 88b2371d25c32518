"""Pairwise output similarity between systems via corpus-level chrF1."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .corpus import Paradigm, SystemOutput
from .metrics import chrf1


@dataclass(frozen=True)
class OverlapMatrix:
    system_ids: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]  # diagonal is 100 by definition

    def value(self, i: int, j: int) -> float:
        return self.values[i][j]


@dataclass(frozen=True)
class GroupAverages:
    """Unweighted means over unordered distinct system pairs.

    A group with no pairs is reported as None (absent), never as zero.
    """
    nmt_nmt: Optional[float]
    pbmt_pbmt: Optional[float]
    cross: Optional[float]


def pairwise_overlap(systems: list[SystemOutput]) -> OverlapMatrix:
    """Overlap matrix: entry (i, j) is corpus chrF1 of system i scored
    against system j as reference."""
    if len(systems) < 2:
        raise ValueError("pairwise overlap needs at least 2 systems")
    n_segments = {len(sys.corpus) for sys in systems}
    if len(n_segments) != 1:
        raise ValueError(f"systems have differing segment counts: {n_segments}")
    k = len(systems)
    rows = []
    for i in range(k):
        row = []
        for j in range(k):
            if i == j:
                row.append(100.0)
            else:
                score, _ = chrf1(systems[i].corpus, systems[j].corpus)
                row.append(score.value)
        rows.append(tuple(row))
    return OverlapMatrix(tuple(sys.system_id for sys in systems), tuple(rows))


def group_averages(matrix: OverlapMatrix,
                   paradigms: list[Paradigm]) -> GroupAverages:
    if len(paradigms) != len(matrix.system_ids):
        raise ValueError("one paradigm label per system required")
    groups: dict[str, list[float]] = {"nmt": [], "pbmt": [], "cross": []}
    for i, j in combinations(range(len(paradigms)), 2):
        value = matrix.value(i, j)
        if paradigms[i] == paradigms[j]:
            key = "nmt" if paradigms[i] == Paradigm.NMT else "pbmt"
        else:
            key = "cross"
        groups[key].append(value)

    def mean(values: list[float]) -> Optional[float]:
        return sum(values) / len(values) if values else None

    return GroupAverages(mean(groups["nmt"]), mean(groups["pbmt"]),
                         mean(groups["cross"]))
