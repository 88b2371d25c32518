"""Input loading and the evaluation bundle.

All texts are pre-tokenized, UTF-8, one segment per line, tokens separated
by single spaces.  Word alignments use the Pharaoh "i-j" convention with
0-based indices.  The toolkit never tokenizes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterator, Optional


class InputError(ValueError):
    """Malformed or inconsistent input file."""


class Paradigm(str, Enum):
    NMT = "NMT"
    PBMT = "PBMT"


@dataclass(frozen=True)
class Segment:
    tokens: tuple[str, ...]

    def __post_init__(self) -> None:
        for tok in self.tokens:
            if any(ch.isspace() for ch in tok):
                raise InputError(f"token contains whitespace: {tok!r}")

    def __len__(self) -> int:
        return len(self.tokens)

    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class Corpus:
    name: str
    segments: tuple[Segment, ...]

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self) -> Iterator[Segment]:
        return iter(self.segments)

    def __getitem__(self, i: int) -> Segment:
        return self.segments[i]

    def subset(self, indices, name: Optional[str] = None) -> "Corpus":
        """Corpus restricted to the given segment indices, in the given order."""
        return Corpus(name or self.name,
                      tuple(self.segments[i] for i in indices))

    def to_text(self) -> str:
        return "".join(seg.text() + "\n" for seg in self.segments)


@dataclass(frozen=True)
class SystemOutput:
    corpus: Corpus
    system_id: str
    paradigm: Paradigm


@dataclass(frozen=True)
class AlignmentSet:
    """Per-segment sets of (source index, target index) links."""

    links: tuple[frozenset[tuple[int, int]], ...]

    def __len__(self) -> int:
        return len(self.links)

    def to_text(self) -> str:
        lines = []
        for seg_links in self.links:
            pairs = sorted(seg_links)
            lines.append(" ".join(f"{i}-{j}" for i, j in pairs))
        return "".join(line + "\n" for line in lines)


@dataclass(frozen=True)
class EvalBundle:
    source: Corpus
    reference: Corpus
    systems: tuple[SystemOutput, ...]
    # keys: system_id or "reference"
    alignments: dict[str, AlignmentSet] = field(default_factory=dict)
    # keys: corpus name (reference name or system_id)
    stems: dict[str, Corpus] = field(default_factory=dict)
    # keys: corpus name; values: per-segment log-prob tuples
    lm_scores: dict[str, tuple[tuple[float, ...], ...]] = field(default_factory=dict)

    def system(self, system_id: str) -> SystemOutput:
        for sys in self.systems:
            if sys.system_id == system_id:
                return sys
        raise KeyError(system_id)

    def corpus_by_name(self, name: str) -> Corpus:
        if name == self.source.name:
            return self.source
        if name == self.reference.name:
            return self.reference
        for sys in self.systems:
            if sys.system_id == name or sys.corpus.name == name:
                return sys.corpus
        raise KeyError(name)


def _decode_lines(path: Path) -> list[str]:
    raw = path.read_bytes()
    if raw.endswith(b"\n"):
        raw = raw[:-1]
    lines = []
    for lineno, chunk in enumerate(raw.split(b"\n"), start=1):
        try:
            lines.append(chunk.decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise InputError(f"{path}: invalid UTF-8 on line {lineno}: {exc}") from None
    return lines


def load_corpus(path: str | Path, name: str) -> Corpus:
    """Load one segment per line; a trailing newline adds no segment."""
    path = Path(path)
    segments = tuple(Segment(tuple(line.split())) for line in _decode_lines(path))
    return Corpus(name, segments)


def load_alignments(path: str | Path, source: Corpus, target: Corpus) -> AlignmentSet:
    """Parse Pharaoh "i-j" alignment links, validated against both corpora.

    Duplicate links on a line are collapsed; an empty line means no links
    for that segment.
    """
    path = Path(path)
    lines = _decode_lines(path)
    if len(lines) != len(source):
        raise InputError(
            f"{path}: {len(lines)} alignment lines for {len(source)} segments")
    if len(source) != len(target):
        raise InputError(
            f"source has {len(source)} segments but target has {len(target)}")
    per_segment = []
    for seg_idx, line in enumerate(lines):
        seg_links = set()
        for pair in line.split():
            try:
                left, right = pair.split("-")
                i, j = int(left), int(right)
            except ValueError:
                raise InputError(
                    f"{path}: segment {seg_idx}: malformed link {pair!r}") from None
            if not (0 <= i < len(source[seg_idx])):
                raise InputError(
                    f"{path}: segment {seg_idx}: link {pair} source index out of "
                    f"range (length {len(source[seg_idx])})")
            if not (0 <= j < len(target[seg_idx])):
                raise InputError(
                    f"{path}: segment {seg_idx}: link {pair} target index out of "
                    f"range (length {len(target[seg_idx])})")
            seg_links.add((i, j))
        per_segment.append(frozenset(seg_links))
    return AlignmentSet(tuple(per_segment))


def bind_stems(bundle: EvalBundle, corpus_name: str, stems: Corpus) -> EvalBundle:
    """Attach a token-parallel stem corpus; the original tokens are untouched."""
    corpus = bundle.corpus_by_name(corpus_name)
    if len(stems) != len(corpus):
        raise InputError(
            f"stems for {corpus_name!r}: {len(stems)} segments vs {len(corpus)}")
    for seg_idx, (seg, stem_seg) in enumerate(zip(corpus, stems)):
        if len(seg) != len(stem_seg):
            raise InputError(
                f"stems for {corpus_name!r}: segment {seg_idx} has "
                f"{len(stem_seg)} stems for {len(seg)} tokens")
    new_stems = dict(bundle.stems)
    new_stems[corpus_name] = stems
    return replace(bundle, stems=new_stems)


def validate_bundle(bundle: EvalBundle, analyses: tuple[str, ...] = ()) -> list[str]:
    """Return a list of violations; an empty list means the bundle is runnable.

    Never mutates the bundle.
    """
    violations = []
    n_ref = len(bundle.reference)
    if n_ref == 0:
        violations.append("reference corpus is empty")
    if len(bundle.source) != n_ref:
        violations.append(
            f"source has {len(bundle.source)} segments vs reference {n_ref}")
    for sys in bundle.systems:
        if len(sys.corpus) != n_ref:
            violations.append(
                f"system {sys.system_id!r} has {len(sys.corpus)} segments "
                f"vs reference {n_ref}")
    for seg_idx, seg in enumerate(bundle.reference):
        if len(seg) == 0:
            violations.append(f"reference segment {seg_idx} is empty")
    for name, aln in bundle.alignments.items():
        if len(aln) != len(bundle.source):
            violations.append(
                f"alignments for {name!r} cover {len(aln)} segments "
                f"vs source {len(bundle.source)}")
    for name, stems in bundle.stems.items():
        try:
            corpus = bundle.corpus_by_name(name)
        except KeyError:
            violations.append(f"stems bound to unknown corpus {name!r}")
            continue
        if len(stems) != len(corpus):
            violations.append(
                f"stems for {name!r} have {len(stems)} segments vs {len(corpus)}")
    if "reordering" in analyses or "reorder" in analyses:
        needed = ["reference"] + [sys.system_id for sys in bundle.systems]
        missing = [name for name in needed if name not in bundle.alignments]
        if missing:
            violations.append(
                "alignments required for reordering analysis; missing: "
                + ", ".join(missing))
    return violations
