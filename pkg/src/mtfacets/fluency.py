"""Fluency as language-model perplexity.

Two score sources are supported: a built-in interpolated Kneser-Ney n-gram
model trained on user-supplied text, and per-token log-probability files
produced by any external model.  All log-probabilities are natural logs;
each segment is scored left to right with sentence-start padding, the
sentence-end token is scored and sentence-start tokens are not.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .corpus import Corpus, EvalBundle, InputError, Paradigm

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

MODEL_FORMAT_VERSION = 1

TokenLogProbs = tuple[tuple[float, ...], ...]


@dataclass
class NGramLM:
    """Interpolated Kneser-Ney n-gram model with a fixed absolute discount.

    ``counts[k]`` maps k-gram tuples to raw counts taken over padded
    training sentences; lower-order continuation counts are derived from
    them on the fly at build time.  Grams ending in the start marker are
    never stored, so every context total sums over predictable words only
    and conditional distributions sum to 1.
    """

    order: int
    discount: float
    vocab: frozenset[str]  # surface tokens kept after the frequency cap
    counts: dict[int, dict[tuple[str, ...], int]]
    # derived tables, built by _finalize
    _tables: dict[int, dict[tuple[str, ...], float]] = field(default_factory=dict)
    _context_totals: dict[int, dict[tuple[str, ...], float]] = field(default_factory=dict)
    _context_types: dict[int, dict[tuple[str, ...], int]] = field(default_factory=dict)

    @property
    def prediction_vocab_size(self) -> int:
        return len(self.vocab) + 2  # UNK and EOS; BOS is never predicted

    def _finalize(self) -> None:
        tables: dict[int, dict[tuple[str, ...], float]] = {}
        tables[self.order] = {g: float(c) for g, c in self.counts[self.order].items()}
        for k in range(self.order - 1, 0, -1):
            table: dict[tuple[str, ...], float] = {}
            # continuation counts: number of distinct left extensions
            for gram in self.counts[k + 1]:
                suffix = gram[1:]
                if suffix[0] == BOS:
                    continue
                table[suffix] = table.get(suffix, 0.0) + 1.0
            # grams starting with the sentence-start marker keep raw counts
            for gram, c in self.counts[k].items():
                if gram[0] == BOS:
                    table[gram] = float(c)
            tables[k] = table
        totals: dict[int, dict[tuple[str, ...], float]] = {}
        types: dict[int, dict[tuple[str, ...], int]] = {}
        for k, table in tables.items():
            tot: dict[tuple[str, ...], float] = {}
            typ: dict[tuple[str, ...], int] = {}
            for gram, c in table.items():
                ctx = gram[:-1]
                tot[ctx] = tot.get(ctx, 0.0) + c
                typ[ctx] = typ.get(ctx, 0) + 1
            totals[k] = tot
            types[k] = typ
        self._tables = tables
        self._context_totals = totals
        self._context_types = types

    def map_token(self, token: str) -> str:
        return token if token in self.vocab else UNK

    def prob(self, word: str, context: tuple[str, ...]) -> float:
        """p(word | context); word must already be vocabulary-mapped."""
        if not self._tables:
            self._finalize()
        return self._prob(word, context[-(self.order - 1):] if self.order > 1 else ())

    def _prob(self, word: str, context: tuple[str, ...]) -> float:
        level = len(context) + 1
        total = self._context_totals[level].get(context, 0.0)
        if total == 0.0:
            if level == 1:
                return 1.0 / self.prediction_vocab_size
            return self._prob(word, context[1:])
        d = self.discount
        count = self._tables[level].get(context + (word,), 0.0)
        n_types = self._context_types[level][context]
        backoff_mass = d * n_types / total
        if level == 1:
            lower = 1.0 / self.prediction_vocab_size
        else:
            lower = self._prob(word, context[1:])
        return max(count - d, 0.0) / total + backoff_mass * lower

    def logprob(self, word: str, context: tuple[str, ...]) -> float:
        return math.log(self.prob(word, context))

    # -- serialization (versioned text format) -------------------------------

    def to_json(self) -> str:
        payload = {
            "format_version": MODEL_FORMAT_VERSION,
            "order": self.order,
            "discount": self.discount,
            "vocab": sorted(self.vocab),
            "counts": {
                str(k): {" ".join(gram): c for gram, c in sorted(table.items())}
                for k, table in self.counts.items()
            },
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "NGramLM":
        payload = json.loads(text)
        if payload.get("format_version") != MODEL_FORMAT_VERSION:
            raise InputError(
                f"unsupported model format version {payload.get('format_version')}")
        counts = {
            int(k): {tuple(g.split(" ")): c for g, c in table.items()}
            for k, table in payload["counts"].items()
        }
        return cls(order=payload["order"], discount=payload["discount"],
                   vocab=frozenset(payload["vocab"]), counts=counts)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "NGramLM":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def train_ngram_lm(training: Corpus, order: int = 3,
                   vocab_cap: int = 50000, discount: float = 0.75) -> NGramLM:
    """Train a Kneser-Ney model; deterministic for identical input.

    The vocabulary keeps the ``vocab_cap`` most frequent training tokens
    (ties broken alphabetically); everything else becomes UNK before
    counting.
    """
    if len(training) == 0:
        raise ValueError("training corpus is empty")
    if order < 1:
        raise ValueError("order must be >= 1")
    freq: dict[str, int] = {}
    for seg in training:
        for tok in seg.tokens:
            freq[tok] = freq.get(tok, 0) + 1
    ranked = sorted(freq.items(), key=lambda kv: (-kv[1], kv[0]))
    vocab = frozenset(tok for tok, _ in ranked[:vocab_cap])
    counts: dict[int, dict[tuple[str, ...], int]] = {k: {} for k in range(1, order + 1)}
    for seg in training:
        mapped = [tok if tok in vocab else UNK for tok in seg.tokens]
        padded = [BOS] * (order - 1) + mapped + [EOS]
        for k in range(1, order + 1):
            table = counts[k]
            for i in range(len(padded) - k + 1):
                gram = tuple(padded[i:i + k])
                if gram[-1] == BOS:
                    continue
                table[gram] = table.get(gram, 0) + 1
    return NGramLM(order=order, discount=discount, vocab=vocab, counts=counts)


def score_corpus(lm: NGramLM, text: Corpus) -> TokenLogProbs:
    """Per-token natural-log probabilities; one extra entry per segment for
    the scored sentence-end."""
    scored = []
    for seg in text:
        context = (BOS,) * (lm.order - 1)
        seg_scores = []
        for tok in list(seg.tokens) + [EOS]:
            word = lm.map_token(tok) if tok != EOS else EOS
            seg_scores.append(lm.logprob(word, context))
            context = (context + (word,))[1:] if lm.order > 1 else ()
        scored.append(tuple(seg_scores))
    return tuple(scored)


def perplexity(scores: TokenLogProbs) -> float:
    """exp of the negative mean log-probability over all scored tokens."""
    total = 0.0
    count = 0
    for seg_scores in scores:
        total += sum(seg_scores)
        count += len(seg_scores)
    if count == 0:
        raise ValueError("no scored tokens")
    return math.exp(-total / count)


def load_external_scores(path: str | Path, text: Corpus) -> TokenLogProbs:
    """Load per-token natural-log probabilities, one line per segment,
    ``tokens + 1`` values per line (sentence-end included)."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) != len(text):
        raise InputError(
            f"{path}: {len(lines)} score lines for {len(text)} segments")
    scored = []
    for seg_idx, (line, seg) in enumerate(zip(lines, text)):
        try:
            values = tuple(float(v) for v in line.split())
        except ValueError:
            raise InputError(f"{path}: segment {seg_idx}: non-numeric score") from None
        expected = len(seg) + 1
        if len(values) != expected:
            raise InputError(
                f"{path}: segment {seg_idx}: {len(values)} scores for "
                f"{expected} scored tokens")
        for pos, v in enumerate(values):
            if v > 0:
                raise InputError(
                    f"{path}: segment {seg_idx}, value {pos}: log-probability "
                    f"{v} > 0 implies probability > 1")
        scored.append(values)
    return tuple(scored)


@dataclass(frozen=True)
class FluencyReport:
    perplexities: dict[str, float]  # system_id -> perplexity
    nmt_id: Optional[str]
    pbmt_id: Optional[str]
    relative_difference: Optional[float]  # (PPL_NMT - PPL_PBMT) / PPL_PBMT * 100


def fluency_report(bundle: EvalBundle, lm: Optional[NGramLM] = None,
                   nmt_id: Optional[str] = None,
                   pbmt_id: Optional[str] = None) -> FluencyReport:
    """Per-system perplexity plus the NMT-vs-PBMT relative difference.

    External scores bound in the bundle take precedence; any system without
    them is scored with the supplied model.
    """
    perplexities = {}
    for sys in bundle.systems:
        key = sys.system_id
        if key in bundle.lm_scores:
            scores = bundle.lm_scores[key]
        elif lm is not None:
            scores = score_corpus(lm, sys.corpus)
        else:
            raise ValueError(
                f"no LM scores for system {key!r} and no model supplied")
        perplexities[key] = perplexity(scores)
    if nmt_id is None:
        nmt_id = next((s.system_id for s in bundle.systems
                       if s.paradigm == Paradigm.NMT), None)
    if pbmt_id is None:
        pbmt_id = next((s.system_id for s in bundle.systems
                        if s.paradigm == Paradigm.PBMT), None)
    rel = None
    if nmt_id is not None and pbmt_id is not None:
        rel = relative_difference(perplexities[nmt_id], perplexities[pbmt_id])
    return FluencyReport(perplexities, nmt_id, pbmt_id, rel)


def relative_difference(ppl_nmt: float, ppl_pbmt: float) -> float:
    return (ppl_nmt - ppl_pbmt) / ppl_pbmt * 100.0
