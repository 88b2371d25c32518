"""Word-level error classification in the style of automatic error analysis
tools: inflection, reordering, missing, extra and lexical-choice errors,
with the last three grouped as "lexical" for reporting.

Classification needs base forms (stems).  Serious use supplies stem files
token-parallel to the texts; a deliberately small built-in suffix stripper
is provided as a fallback for English.
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

from .corpus import Corpus, Segment
from .metrics import DELETION, INSERTION, SUBSTITUTION, per_errors, wer_align

# hypothesis-side classes
NONE = "none"
INFLECTION = "infl"     # hPER error whose stem matches a reference error's stem
REORDERING = "reord"    # matches the reference bag but is a WER error
EXTRA = "extra"         # WER insertion, hPER error, stem unknown to reference errors
LEXICAL_CHOICE = "lex"  # remaining hPER errors
# reference-side class
MISSING = "miss"        # WER deletion, rPER error, stem unknown to hypothesis errors

HYP_CLASSES = (NONE, INFLECTION, REORDERING, EXTRA, LEXICAL_CHOICE)
REF_CLASSES = (NONE, MISSING)

CATEGORY_NAMES = ("inflection", "reordering", "missing", "extra",
                  "lexical_choice")


@dataclass(frozen=True)
class ErrorAnnotation:
    hyp_classes: tuple[str, ...]
    ref_classes: tuple[str, ...]


@dataclass(frozen=True)
class ErrorRates:
    """Corpus-level error counts; every rate is normalized by the total
    reference token count so categories are comparable across systems
    sharing a reference."""
    counts: dict[str, int]  # keys: CATEGORY_NAMES
    reference_tokens: int

    def rate(self, category: str) -> float:
        return self.counts[category] / self.reference_tokens

    @property
    def lexical_count(self) -> int:
        return (self.counts["missing"] + self.counts["extra"]
                + self.counts["lexical_choice"])

    @property
    def lexical_rate(self) -> float:
        return self.lexical_count / self.reference_tokens


def classify_errors(hyp: Segment, ref: Segment,
                    hyp_stems: Segment, ref_stems: Segment) -> ErrorAnnotation:
    """Classify every hypothesis and reference token into one error class.

    Pipeline: WER edit script, then hPER/rPER bag flags, then
      - inflection: hPER error whose stem equals the stem of an rPER error
        (each reference error consumable once, matched left to right);
      - reordering: token that is no hPER error but a WER substitution or
        insertion;
      - missing: WER deletion that is an rPER error and shares no stem with
        any hPER error;
      - extra: WER insertion that is an hPER error, not classed inflection,
        and shares no stem with any rPER error;
      - lexical choice: any remaining hPER error.
    """
    if len(hyp) != len(hyp_stems) or len(ref) != len(ref_stems):
        raise ValueError("stems must be token-parallel to the tokens")
    script, _ = wer_align(hyp, ref)
    hper, rper = per_errors(hyp, ref)

    hyp_classes = [NONE] * len(hyp)
    ref_classes = [NONE] * len(ref)

    rper_stem_pool = Counter(ref_stems.tokens[j]
                             for j in range(len(ref)) if rper[j])
    hper_stems = {hyp_stems.tokens[i] for i in range(len(hyp)) if hper[i]}
    rper_stems = set(rper_stem_pool)

    consumable = Counter(rper_stem_pool)
    for i in range(len(hyp)):
        if hper[i] and consumable[hyp_stems.tokens[i]] > 0:
            consumable[hyp_stems.tokens[i]] -= 1
            hyp_classes[i] = INFLECTION

    for i in range(len(hyp)):
        if not hper[i] and script.hyp_labels[i] in (SUBSTITUTION, INSERTION):
            hyp_classes[i] = REORDERING

    for j in range(len(ref)):
        if (script.ref_labels[j] == DELETION and rper[j]
                and ref_stems.tokens[j] not in hper_stems):
            ref_classes[j] = MISSING

    for i in range(len(hyp)):
        if hyp_classes[i] != NONE or not hper[i]:
            continue
        if (script.hyp_labels[i] == INSERTION
                and hyp_stems.tokens[i] not in rper_stems):
            hyp_classes[i] = EXTRA
        else:
            hyp_classes[i] = LEXICAL_CHOICE

    return ErrorAnnotation(tuple(hyp_classes), tuple(ref_classes))


def classify_corpus(hyp: Corpus, ref: Corpus,
                    hyp_stems: Corpus, ref_stems: Corpus) -> list[ErrorAnnotation]:
    if not (len(hyp) == len(ref) == len(hyp_stems) == len(ref_stems)):
        raise ValueError("corpora must have equal segment counts")
    return [classify_errors(h, r, hs, rs)
            for h, r, hs, rs in zip(hyp, ref, hyp_stems, ref_stems)]


def error_rates(annotations: Sequence[ErrorAnnotation],
                reference: Corpus) -> ErrorRates:
    counts = {name: 0 for name in CATEGORY_NAMES}
    for ann in annotations:
        for cls in ann.hyp_classes:
            if cls == INFLECTION:
                counts["inflection"] += 1
            elif cls == REORDERING:
                counts["reordering"] += 1
            elif cls == EXTRA:
                counts["extra"] += 1
            elif cls == LEXICAL_CHOICE:
                counts["lexical_choice"] += 1
        for cls in ann.ref_classes:
            if cls == MISSING:
                counts["missing"] += 1
    total_ref = sum(len(seg) for seg in reference)
    if total_ref == 0:
        raise ValueError("reference corpus has no tokens")
    return ErrorRates(counts, total_ref)


def relative_improvement(nmt: ErrorRates,
                         pbmt: ErrorRates) -> dict[str, Optional[float]]:
    """(rate_NMT - rate_PBMT) / rate_PBMT * 100 per reported category;
    negative means fewer NMT errors.  None where the PBMT rate is zero."""
    def rel(a: float, b: float) -> Optional[float]:
        return (a - b) / b * 100.0 if b > 0 else None

    return {
        "inflection": rel(nmt.rate("inflection"), pbmt.rate("inflection")),
        "reordering": rel(nmt.rate("reordering"), pbmt.rate("reordering")),
        "lexical": rel(nmt.lexical_rate, pbmt.lexical_rate),
    }


# longest match wins; stripping never leaves fewer than 3 characters
_EN_SUFFIXES = (
    "ingly", "edly", "ness", "ment", "tion", "able", "ible", "ing",
    "est", "ity", "ous", "ful", "ies", "ed", "er", "ly", "es", "s",
)

_warned_languages: set[str] = set()


def light_stem(token: str, language: str = "en") -> str:
    """Minimal fallback stemmer: lowercase plus longest-suffix strip from a
    small per-language table.  Unsupported languages return the token
    unchanged (with a one-time warning)."""
    if language != "en":
        if language not in _warned_languages:
            _warned_languages.add(language)
            warnings.warn(
                f"no built-in stemmer for language {language!r}; "
                "returning tokens unchanged (supply stem files for real use)")
        return token
    lowered = token.lower()
    for suffix in sorted(_EN_SUFFIXES, key=len, reverse=True):
        if lowered.endswith(suffix) and len(lowered) - len(suffix) >= 3:
            return lowered[:-len(suffix)]
    return lowered


def stem_corpus(corpus: Corpus, language: str = "en") -> Corpus:
    """Token-parallel stem corpus via the built-in fallback stemmer."""
    segments = tuple(
        Segment(tuple(light_stem(tok, language) for tok in seg.tokens))
        for seg in corpus)
    return Corpus(corpus.name + "#stems", segments)
