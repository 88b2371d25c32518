"""Walk through every analysis on the bundled toy corpus.

Run from the repository root:

    python3 demos/toy_walkthrough.py

The toy bundle pairs ten German-flavoured source sentences with an English
reference, two NMT-style outputs (inflection mistakes) and two PBMT-style
outputs (reorderings and lexical substitutions), so every analysis has
something to find.
"""

from pathlib import Path

from mtfacets import (bleu, error_rates, classify_corpus, fluency_report,
                      group_averages, length_curve, pairwise_overlap,
                      reordering_report, stem_corpus, train_ngram_lm)
from mtfacets.corpus import load_corpus
from mtfacets.pipeline import RunConfig, load_bundle

CONFIG = Path(__file__).parent.parent / "tests" / "fixtures" / "toy" / "config.json"


def main() -> None:
    config = RunConfig.from_file(CONFIG)
    bundle = load_bundle(config)
    print(f"Loaded {len(bundle.reference)} segments, "
          f"{len(bundle.systems)} systems: "
          + ", ".join(s.system_id for s in bundle.systems))

    print("\n== Overall quality (BLEU vs reference) ==")
    for system in bundle.systems:
        result = bleu(system.corpus, bundle.reference)
        print(f"  {system.system_id:6s} ({system.paradigm.value:4s})  "
              f"BLEU = {result.score.value:6.2f}")

    print("\n== Output similarity (pairwise chrF1) ==")
    matrix = pairwise_overlap(list(bundle.systems))
    averages = group_averages(matrix, [s.paradigm for s in bundle.systems])
    print(f"  NMT-NMT   average: {averages.nmt_nmt:.2f}")
    print(f"  PBMT-PBMT average: {averages.pbmt_pbmt:.2f}")
    print(f"  cross     average: {averages.cross:.2f}")

    print("\n== Fluency (Kneser-Ney LM perplexity) ==")
    training = load_corpus(config.lm_train, "lm_train")
    lm = train_ngram_lm(training, order=config.lm_order)
    report = fluency_report(bundle, lm, nmt_id=config.nmt,
                            pbmt_id=config.pbmt)
    for system_id, ppl in report.perplexities.items():
        print(f"  {system_id:6s}  perplexity = {ppl:8.2f}")
    print(f"  relative difference ({report.nmt_id} vs {report.pbmt_id}): "
          f"{report.relative_difference:+.2f}%")

    print("\n== Reordering (Kendall's tau from word alignments) ==")
    reorder = reordering_report(bundle, iterations=config.iterations,
                                seed=config.seed)
    for row in reorder.rows:
        vs_ref = "   -" if row.vs_reference is None else f"{row.vs_reference:.4f}"
        print(f"  {row.system_id:10s}  vs monotone = {row.vs_monotone:.4f}  "
              f"vs reference = {vs_ref}")

    print("\n== Quality by sentence length ==")
    curve = length_curve(bundle, config.nmt, config.pbmt)
    for point in curve.points:
        print(f"  bucket {point.label:5s}  chrF1 {config.nmt} = "
              f"{point.chrf_nmt:6.2f}  {config.pbmt} = {point.chrf_pbmt:6.2f}"
              f"  improvement = {point.relative_improvement:+.2f}%")
    corr = "N/A" if curve.correlation is None else f"{curve.correlation:.3f}"
    print(f"  Pearson r (length vs improvement): {corr}")

    print("\n== Error categories (word-level classification) ==")
    ref_stems = stem_corpus(bundle.reference, config.stem_language)
    for system in bundle.systems:
        hyp_stems = stem_corpus(system.corpus, config.stem_language)
        annotations = classify_corpus(system.corpus, bundle.reference,
                                      hyp_stems, ref_stems)
        rates = error_rates(annotations, bundle.reference)
        parts = ", ".join(f"{cat}={count}"
                          for cat, count in rates.counts.items() if count)
        print(f"  {system.system_id:6s}  {parts or 'no errors'}")


if __name__ == "__main__":
    main()
