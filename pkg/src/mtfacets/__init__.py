"""mtfacets: multifaceted comparison of machine-translation system outputs.

Analyses: pairwise output similarity (chrF1), fluency (n-gram LM
perplexity or external scores), reordering (alignment permutations and
Kendall's tau), sentence-length quality curves, and word-level error
categories, with paired bootstrap significance testing throughout.
"""

from .corpus import (AlignmentSet, Corpus, EvalBundle, InputError, Paradigm,
                     Segment, SystemOutput, bind_stems, load_alignments,
                     load_corpus, validate_bundle)
from .errcats import (ErrorAnnotation, ErrorRates, classify_corpus,
                      classify_errors, error_rates, light_stem,
                      relative_improvement, stem_corpus)
from .fluency import (NGramLM, fluency_report, load_external_scores,
                      perplexity, score_corpus, train_ngram_lm)
from .metrics import (BleuResult, EditScript, MetricScore, bleu, chrf1,
                      per_errors, wer_align)
from .pipeline import RunConfig, ValidationFailure, load_bundle, run
from .reordering import (alignment_to_permutation, kendall_similarity,
                         relative_kendall, reordering_report)
from .similarity import group_averages, pairwise_overlap
from .stats import (BootstrapResult, LengthBucket, LengthCurve,
                    average_improvement_curve, bucket_by_length, length_curve,
                    paired_bootstrap, paired_bootstrap_values, pearson)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
