"""Config-driven orchestration of all analyses and report emission.

Reports come in three forms per run: human-oriented TSV tables mirroring
the analysis layouts, plot-data TSVs for the length curves, and a single
machine-readable ``report.json`` aggregating every number (byte-identical
across reruns with the same inputs and seed).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from . import errcats, fluency, reordering, similarity, stats
from .corpus import (Corpus, EvalBundle, Paradigm, SystemOutput, bind_stems,
                     load_alignments, load_corpus, validate_bundle)
from .metrics import bleu, bleu_from_stats, bleu_stats

ANALYSES = ("overall", "similarity", "fluency", "reordering", "length",
            "errcats")


class ValidationFailure(Exception):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


@dataclass
class RunConfig:
    source: Path
    reference: Path
    systems: list[dict[str, str]]  # id, paradigm, path
    analyses: tuple[str, ...] = ANALYSES
    alignments: dict[str, Path] = field(default_factory=dict)
    stems: dict[str, Path] = field(default_factory=dict)
    stem_language: str = "en"
    lm_train: Optional[Path] = None
    lm_order: int = 3
    lm_vocab_cap: int = 50000
    lm_scores: dict[str, Path] = field(default_factory=dict)
    nmt: Optional[str] = None   # designated systems for paired analyses
    pbmt: Optional[str] = None
    seed: int = 42
    iterations: int = 1000
    alpha: float = 0.05
    out: Path = Path("mtfacets-out")

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        raw = json.loads(path.read_text(encoding="utf-8"))
        base = path.parent

        def p(value: str) -> Path:
            value = Path(value)
            return value if value.is_absolute() else base / value

        systems = [dict(entry, path=str(p(entry["path"])))
                   for entry in raw["systems"]]
        cfg = cls(source=p(raw["source"]), reference=p(raw["reference"]),
                  systems=systems)
        if "analyses" in raw:
            unknown = [a for a in raw["analyses"] if a not in ANALYSES]
            if unknown:
                raise ValueError(f"unknown analyses: {unknown}")
            cfg.analyses = tuple(raw["analyses"])
        cfg.alignments = {k: p(v) for k, v in raw.get("alignments", {}).items()}
        cfg.stems = {k: p(v) for k, v in raw.get("stems", {}).items()}
        cfg.stem_language = raw.get("stem_language", "en")
        if raw.get("lm_train"):
            cfg.lm_train = p(raw["lm_train"])
        cfg.lm_order = raw.get("lm_order", 3)
        cfg.lm_vocab_cap = raw.get("lm_vocab_cap", 50000)
        cfg.lm_scores = {k: p(v) for k, v in raw.get("lm_scores", {}).items()}
        cfg.nmt = raw.get("nmt")
        cfg.pbmt = raw.get("pbmt")
        cfg.seed = raw.get("seed", 42)
        cfg.iterations = raw.get("iterations", 1000)
        cfg.alpha = raw.get("alpha", 0.05)
        cfg.out = p(raw["out"]) if "out" in raw else base / "mtfacets-out"
        return cfg

    def provenance(self) -> str:
        return (f"seed={self.seed} iterations={self.iterations} "
                f"alpha={self.alpha} chrf_orders=1-6 lm_order={self.lm_order}")


def load_bundle(config: RunConfig) -> EvalBundle:
    source = load_corpus(config.source, "source")
    reference = load_corpus(config.reference, "reference")
    systems = []
    for entry in config.systems:
        corpus = load_corpus(entry["path"], entry["id"])
        systems.append(SystemOutput(corpus, entry["id"],
                                    Paradigm(entry["paradigm"])))
    bundle = EvalBundle(source, reference, tuple(systems))
    for name, path in config.alignments.items():
        target = reference if name == "reference" else bundle.system(name).corpus
        aln = load_alignments(path, source, target)
        bundle.alignments[name] = aln
    for name, path in config.stems.items():
        stems = load_corpus(path, name + "#stems")
        bundle = bind_stems(bundle, name, stems)
    for name, path in config.lm_scores.items():
        corpus = bundle.corpus_by_name(name)
        bundle.lm_scores[name] = fluency.load_external_scores(path, corpus)
    return bundle


def _fmt(value: Any) -> str:
    if value is None:
        return "N/A"
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def _write_tsv(path: Path, header_comment: str, columns: list[str],
               rows: list[list[Any]]) -> None:
    lines = [f"# {header_comment}", "\t".join(columns)]
    for row in rows:
        lines.append("\t".join(_fmt(v) for v in row))
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def _designated_pair(config: RunConfig,
                     bundle: EvalBundle) -> tuple[Optional[str], Optional[str]]:
    nmt_id = config.nmt or next((s.system_id for s in bundle.systems
                                 if s.paradigm == Paradigm.NMT), None)
    pbmt_id = config.pbmt or next((s.system_id for s in bundle.systems
                                   if s.paradigm == Paradigm.PBMT), None)
    return nmt_id, pbmt_id


def run(config: RunConfig) -> dict[str, Any]:
    """Run the requested analyses; returns the aggregate report dict.

    Validation failures abort before any analysis (``ValidationFailure``).
    A failure inside one analysis marks that analysis failed in the
    aggregate report and the remaining analyses still run.
    """
    bundle = load_bundle(config)
    violations = validate_bundle(bundle, config.analyses)
    if violations:
        raise ValidationFailure(violations)
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    prov = config.provenance()
    report: dict[str, Any] = {
        "provenance": {
            "seed": config.seed, "iterations": config.iterations,
            "alpha": config.alpha, "chrf_orders": "1-6",
            "lm_order": config.lm_order, "analyses": list(config.analyses),
        },
        "analyses": {},
        "failed": {},
    }
    runners = {
        "overall": _run_overall,
        "similarity": _run_similarity,
        "fluency": _run_fluency,
        "reordering": _run_reordering,
        "length": _run_length,
        "errcats": _run_errcats,
    }
    for analysis in config.analyses:
        try:
            report["analyses"][analysis] = runners[analysis](config, bundle,
                                                             out, prov)
        except Exception as exc:  # noqa: BLE001 - isolate per-analysis failures
            report["failed"][analysis] = f"{type(exc).__name__}: {exc}"
    report_path = out / "report.json"
    report_path.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n",
                           encoding="utf-8")
    return report


def _run_overall(config, bundle, out, prov):
    rows = []
    data: dict[str, Any] = {"systems": {}}
    for sys in bundle.systems:
        result = bleu(sys.corpus, bundle.reference)
        rows.append([sys.system_id, sys.paradigm.value, result.score.value,
                     "yes" if result.degenerate else "no"])
        data["systems"][sys.system_id] = {
            "paradigm": sys.paradigm.value,
            "bleu": result.score.value,
            "precisions": list(result.precisions),
            "brevity_penalty": result.brevity_penalty,
            "zero_match_order": result.degenerate,
        }
    nmt_id, pbmt_id = _designated_pair(config, bundle)
    if nmt_id and pbmt_id:
        stats_n = bleu_stats(bundle.system(nmt_id).corpus, bundle.reference)
        stats_p = bleu_stats(bundle.system(pbmt_id).corpus, bundle.reference)
        boot = stats.paired_bootstrap_stats(
            stats_n, stats_p, bleu_from_stats,
            iterations=config.iterations, alpha=config.alpha, seed=config.seed)
        data["bootstrap"] = _bootstrap_dict(boot, nmt_id, pbmt_id)
        rows.append([f"{nmt_id} vs {pbmt_id}", "bootstrap", boot.p_value,
                     "significant" if boot.significant else "not significant"])
    _write_tsv(out / "overall.tsv", prov,
               ["system", "paradigm", "BLEU", "note"], rows)
    return data


def _run_similarity(config, bundle, out, prov):
    matrix = similarity.pairwise_overlap(list(bundle.systems))
    paradigms = [s.paradigm for s in bundle.systems]
    averages = similarity.group_averages(matrix, paradigms)
    ids = list(matrix.system_ids)
    rows = [[ids[i]] + list(matrix.values[i]) for i in range(len(ids))]
    _write_tsv(out / "similarity_matrix.tsv", prov, ["system"] + ids, rows)
    _write_tsv(out / "similarity_summary.tsv", prov,
               ["group", "average_chrf1"],
               [["NMT-NMT", averages.nmt_nmt],
                ["PBMT-PBMT", averages.pbmt_pbmt],
                ["NMT-PBMT", averages.cross]])
    return {
        "system_ids": ids,
        "matrix": [list(row) for row in matrix.values],
        "group_averages": {"nmt_nmt": averages.nmt_nmt,
                           "pbmt_pbmt": averages.pbmt_pbmt,
                           "cross": averages.cross},
    }


def _run_fluency(config, bundle, out, prov):
    lm = None
    missing_scores = [s.system_id for s in bundle.systems
                      if s.system_id not in bundle.lm_scores]
    if missing_scores:
        if config.lm_train is None:
            raise ValueError(
                "fluency requested without external scores for "
                f"{missing_scores} and no lm_train corpus")
        training = load_corpus(config.lm_train, "lm_train")
        lm = fluency.train_ngram_lm(training, order=config.lm_order,
                                    vocab_cap=config.lm_vocab_cap)
    nmt_id, pbmt_id = _designated_pair(config, bundle)
    rep = fluency.fluency_report(bundle, lm, nmt_id=nmt_id, pbmt_id=pbmt_id)
    rows = [[sid, ppl] for sid, ppl in rep.perplexities.items()]
    rows.append([f"rel.diff ({rep.nmt_id} vs {rep.pbmt_id})",
                 rep.relative_difference])
    _write_tsv(out / "fluency.tsv", prov, ["system", "perplexity"], rows)
    return {
        "perplexities": rep.perplexities,
        "nmt": rep.nmt_id, "pbmt": rep.pbmt_id,
        "relative_difference_pct": rep.relative_difference,
    }


def _run_reordering(config, bundle, out, prov):
    rep = reordering.reordering_report(bundle, iterations=config.iterations,
                                       alpha=config.alpha, seed=config.seed)
    rows = [[row.system_id, row.vs_monotone, row.vs_reference]
            for row in rep.rows]
    _write_tsv(out / "reordering.tsv", prov,
               ["system", "kendall_vs_monotone", "kendall_vs_reference"], rows)
    sig_rows = [[a, b, r.p_value,
                 "significant" if r.significant else "not significant"]
                for (a, b), r in rep.significance.items()]
    _write_tsv(out / "reordering_significance.tsv", prov,
               ["system_a", "system_b", "p_value", "verdict"], sig_rows)
    return {
        "rows": [{"system": row.system_id, "vs_monotone": row.vs_monotone,
                  "vs_reference": row.vs_reference} for row in rep.rows],
        "significance": {f"{a}|{b}": _bootstrap_dict(r, a, b)
                         for (a, b), r in rep.significance.items()},
    }


def _run_length(config, bundle, out, prov):
    nmt_id, pbmt_id = _designated_pair(config, bundle)
    if not (nmt_id and pbmt_id):
        raise ValueError("length analysis needs one NMT and one PBMT system")
    curve = stats.length_curve(bundle, nmt_id, pbmt_id)
    emit_plot_data(curve, out, prov, nmt_id=nmt_id, pbmt_id=pbmt_id)
    rows = [[p.label, p.mean_length, p.chrf_nmt, p.chrf_pbmt,
             p.relative_improvement] for p in curve.points]
    rows.append(["pearson_r", "", "", "", curve.correlation])
    _write_tsv(out / "length_curve.tsv", prov,
               ["bucket", "mean_length", f"chrf_{nmt_id}", f"chrf_{pbmt_id}",
                "rel_improvement_pct"], rows)
    return {
        "nmt": nmt_id, "pbmt": pbmt_id,
        "buckets": [{"label": p.label, "mean_length": p.mean_length,
                     "chrf_nmt": p.chrf_nmt, "chrf_pbmt": p.chrf_pbmt,
                     "rel_improvement_pct": p.relative_improvement}
                    for p in curve.points],
        "empty_buckets": list(curve.empty_bucket_labels),
        "pearson_r": curve.correlation,
    }


def _run_errcats(config, bundle, out, prov):
    ref_stems = bundle.stems.get("reference")
    if ref_stems is None:
        ref_stems = errcats.stem_corpus(bundle.reference, config.stem_language)
    rates: dict[str, errcats.ErrorRates] = {}
    rows = []
    for sys in bundle.systems:
        hyp_stems = bundle.stems.get(sys.system_id)
        if hyp_stems is None:
            hyp_stems = errcats.stem_corpus(sys.corpus, config.stem_language)
        annotations = errcats.classify_corpus(sys.corpus, bundle.reference,
                                              hyp_stems, ref_stems)
        rates[sys.system_id] = errcats.error_rates(annotations,
                                                   bundle.reference)
        _dump_classes(out / f"errcats_{sys.system_id}_classes.txt",
                      annotations)
        er = rates[sys.system_id]
        rows.append([sys.system_id, er.rate("inflection"),
                     er.rate("reordering"), er.rate("missing"),
                     er.rate("extra"), er.rate("lexical_choice"),
                     er.lexical_rate])
    _write_tsv(out / "errcats.tsv", prov,
               ["system", "inflection", "reordering", "missing", "extra",
                "lexical_choice", "lexical_total"], rows)
    data: dict[str, Any] = {
        "rates": {sid: {
            "inflection": er.rate("inflection"),
            "reordering": er.rate("reordering"),
            "missing": er.rate("missing"),
            "extra": er.rate("extra"),
            "lexical_choice": er.rate("lexical_choice"),
            "lexical_total": er.lexical_rate,
            "counts": dict(er.counts),
        } for sid, er in rates.items()},
    }
    nmt_id, pbmt_id = _designated_pair(config, bundle)
    if nmt_id and pbmt_id:
        improvement = errcats.relative_improvement(rates[nmt_id],
                                                   rates[pbmt_id])
        data["relative_improvement_pct"] = improvement
        _write_tsv(out / "errcats_improvement.tsv", prov,
                   ["category", "rel_improvement_pct"],
                   [[cat, val] for cat, val in improvement.items()])
    return data


def _dump_classes(path: Path, annotations) -> None:
    # hypothesis-side class tags, one line per segment, for debugging and
    # fixture authoring
    lines = [" ".join(ann.hyp_classes) for ann in annotations]
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def emit_plot_data(curve: stats.LengthCurve, out_dir: Path, prov: str,
                   nmt_id: str = "NMT", pbmt_id: str = "PBMT") -> None:
    """Two TSV series for plotting: absolute per-bucket scores and relative
    improvement.  Empty buckets are omitted and noted in the header."""
    if not curve.points:
        raise ValueError("empty curve")
    note = prov
    if curve.empty_bucket_labels:
        note += " empty_buckets_omitted=" + ",".join(curve.empty_bucket_labels)
    _write_tsv(out_dir / "length_scores.tsv", note,
               ["bucket", "mean_length", f"chrf_{nmt_id}", f"chrf_{pbmt_id}"],
               [[p.label, p.mean_length, p.chrf_nmt, p.chrf_pbmt]
                for p in curve.points])
    _write_tsv(out_dir / "length_improvement.tsv", note,
               ["bucket", "mean_length", "rel_improvement_pct"],
               [[p.label, p.mean_length, p.relative_improvement]
                for p in curve.points])


def _bootstrap_dict(result: stats.BootstrapResult, a: str, b: str) -> dict:
    return {
        "system_a": a, "system_b": b,
        "wins_a": result.wins_a, "wins_b": result.wins_b,
        "ties": result.ties, "iterations": result.iterations,
        "p_value": result.p_value, "significant": result.significant,
        "alpha": result.alpha,
    }
