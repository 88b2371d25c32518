import json
import math
from pathlib import Path

import pytest

from mtfacets.cli import main
from mtfacets.corpus import InputError, load_corpus
from mtfacets.fluency import perplexity, train_ngram_lm
from mtfacets.metrics import bleu, chrf1
from mtfacets.pipeline import (ANALYSES, RunConfig, ValidationFailure,
                               emit_plot_data, load_bundle, run)
from mtfacets.similarity import group_averages, pairwise_overlap
from mtfacets import fluency, stats

FIXTURES = Path(__file__).parent / "fixtures" / "toy"


def toy_config(tmp_path, **overrides) -> RunConfig:
    config = RunConfig.from_file(FIXTURES / "config.json")
    config.out = tmp_path / "out"
    config.iterations = 100
    for key, value in overrides.items():
        setattr(config, key, value)
    return config


class TestRunConfig:
    def test_paths_resolve_relative_to_config_file(self):
        config = RunConfig.from_file(FIXTURES / "config.json")
        assert Path(config.source).is_absolute()
        assert Path(config.source).exists()
        for entry in config.systems:
            assert Path(entry["path"]).exists()
        for path in config.alignments.values():
            assert Path(path).exists()

    def test_defaults(self, tmp_path):
        cfg_file = tmp_path / "c.json"
        (tmp_path / "x.txt").write_text("a\n", encoding="utf-8")
        cfg_file.write_text(json.dumps({
            "source": "x.txt", "reference": "x.txt",
            "systems": [{"id": "s1", "paradigm": "nmt", "path": "x.txt"}],
        }), encoding="utf-8")
        config = RunConfig.from_file(cfg_file)
        assert config.seed == 42
        assert config.iterations == 1000
        assert config.alpha == 0.05
        assert config.analyses == ANALYSES

    def test_unknown_analysis_rejected(self, tmp_path):
        cfg_file = tmp_path / "c.json"
        cfg_file.write_text(json.dumps({
            "source": "x", "reference": "x", "systems": [],
            "analyses": ["similarity", "bogus"],
        }), encoding="utf-8")
        with pytest.raises(ValueError, match="bogus"):
            RunConfig.from_file(cfg_file)


class TestValidation:
    def test_length_mismatch_aborts_before_any_analysis(self, tmp_path):
        config = toy_config(tmp_path)
        short = tmp_path / "short.txt"
        short.write_text("only one line\n", encoding="utf-8")
        config.systems[0]["path"] = str(short)
        # the mismatch surfaces while loading alignments against the short
        # system; either way no analysis runs and no output appears
        with pytest.raises((ValidationFailure, InputError)):
            run(config)
        assert not (tmp_path / "out").exists()

    def test_reordering_without_alignments_fails_validation(self, tmp_path):
        config = toy_config(tmp_path, alignments={},
                            analyses=("reordering",))
        with pytest.raises(ValidationFailure, match="alignment"):
            run(config)

    def test_similarity_alone_needs_no_alignments(self, tmp_path):
        config = toy_config(tmp_path, alignments={},
                            analyses=("similarity",))
        report = run(config)
        assert report["failed"] == {}
        assert "similarity" in report["analyses"]


class TestRunMatchesLibrary:
    def test_similarity_numbers(self, tmp_path):
        config = toy_config(tmp_path, analyses=("similarity",))
        report = run(config)
        bundle = load_bundle(config)
        matrix = pairwise_overlap(list(bundle.systems))
        averages = group_averages(matrix, [s.paradigm for s in bundle.systems])
        got = report["analyses"]["similarity"]
        assert got["group_averages"]["nmt_nmt"] == pytest.approx(
            averages.nmt_nmt)
        assert got["group_averages"]["cross"] == pytest.approx(averages.cross)
        for i, row in enumerate(matrix.values):
            assert got["matrix"][i] == pytest.approx(list(row))

    def test_overall_bleu_numbers(self, tmp_path):
        config = toy_config(tmp_path, analyses=("overall",))
        report = run(config)
        bundle = load_bundle(config)
        for sys in bundle.systems:
            expected = bleu(sys.corpus, bundle.reference).score.value
            got = report["analyses"]["overall"]["systems"][sys.system_id]
            assert got["bleu"] == pytest.approx(expected)

    def test_fluency_numbers(self, tmp_path):
        config = toy_config(tmp_path, analyses=("fluency",))
        report = run(config)
        bundle = load_bundle(config)
        training = load_corpus(config.lm_train, "lm_train")
        lm = train_ngram_lm(training, order=config.lm_order,
                            vocab_cap=config.lm_vocab_cap)
        for sys in bundle.systems:
            expected = perplexity(fluency.score_corpus(lm, sys.corpus))
            got = report["analyses"]["fluency"]["perplexities"][sys.system_id]
            assert got == pytest.approx(expected)

    def test_length_curve_numbers(self, tmp_path):
        config = toy_config(tmp_path, analyses=("length",))
        report = run(config)
        bundle = load_bundle(config)
        curve = stats.length_curve(bundle, config.nmt, config.pbmt)
        got = report["analyses"]["length"]
        assert [b["label"] for b in got["buckets"]] == [p.label
                                                        for p in curve.points]
        for b, p in zip(got["buckets"], curve.points):
            assert b["chrf_nmt"] == pytest.approx(p.chrf_nmt)


class TestOutputs:
    def test_all_report_files_written(self, tmp_path):
        config = toy_config(tmp_path)
        report = run(config)
        assert report["failed"] == {}
        out = tmp_path / "out"
        expected = ["report.json", "overall.tsv", "similarity_matrix.tsv",
                    "similarity_summary.tsv", "fluency.tsv", "reordering.tsv",
                    "reordering_significance.tsv", "length_curve.tsv",
                    "length_scores.tsv", "length_improvement.tsv",
                    "errcats.tsv", "errcats_improvement.tsv"]
        for name in expected:
            assert (out / name).exists(), name

    def test_provenance_header_on_every_tsv(self, tmp_path):
        config = toy_config(tmp_path)
        run(config)
        for tsv in (tmp_path / "out").glob("*.tsv"):
            first = tsv.read_text(encoding="utf-8").splitlines()[0]
            assert first.startswith("# seed=42 iterations=100 alpha=0.05")

    def test_reruns_byte_identical(self, tmp_path):
        config_a = toy_config(tmp_path, out=tmp_path / "a")
        config_b = toy_config(tmp_path, out=tmp_path / "b")
        run(config_a)
        run(config_b)
        for path_a in sorted((tmp_path / "a").iterdir()):
            path_b = tmp_path / "b" / path_a.name
            assert path_a.read_bytes() == path_b.read_bytes(), path_a.name

    def test_analysis_failure_isolated(self, tmp_path):
        # fluency cannot run without lm_train or external scores, the rest can
        config = toy_config(tmp_path, lm_train=None,
                            analyses=("similarity", "fluency"))
        report = run(config)
        assert "similarity" in report["analyses"]
        assert "fluency" in report["failed"]

    def test_tsv_floats_four_decimals(self, tmp_path):
        config = toy_config(tmp_path, analyses=("similarity",))
        run(config)
        lines = (tmp_path / "out" / "similarity_summary.tsv").read_text(
            encoding="utf-8").splitlines()
        for line in lines[2:]:
            value = line.split("\t")[1]
            if value != "N/A":
                assert len(value.split(".")[1]) == 4


class TestEmitPlotData:
    def test_row_counts(self, tmp_path):
        config = toy_config(tmp_path)
        bundle = load_bundle(config)
        curve = stats.length_curve(bundle, config.nmt, config.pbmt)
        emit_plot_data(curve, tmp_path, "seed=1")
        scores = (tmp_path / "length_scores.tsv").read_text(
            encoding="utf-8").splitlines()
        improvement = (tmp_path / "length_improvement.tsv").read_text(
            encoding="utf-8").splitlines()
        assert len(scores) == len(curve.points) + 2  # comment + header
        assert len(improvement) == len(curve.points) + 2

    def test_empty_curve_rejected(self, tmp_path):
        empty = stats.LengthCurve(points=(), correlation=None,
                                  empty_bucket_labels=())
        with pytest.raises(ValueError):
            emit_plot_data(empty, tmp_path, "seed=1")

    def test_empty_buckets_noted_in_header(self, tmp_path):
        config = toy_config(tmp_path)
        bundle = load_bundle(config)
        curve = stats.length_curve(bundle, config.nmt, config.pbmt)
        assert curve.empty_bucket_labels  # toy corpus has short segments only
        emit_plot_data(curve, tmp_path, "seed=1")
        header = (tmp_path / "length_scores.tsv").read_text(
            encoding="utf-8").splitlines()[0]
        assert "empty_buckets_omitted=" in header


class TestCli:
    def run_cli(self, *argv):
        return main(list(argv))

    def test_validate_ok(self):
        assert self.run_cli("validate", "--config",
                            str(FIXTURES / "config.json")) == 0

    def test_validate_failure_exit_1(self, tmp_path):
        bad = {
            "source": str(FIXTURES / "lm_train.txt"),  # wrong segment count
            "reference": str(FIXTURES / "reference.txt"),
            "systems": [{"id": "s1", "paradigm": "NMT",
                         "path": str(FIXTURES / "nmt1.txt")}],
        }
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps(bad), encoding="utf-8")
        assert self.run_cli("validate", "--config", str(cfg)) == 1

    def test_missing_config_exit_2(self, tmp_path):
        assert self.run_cli("all", "--config",
                            str(tmp_path / "nope.json")) == 2

    def test_all_writes_reports(self, tmp_path):
        code = self.run_cli("all", "--config", str(FIXTURES / "config.json"),
                            "--out", str(tmp_path / "o"), "--iterations",
                            "50")
        assert code == 0
        assert (tmp_path / "o" / "report.json").exists()

    def test_single_analysis_subcommand(self, tmp_path):
        code = self.run_cli("similarity", "--config",
                            str(FIXTURES / "config.json"),
                            "--out", str(tmp_path / "o"))
        assert code == 0
        report = json.loads((tmp_path / "o" / "report.json").read_text())
        assert list(report["analyses"]) == ["similarity"]
        assert not (tmp_path / "o" / "fluency.tsv").exists()

    def test_flag_overrides_reach_report(self, tmp_path):
        code = self.run_cli("overall", "--config",
                            str(FIXTURES / "config.json"),
                            "--out", str(tmp_path / "o"),
                            "--seed", "7", "--iterations", "20",
                            "--alpha", "0.1")
        assert code == 0
        report = json.loads((tmp_path / "o" / "report.json").read_text())
        prov = report["provenance"]
        assert (prov["seed"], prov["iterations"], prov["alpha"]) == (7, 20,
                                                                     0.1)

    def test_runtime_failure_exit_2(self, tmp_path):
        # drop lm_train so fluency cannot run; absolutize the other paths
        # because the rewritten config lives in tmp_path
        raw = json.loads((FIXTURES / "config.json").read_text())
        raw.pop("lm_train", None)
        new_cfg = tmp_path / "cfg.json"
        base = FIXTURES.resolve()
        for key in ("source", "reference", "lm_train"):
            if key in raw:
                raw[key] = str(base / raw[key])
        raw["systems"] = [dict(s, path=str(base / s["path"]))
                          for s in raw["systems"]]
        raw["alignments"] = {k: str(base / v)
                             for k, v in raw.get("alignments", {}).items()}
        new_cfg.write_text(json.dumps(raw), encoding="utf-8")
        code = self.run_cli("fluency", "--config", str(new_cfg),
                            "--out", str(tmp_path / "o"))
        assert code == 2


class TestReportJsonCoversTsvs:
    def test_every_tsv_float_appears_in_json(self, tmp_path):
        config = toy_config(tmp_path)
        run(config)
        out = tmp_path / "out"
        report_text = (out / "report.json").read_text(encoding="utf-8")
        report = json.loads(report_text)

        def walk(node):
            if isinstance(node, dict):
                for v in node.values():
                    yield from walk(v)
            elif isinstance(node, list):
                for v in node:
                    yield from walk(v)
            elif isinstance(node, float):
                yield node

        json_floats = list(walk(report))
        for tsv in out.glob("*.tsv"):
            for line in tsv.read_text(encoding="utf-8").splitlines()[2:]:
                for cell in line.split("\t"):
                    try:
                        value = float(cell)
                    except ValueError:
                        continue
                    if math.isclose(value, round(value)) and "." not in cell:
                        continue  # integer-ish cells (counts) skip the check
                    assert any(math.isclose(value, f, abs_tol=5e-5)
                               for f in json_floats), (tsv.name, cell)
