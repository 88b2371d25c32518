import pytest
from hypothesis import given, strategies as st

from mtfacets.corpus import (AlignmentSet, Corpus, EvalBundle, InputError,
                             Paradigm, Segment, SystemOutput, bind_stems,
                             load_alignments, load_corpus, validate_bundle)

from conftest import corpus, seg

TOKEN = st.text(alphabet="abcxyz", min_size=1, max_size=4)
LINE = st.lists(TOKEN, min_size=0, max_size=6).map(" ".join)


class TestLoadCorpus:
    def test_basic_parse(self, tmp_path):
        path = tmp_path / "c.txt"
        path.write_text("a b\nc\n", encoding="utf-8")
        c = load_corpus(path, "c")
        assert [len(s) for s in c] == [2, 1]

    def test_empty_middle_line(self, tmp_path):
        path = tmp_path / "c.txt"
        path.write_text("a b\n\nc\n", encoding="utf-8")
        c = load_corpus(path, "c")
        assert [len(s) for s in c] == [2, 0, 1]

    def test_no_trailing_newline(self, tmp_path):
        # byte-level fixture: last line has no newline but is a segment
        path = tmp_path / "c.txt"
        path.write_bytes(b"a b\nc d e")
        c = load_corpus(path, "c")
        assert len(c) == 2
        assert c[1].tokens == ("c", "d", "e")

    def test_invalid_utf8_reports_line(self, tmp_path):
        path = tmp_path / "c.txt"
        path.write_bytes(b"ok line\n\xff\xfe broken\n")
        with pytest.raises(InputError, match="line 2"):
            load_corpus(path, "c")

    @given(st.lists(LINE, min_size=1, max_size=10))
    def test_round_trip(self, tmp_path_factory, lines):
        tmp = tmp_path_factory.mktemp("rt") / "c.txt"
        text = "".join(line + "\n" for line in lines)
        tmp.write_text(text, encoding="utf-8")
        assert load_corpus(tmp, "c").to_text() == text


class TestLoadAlignments:
    def test_basic(self, tmp_path):
        src = corpus("s1 s2", "t")
        tgt = corpus("a b", "c")
        path = tmp_path / "a.txt"
        path.write_text("0-0 1-1\n0-0\n", encoding="utf-8")
        aln = load_alignments(path, src, tgt)
        assert aln.links[0] == frozenset({(0, 0), (1, 1)})

    def test_empty_line_means_no_links(self, tmp_path):
        path = tmp_path / "a.txt"
        path.write_text("\n0-0\n", encoding="utf-8")
        aln = load_alignments(path, corpus("a", "b"), corpus("x", "y"))
        assert aln.links[0] == frozenset()

    def test_duplicates_collapse(self, tmp_path):
        path = tmp_path / "a.txt"
        path.write_text("0-0 0-0 0-0\n", encoding="utf-8")
        aln = load_alignments(path, corpus("a"), corpus("x"))
        assert aln.links[0] == frozenset({(0, 0)})

    def test_out_of_range_names_segment_and_link(self, tmp_path):
        path = tmp_path / "a.txt"
        path.write_text("0-5\n", encoding="utf-8")
        with pytest.raises(InputError, match=r"segment 0.*0-5"):
            load_alignments(path, corpus("a b c"), corpus("x y z"))

    def test_malformed_pair(self, tmp_path):
        path = tmp_path / "a.txt"
        path.write_text("0:0\n", encoding="utf-8")
        with pytest.raises(InputError, match="malformed"):
            load_alignments(path, corpus("a"), corpus("x"))

    def test_line_count_mismatch(self, tmp_path):
        path = tmp_path / "a.txt"
        path.write_text("0-0\n", encoding="utf-8")
        with pytest.raises(InputError, match="alignment lines"):
            load_alignments(path, corpus("a", "b"), corpus("x", "y"))

    def test_reserialization_is_set_equal(self, tmp_path):
        path = tmp_path / "a.txt"
        path.write_text("1-1 0-0 1-1\n", encoding="utf-8")
        src, tgt = corpus("a b"), corpus("x y")
        aln = load_alignments(path, src, tgt)
        path2 = tmp_path / "a2.txt"
        path2.write_text(aln.to_text(), encoding="utf-8")
        assert load_alignments(path2, src, tgt).links == aln.links


def make_bundle(**kwargs):
    defaults = dict(
        source=corpus("s1 s2", "s3", name="source"),
        reference=corpus("r1 r2", "r3", name="reference"),
        systems=(SystemOutput(corpus("h1 h2", "h3", name="sysA"), "sysA",
                              Paradigm.NMT),),
    )
    defaults.update(kwargs)
    return EvalBundle(**defaults)


class TestBindStems:
    def test_accepts_parallel(self):
        bundle = make_bundle()
        stems = corpus("r1 r2", "r3", name="reference#stems")
        out = bind_stems(bundle, "reference", stems)
        assert out.stems["reference"] is stems
        assert out.reference is bundle.reference  # tokens untouched

    def test_rejects_token_count_mismatch(self):
        bundle = make_bundle()
        with pytest.raises(InputError, match="segment 0"):
            bind_stems(bundle, "reference", corpus("r1", "r3"))

    def test_identity_stems_accepted(self):
        bundle = make_bundle()
        out = bind_stems(bundle, "sysA", corpus("h1 h2", "h3"))
        assert "sysA" in out.stems


class TestValidateBundle:
    def test_consistent_bundle_empty_report(self):
        assert validate_bundle(make_bundle()) == []

    def test_segment_count_mismatch_names_both_counts(self):
        bundle = make_bundle(systems=(SystemOutput(
            corpus("h1", name="sysA"), "sysA", Paradigm.NMT),))
        report = validate_bundle(bundle)
        assert any("1" in v and "2" in v for v in report)

    def test_reordering_without_alignments(self):
        report = validate_bundle(make_bundle(), analyses=("reordering",))
        assert any("alignments required" in v for v in report)

    def test_empty_reference_segment_is_violation(self):
        bundle = make_bundle(reference=corpus("r1 r2", "", name="reference"))
        assert any("segment 1" in v for v in validate_bundle(bundle))

    def test_is_pure(self):
        bundle = make_bundle()
        before = (bundle.source, bundle.reference, bundle.systems,
                  dict(bundle.alignments), dict(bundle.stems))
        validate_bundle(bundle, analyses=("reordering",))
        assert (bundle.source, bundle.reference, bundle.systems,
                dict(bundle.alignments), dict(bundle.stems)) == before


def test_segment_rejects_whitespace_token():
    with pytest.raises(InputError):
        Segment(("a b",))
