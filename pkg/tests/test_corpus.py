import pytest

from monomt.corpus import (
    Corpus, CorpusError, ParallelCorpus, ParallelPair, Provenance, Sentence,
    Token, Vocabulary, load_corpus, load_parallel, mix_equal, save_corpus,
    save_parallel, PAD, UNK, EOS, DUMMY,
)


def _pair(src: str, tgt: str, prov=None) -> ParallelPair:
    return ParallelPair(Sentence.from_text(src), Sentence.from_text(tgt),
                        prov or Provenance.natural())


class TestTokenAndSentence:
    def test_rejects_empty_surface(self):
        with pytest.raises(CorpusError):
            Token("")

    def test_rejects_whitespace(self):
        with pytest.raises(CorpusError):
            Token("a b")

    def test_marked_flag_from_marker(self):
        s = Sentence.from_text("@trg@resume plain", marker="@trg@")
        assert s.tokens[0].marked and not s.tokens[1].marked

    def test_empty_sentence_rejected(self):
        with pytest.raises(CorpusError):
            Sentence(())


class TestLoadCorpus:
    def test_basic_load(self, tmp_path):
        p = tmp_path / "mono.txt"
        p.write_text("a b\nc\n", encoding="utf-8")
        corpus = load_corpus(p)
        assert len(corpus) == 2
        assert corpus[0].surfaces == ("a", "b")
        vocab = Vocabulary.build(corpus)
        assert {"a", "b", "c"} <= set(vocab.tokens())
        assert len(vocab) == 4 + 3

    def test_blank_line_error_names_line(self, tmp_path):
        p = tmp_path / "mono.txt"
        p.write_text("a b\n\nc\n", encoding="utf-8")
        with pytest.raises(CorpusError, match="line 2"):
            load_corpus(p)

    def test_duplicates_kept(self, tmp_path):
        p = tmp_path / "mono.txt"
        p.write_text("x y\nx y\n", encoding="utf-8")
        assert len(load_corpus(p)) == 2

    def test_empty_file_rejected(self, tmp_path):
        p = tmp_path / "mono.txt"
        p.write_text("", encoding="utf-8")
        with pytest.raises(CorpusError, match="empty"):
            load_corpus(p)


class TestParallelIO:
    def test_roundtrip_identity(self, tmp_path):
        pairs = (
            _pair("a b", "x y"),
            _pair("c", "z", Provenance.back_translated("rule-good")),
            _pair("d d", "w", Provenance.noised(Provenance.copy_marked())),
            _pair("e", "v v v", Provenance.copy_dummies()),
        )
        corpus = ParallelCorpus(pairs)
        path = tmp_path / "par.tsv"
        save_parallel(corpus, path)
        assert load_parallel(path) == corpus

    def test_copy_marked_tag_is_literal(self, tmp_path):
        corpus = ParallelCorpus((_pair("a", "x", Provenance.copy_marked()),))
        path = tmp_path / "par.tsv"
        save_parallel(corpus, path)
        assert path.read_text().strip().endswith("\tCopyMarked")

    def test_extra_columns_rejected(self, tmp_path):
        path = tmp_path / "par.tsv"
        path.write_text("a\tb\tNatural\textra\n", encoding="utf-8")
        with pytest.raises(CorpusError, match="4 columns"):
            load_parallel(path)

    def test_empty_side_rejected(self, tmp_path):
        path = tmp_path / "par.tsv"
        path.write_text("a\t\tNatural\n", encoding="utf-8")
        with pytest.raises(CorpusError, match="empty side"):
            load_parallel(path)

    def test_mono_roundtrip(self, tmp_path):
        corpus = Corpus((Sentence.from_text("a b"), Sentence.from_text("c")))
        path = tmp_path / "mono.txt"
        save_corpus(corpus, path)
        assert load_corpus(path) == corpus


class TestProvenance:
    def test_tag_roundtrip(self):
        tags = [
            Provenance.natural(), Provenance.copy(), Provenance.copy_marked(),
            Provenance.copy_dummies(), Provenance.back_translated("sys-1"),
            Provenance.forward_translated("nmt"),
            Provenance.noised(Provenance.copy()),
            Provenance.noised(Provenance.back_translated("rule")),
        ]
        for prov in tags:
            assert Provenance.parse(prov.tag()) == prov

    def test_noised_wraps_only_non_noised(self):
        with pytest.raises(CorpusError):
            Provenance.noised(Provenance.noised(Provenance.copy()))

    def test_bad_tag_rejected(self):
        with pytest.raises(CorpusError):
            Provenance.parse("Shiny")


class TestVocabulary:
    def test_reserved_ids_stable(self):
        v = Vocabulary.build(Corpus((Sentence.from_text("b a a"),)))
        assert (PAD, UNK, EOS, DUMMY) == (0, 1, 2, 3)
        assert v.id_to_token(0) == "<pad>"
        assert v.lookup("missing") == UNK

    def test_frequency_then_lexicographic_order(self):
        corpus = Corpus((Sentence.from_text("b a a c c"),))
        v = Vocabulary.build(corpus)
        # a and c both occur twice: lexicographic tie-break; b once
        assert v.tokens()[4:] == ["a", "c", "b"]

    def test_min_freq_threshold(self):
        corpus = Corpus((Sentence.from_text("a a b"),))
        v = Vocabulary.build(corpus, min_freq=2)
        assert "a" in v and "b" not in v

    def test_include_chars_adds_alphabet(self):
        corpus = Corpus((Sentence.from_text("ab ab cd"),))
        v = Vocabulary.build(corpus, include_chars=True)
        for ch in "abcd":
            assert ch in v

    def test_save_load_identity(self, tmp_path):
        corpus = Corpus((Sentence.from_text("b a a ü"),))
        v = Vocabulary.build(corpus, marker="@xx@")
        path = tmp_path / "vocab.json"
        v.save(path)
        loaded = Vocabulary.load(path)
        assert loaded == v
        assert loaded.content_hash() == v.content_hash()
        for tok in v.tokens():
            assert loaded.lookup(tok) == v.lookup(tok)

    def test_continuation_suffix_resolves_to_base(self):
        v = Vocabulary.build(Corpus((Sentence.from_text("re sume"),)))
        assert v.lookup("re@@") == v.lookup("re")
        assert v.lookup("zz@@") == UNK

    def test_extension_collision_rejected(self):
        v = Vocabulary.build(Corpus((Sentence.from_text("a"),)))
        with pytest.raises(CorpusError, match="collides"):
            v.extended(["a"])

    def test_extension_appends_after_existing(self):
        v = Vocabulary.build(Corpus((Sentence.from_text("a"),)))
        w = v.extended(["@trg@a"])
        assert w.lookup("a") == v.lookup("a")
        assert w.lookup("@trg@a") == len(v)

    def test_encode_appends_eos(self):
        v = Vocabulary.build(Corpus((Sentence.from_text("a b"),)))
        ids = v.encode(("a", "b", "zzz"))
        assert ids[-1] == EOS and ids[2] == UNK


class TestMixEqual:
    @staticmethod
    def _corpora():
        in_pairs = tuple(_pair(f"i{k}", f"ti{k}", Provenance.copy()) for k in range(40))
        out_pairs = tuple(_pair(f"o{k}", f"to{k}") for k in range(160))
        return ParallelCorpus(in_pairs), ParallelCorpus(out_pairs)

    def test_counts(self):
        in_c, out_c = self._corpora()
        mixed = mix_equal(in_c, out_c, seed=3)
        assert len(mixed) == 80
        n_out = sum(1 for p in mixed if p.provenance.kind == "Natural")
        assert n_out == 40
        # every in-domain pair appears exactly once
        in_sources = sorted(p.source.text() for p in mixed if p.provenance.kind == "Copy")
        assert in_sources == sorted(p.source.text() for p in in_c)

    def test_deterministic(self):
        in_c, out_c = self._corpora()
        assert mix_equal(in_c, out_c, seed=5) == mix_equal(in_c, out_c, seed=5)
        assert mix_equal(in_c, out_c, seed=5) != mix_equal(in_c, out_c, seed=6)

    def test_equal_sizes_uses_whole_union(self):
        in_c, out_c = self._corpora()
        out_small = ParallelCorpus(out_c.pairs[:40])
        mixed = mix_equal(in_c, out_small, seed=0)
        assert len(mixed) == 80
        assert sorted(p.source.text() for p in mixed) == sorted(
            p.source.text() for p in in_c.pairs + out_small.pairs)

    def test_out_domain_too_small(self):
        in_c, out_c = self._corpora()
        with pytest.raises(CorpusError, match="too small"):
            mix_equal(in_c, ParallelCorpus(out_c.pairs[:10]), seed=0)
