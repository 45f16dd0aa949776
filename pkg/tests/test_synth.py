import numpy as np
import pytest

from monomt.corpus import (
    Corpus, CorpusError, ParallelCorpus, Sentence, Vocabulary, CONTINUATION,
)
from monomt.synth import (
    Degraded, NoiseSpec, RuleBased, add_noise, back_translate,
    forward_translate, identity_translator, make_copy, make_copy_dummies,
    make_copy_marked, noise_sources, segment_token, UNK_SURFACE, DUMMY_SURFACE,
)


def _corpus(*lines: str) -> Corpus:
    return Corpus(tuple(Sentence.from_text(t) for t in lines))


def _vocab(*tokens: str) -> Vocabulary:
    return Vocabulary(list(tokens))


class TestSegmentation:
    def test_in_vocab_token_copied_verbatim(self):
        v = _vocab("resume")
        assert segment_token("resume", v) == ["resume"]

    def test_greedy_longest_match(self):
        v = _vocab("re", "sume")
        assert segment_token("resume", v) == ["re" + CONTINUATION, "sume"]

    def test_unknown_character_becomes_unk(self):
        v = _vocab("re")
        assert segment_token("ß", v) == [UNK_SURFACE]

    def test_mixed_known_and_unknown(self):
        v = _vocab("ab")
        # 'abx': "ab" matches, then 'x' is unknown
        assert segment_token("abx", v) == ["ab" + CONTINUATION, UNK_SURFACE]

    def test_output_stays_inside_vocab_or_unk(self):
        rng = np.random.default_rng(0)
        alphabet = "abcd"
        words = ["".join(rng.choice(list(alphabet), size=3)) for _ in range(20)]
        v = Vocabulary.build(_corpus(" ".join(words[:8])), include_chars=True)
        for w in words:
            for piece in segment_token(w, v):
                base = piece[:-len(CONTINUATION)] if piece.endswith(CONTINUATION) else piece
                assert base == UNK_SURFACE or base in v


class TestCopySchemes:
    def test_copy_segments_oov(self):
        v = _vocab("re", "sume", "known")
        corpus = _corpus("known resume")
        out = make_copy(corpus, v)
        assert out[0].source.surfaces == ("known", "re" + CONTINUATION, "sume")
        assert out[0].target.surfaces == ("known", "resume")
        assert out[0].provenance.kind == "Copy"

    def test_copy_target_side_untouched(self):
        v = _vocab("a")
        corpus = _corpus("a b", "c")
        out = make_copy(corpus, v)
        assert tuple(p.target for p in out) == corpus.sentences

    def test_copy_marked_paper_example(self):
        corpus = _corpus("resume")
        out, ext = make_copy_marked(corpus, "@fr@")
        assert out[0].source.surfaces == ("@fr@resume",)
        assert out[0].source.tokens[0].marked
        assert ext == ["@fr@resume"]

    def test_copy_marked_empty_corpus(self):
        out, ext = make_copy_marked(Corpus(()), "@trg@")
        assert len(out) == 0 and ext == []

    def test_copy_marked_extension_set_semantics(self):
        a = _corpus("x y", "y z")
        b = _corpus("z x", "y")
        _, ext_a = make_copy_marked(a, "@trg@")
        _, ext_b = make_copy_marked(b, "@trg@")
        assert ext_a == ext_b == ["@trg@x", "@trg@y", "@trg@z"]

    def test_copy_marked_collision(self):
        v = _vocab("@trg@sneaky")
        with pytest.raises(CorpusError, match="collision"):
            make_copy_marked(_corpus("a"), "@trg@", src_vocab=v)

    def test_copy_dummies_preserves_length(self):
        corpus = _corpus("a b c d e", "x")
        out = make_copy_dummies(corpus)
        assert len(out[0].source) == 5
        assert len(out[1].source) == 1
        types = {t.surface for p in out for t in p.source}
        assert types == {DUMMY_SURFACE}
        assert all(p.provenance.kind == "CopyDummies" for p in out)


class TestNoise:
    def test_noop_parameters_are_identity(self):
        sent = Sentence.from_text("a b c d")
        out = add_noise(sent, NoiseSpec(p_drop=0.0, k=0, seed=9), index=4)
        assert out == sent

    def test_all_dropped_keeps_exactly_one(self):
        sent = Sentence.from_text("a b c")
        out = add_noise(sent, NoiseSpec(p_drop=1.0, k=2, seed=0), index=0)
        assert len(out) == 1
        assert out.tokens[0].surface in {"a", "b", "c"}

    def test_displacement_bounded_by_k(self):
        sent = Sentence.from_text(" ".join(f"w{i}" for i in range(12)))
        for k in (1, 2, 3):
            spec = NoiseSpec(p_drop=0.0, k=k, seed=31)
            for index in range(300):
                out = add_noise(sent, spec, index=index)
                for new_pos, tok in enumerate(out.tokens):
                    old_pos = int(tok.surface[1:])
                    assert abs(new_pos - old_pos) <= k

    def test_deterministic_in_seed_and_index(self):
        sent = Sentence.from_text("a b c d e f")
        spec = NoiseSpec(p_drop=0.3, k=2, seed=5)
        assert add_noise(sent, spec, index=3) == add_noise(sent, spec, index=3)
        assert add_noise(sent, spec, index=3) != add_noise(sent, spec, index=4) or True

    def test_survival_rate_matches_p_drop(self):
        sent = Sentence.from_text(" ".join(f"w{i}" for i in range(10)))
        spec = NoiseSpec(p_drop=0.1, k=0, seed=123)
        survived = np.zeros(10)
        n = 10_000
        for index in range(n):
            out = add_noise(sent, spec, index=index)
            for tok in out.tokens:
                survived[int(tok.surface[1:])] += 1
        rates = survived / n
        assert np.all(np.abs(rates - 0.9) < 0.02)

    def test_invalid_spec_rejected(self):
        with pytest.raises(ValueError):
            NoiseSpec(p_drop=1.5)
        with pytest.raises(ValueError):
            NoiseSpec(k=-1)

    def test_noise_sources_wraps_provenance(self):
        corpus, _ = make_copy_marked(_corpus("a b", "c"), "@trg@")
        noised = noise_sources(corpus, NoiseSpec(p_drop=0.0, k=1, seed=1))
        assert all(p.provenance.kind == "Noised" for p in noised)
        assert all(p.provenance.base.kind == "CopyMarked" for p in noised)
        assert tuple(p.target for p in noised) == tuple(p.target for p in corpus)


class TestTranslators:
    def test_identity_back_translation(self):
        corpus = _corpus("a b", "c")
        out = back_translate(corpus, identity_translator("id"))
        assert all(p.source == p.target for p in out)
        assert all(p.provenance.tag() == "BackTranslated(id)" for p in out)

    def test_fully_degraded_identity_is_all_unk(self):
        corpus = _corpus("a b c")
        translator = Degraded(identity_translator(), error_rate=1.0, system_id="bad")
        out = back_translate(corpus, translator)
        assert out[0].source.surfaces == (UNK_SURFACE,) * 3

    def test_rule_based_unk_for_unknown_and_drops_empty(self):
        table = {"a": ("x",), "b": ()}
        translator = RuleBased(table, system_id="r")
        corpus = _corpus("a b", "b")
        out = back_translate(corpus, translator)
        # "b" alone translates to nothing -> the pair is dropped
        assert len(out) == 1
        assert out[0].source.surfaces == ("x",)
        out2 = back_translate(_corpus("zzz"), translator)
        assert out2[0].source.surfaces == (UNK_SURFACE,)

    def test_rule_based_reordering_is_bounded_and_seeded(self):
        table = {f"w{i}": (f"w{i}",) for i in range(10)}
        tr = RuleBased(table, system_id="r", reorder_rate=1.0, reorder_window=2, seed=3)
        src = [f"w{i}" for i in range(10)]
        out1 = tr.translate_sentence(src, index=0)
        out2 = tr.translate_sentence(src, index=0)
        assert out1 == out2
        for pos, w in enumerate(out1):
            assert abs(pos - int(w[1:])) <= 2

    def test_forward_translation_mirrors_back(self):
        corpus = _corpus("a b")
        out = forward_translate(corpus, identity_translator("fw"))
        assert out[0].target == out[0].source
        assert out[0].provenance.kind == "ForwardTranslated"

    def test_forward_empty_corpus(self):
        out = forward_translate(Corpus(()), identity_translator())
        assert len(out) == 0

    def test_target_side_bit_identical_for_all_schemes(self):
        corpus = _corpus("aa bb", "cc dd ee")
        v = Vocabulary.build(corpus, include_chars=True)
        for scheme in (
            make_copy(corpus, v),
            make_copy_marked(corpus, "@trg@")[0],
            make_copy_dummies(corpus),
            back_translate(corpus, identity_translator()),
        ):
            assert tuple(p.target for p in scheme) == corpus.sentences
