import itertools
from collections import defaultdict

import numpy as np
import pytest
from sklearn.base import clone

from monomt.align import (
    Alignment, IbmModel1, NULL_TOKEN, TranslationTable, corpus_tau_distances,
    ibm1_train, kendall_tau_distance, save_pharaoh, select_by_monotonicity,
    select_random, viterbi_align,
)
from monomt.corpus import (
    CorpusError, ParallelCorpus, ParallelPair, Provenance, Sentence,
)


def _pair(src: str, tgt: str) -> ParallelPair:
    return ParallelPair(Sentence.from_text(src), Sentence.from_text(tgt),
                        Provenance.natural())


def _two_pair_corpus() -> ParallelCorpus:
    return ParallelCorpus((_pair("a", "x"), _pair("a b", "x y")))


def _hand_em_one_step(corpus, null_word):
    """Independent single EM iteration from uniform init, dict arithmetic only."""
    prefix = [NULL_TOKEN] if null_word else []
    pairs = [(prefix + list(p.source.surfaces), list(p.target.surfaces)) for p in corpus]
    tgt_types = sorted({w for _, t in pairs for w in t})
    uniform = 1.0 / len(tgt_types)
    counts = defaultdict(lambda: defaultdict(float))
    totals = defaultdict(float)
    for src, tgt in pairs:
        for w in tgt:
            denom = uniform * len(src)
            for s in src:
                counts[s][w] += uniform / denom
                totals[s] += uniform / denom
    return {s: {w: c / totals[s] for w, c in row.items()} for s, row in counts.items()}


class TestIbm1Em:
    def test_two_pair_example_converges(self):
        table, _ = ibm1_train(_two_pair_corpus(), 30)
        assert table.prob("x", "a") > 0.9  # -> 1 as iterations grow

    def test_classic_no_null_form_converges_fast(self):
        table, _ = ibm1_train(_two_pair_corpus(), 20, null_word=False)
        assert table.prob("x", "a") > 0.99

    @pytest.mark.parametrize("null_word", [True, False])
    def test_one_iteration_matches_hand_em(self, null_word):
        corpus = ParallelCorpus((_pair("a", "x"), _pair("a b", "x y"),
                                 _pair("b c", "y z")))
        table, _ = ibm1_train(corpus, 1, null_word=null_word)
        expected = _hand_em_one_step(corpus, null_word)
        for s, row in expected.items():
            for w, p in row.items():
                assert table.prob(w, s) == pytest.approx(p, rel=1e-12)

    def test_log_likelihood_non_decreasing(self):
        rng = np.random.default_rng(17)
        vocab_src = [f"s{i}" for i in range(12)]
        vocab_tgt = [f"t{i}" for i in range(12)]
        pairs = []
        for _ in range(30):
            n = rng.integers(2, 6)
            idx = rng.integers(0, 12, size=n)
            pairs.append(_pair(" ".join(vocab_src[i] for i in idx),
                               " ".join(vocab_tgt[i] for i in idx)))
        _, lls = ibm1_train(ParallelCorpus(tuple(pairs)), 10)
        for earlier, later in zip(lls, lls[1:]):
            assert later >= earlier - 1e-9

    def test_normalization(self):
        table, _ = ibm1_train(_two_pair_corpus(), 5)
        table.check_normalized()

    def test_empty_corpus_rejected(self):
        with pytest.raises(CorpusError):
            ibm1_train(ParallelCorpus(()), 5)


class TestViterbi:
    @staticmethod
    def _table(rows):
        return TranslationTable(rows)

    def test_identity_dominant_table(self):
        table = self._table({
            "a": {"a": 0.9, "b": 0.1}, "b": {"a": 0.1, "b": 0.9},
            NULL_TOKEN: {"a": 0.01, "b": 0.01},
        })
        alignment = viterbi_align(table, _pair("a b", "a b"))
        assert alignment.links == ((0, 0), (1, 1))

    def test_null_preferring_table_gives_empty_links(self):
        table = self._table({
            "a": {"x": 0.1}, NULL_TOKEN: {"x": 0.9},
        })
        alignment = viterbi_align(table, _pair("a", "x x"))
        assert alignment.links == ()

    def test_tie_breaks_to_smaller_source_position(self):
        table = self._table({
            "a": {"y": 0.5}, "b": {"y": 0.5}, NULL_TOKEN: {"y": 0.1},
        })
        alignment = viterbi_align(table, _pair("a b", "y"))
        assert alignment.links == ((0, 0),)

    def test_unseen_pairs_fall_back_to_floor(self):
        table = self._table({"a": {"x": 1.0}})
        alignment = viterbi_align(table, _pair("a", "zzz"))
        # floor everywhere: position 0 wins the tie against NULL
        assert alignment.links == ((0, 0),)

    def test_pharaoh_dump(self, tmp_path):
        alignments = [Alignment(((0, 0), (2, 1))), Alignment(())]
        path = tmp_path / "aln.txt"
        save_pharaoh(alignments, path)
        assert path.read_text() == "0-0 2-1\n\n"


class TestKendallTau:
    def test_monotone_is_zero(self):
        assert kendall_tau_distance(Alignment(((0, 0), (1, 1), (2, 2)))) == 0.0

    def test_full_reversal_is_one(self):
        assert kendall_tau_distance(Alignment(((2, 0), (1, 1), (0, 2)))) == 1.0

    def test_single_swap_matches_bruteforce(self):
        links = ((0, 0), (2, 1), (1, 2))
        ordered = sorted(links, key=lambda ij: ij[1])
        discordant = sum(1 for a, b in itertools.combinations(ordered, 2)
                         if a[0] > b[0])
        n = len(links)
        expected = discordant / (n * (n - 1) / 2)
        assert expected == pytest.approx(1 / 3)
        assert kendall_tau_distance(Alignment(links)) == pytest.approx(expected)

    def test_random_alignments_match_bruteforce(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = int(rng.integers(2, 8))
            srcs = rng.integers(0, 10, size=n)
            links = tuple((int(s), j) for j, s in enumerate(srcs))
            ordered = sorted(links, key=lambda ij: ij[1])
            expected = sum(1 for a, b in itertools.combinations(ordered, 2)
                           if a[0] > b[0]) / (n * (n - 1) / 2)
            assert kendall_tau_distance(Alignment(links)) == pytest.approx(expected)

    def test_depends_only_on_positions(self):
        # relabeling tokens cannot change the score: it never sees tokens
        links = ((3, 0), (1, 1), (2, 2))
        assert kendall_tau_distance(Alignment(links)) == kendall_tau_distance(
            Alignment(tuple(links)))

    def test_fewer_than_two_links_is_zero(self):
        assert kendall_tau_distance(Alignment(())) == 0.0
        assert kendall_tau_distance(Alignment(((4, 0),))) == 0.0


def _selection_corpus():
    # five monotone pairs and five reversed pairs over a shared lexicon
    pairs = []
    for k in range(5):
        pairs.append(_pair("s1 s2 s3", "t1 t2 t3"))
        pairs.append(_pair("s3 s2 s1", "t1 t2 t3"))
    return ParallelCorpus(tuple(pairs))


class TestSelection:
    def test_full_budget_returns_whole_corpus(self):
        corpus = _selection_corpus()
        table, _ = ibm1_train(corpus, 10)
        out = select_by_monotonicity(corpus, table, corpus.source_token_count())
        assert sorted(p.source.text() for p in out) == sorted(
            p.source.text() for p in corpus)

    def test_monotone_pair_taken_first(self):
        corpus = ParallelCorpus((_pair("s1 s2", "t1 t2"), _pair("s2 s1", "t1 t2")))
        table = TranslationTable({
            "s1": {"t1": 0.9, "t2": 0.1}, "s2": {"t1": 0.1, "t2": 0.9},
            NULL_TOKEN: {"t1": 0.01, "t2": 0.01},
        })
        out = select_by_monotonicity(corpus, table, 2)
        assert len(out) == 1
        assert out[0].source.text() == "s1 s2"

    def test_selection_more_monotonic_than_random(self):
        corpus = _selection_corpus()
        table, _ = ibm1_train(corpus, 10)
        budget = 15
        chosen = select_by_monotonicity(corpus, table, budget)
        random_pick = select_random(corpus, budget, seed=5)
        mean_sel = np.mean(corpus_tau_distances(chosen, table))
        mean_rand = np.mean(corpus_tau_distances(random_pick, table))
        assert mean_sel <= mean_rand

    def test_budget_exceeding_corpus_rejected(self):
        corpus = _selection_corpus()
        table, _ = ibm1_train(corpus, 2)
        with pytest.raises(CorpusError, match="budget"):
            select_by_monotonicity(corpus, table, corpus.source_token_count() + 1)

    def test_random_selection_deterministic(self):
        corpus = _selection_corpus()
        a = select_random(corpus, 9, seed=11)
        b = select_random(corpus, 9, seed=11)
        assert a == b

    def test_random_budget_zero_is_empty(self):
        assert len(select_random(_selection_corpus(), 0, seed=0)) == 0

    def test_random_prefix_property(self):
        corpus = _selection_corpus()
        small = select_random(corpus, 6, seed=2)
        large = select_random(corpus, 12, seed=2)
        assert large.pairs[:len(small)] == small.pairs


class TestEstimator:
    def test_fit_transform(self):
        corpus = _selection_corpus()
        model = IbmModel1(iterations=5).fit(corpus)
        alignments = model.transform(corpus)
        assert len(alignments) == len(corpus)
        assert model.log_likelihoods_[-1] >= model.log_likelihoods_[0]

    def test_get_params_and_clone(self):
        model = IbmModel1(iterations=3, prob_floor=1e-10)
        assert model.get_params() == {"iterations": 3, "prob_floor": 1e-10}
        twin = clone(model)
        assert twin.get_params() == model.get_params()

    def test_score_is_negative_mean_tau(self):
        corpus = _selection_corpus()
        model = IbmModel1(iterations=10).fit(corpus)
        taus = corpus_tau_distances(corpus, model.table_)
        assert model.score(corpus) == pytest.approx(-np.mean(taus))
