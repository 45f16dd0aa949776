"""IBM Model 1 word alignment, Kendall-tau monotonicity, and data selection.

The lexical translation table is keyed by token surface (plus a NULL source
token) and trained with standard EM. Viterbi alignment links each target
position to its argmax source; NULL links are omitted, so monotonicity
scores only see positioned links.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .corpus import Corpus, CorpusError, ParallelCorpus, ParallelPair

NULL_TOKEN = "<null>"


@dataclass(frozen=True)
class Alignment:
    """Source/target position links, both 0-based, at most one per target."""

    links: tuple[tuple[int, int], ...]

    def to_pharaoh(self) -> str:
        return " ".join(f"{i}-{j}" for i, j in self.links)


class TranslationTable:
    """t(target | source) with per-source distributions summing to one."""

    def __init__(self, probs: dict[str, dict[str, float]], prob_floor: float = 1e-12):
        self.probs = probs
        self.prob_floor = prob_floor

    def prob(self, target: str, source: str) -> float:
        return self.probs.get(source, {}).get(target, self.prob_floor)

    def check_normalized(self, tol: float = 1e-9) -> None:
        for source, dist in self.probs.items():
            total = sum(dist.values())
            if abs(total - 1.0) > tol:
                raise AssertionError(f"t(.|{source}) sums to {total}")


def ibm1_train(corpus: ParallelCorpus, iterations: int,
               prob_floor: float = 1e-12,
               null_word: bool = True) -> tuple[TranslationTable, list[float]]:
    """EM for IBM Model 1, by default with a NULL source word.

    Returns the table and the per-iteration corpus log-likelihood, which is
    non-decreasing (evaluated under the parameters entering each iteration).
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if len(corpus) == 0:
        raise CorpusError("cannot train an aligner on an empty corpus")

    prefix = [NULL_TOKEN] if null_word else []
    pairs = [(prefix + list(p.source.surfaces), list(p.target.surfaces))
             for p in corpus]
    tgt_types = sorted({t for _, tgt in pairs for t in tgt})
    uniform = 1.0 / len(tgt_types)
    t: dict[str, dict[str, float]] = defaultdict(lambda: defaultdict(lambda: uniform))
    # restrict each source's distribution to co-occurring targets
    for src, tgt in pairs:
        for s in src:
            row = t[s]
            for w in tgt:
                row[w]  # touch to materialize

    log_likelihoods: list[float] = []
    for _ in range(iterations):
        counts: dict[str, dict[str, float]] = defaultdict(lambda: defaultdict(float))
        totals: dict[str, float] = defaultdict(float)
        ll = 0.0
        for src, tgt in pairs:
            for w in tgt:
                denom = sum(t[s][w] for s in src)
                ll += np.log(denom / len(src))
                for s in src:
                    post = t[s][w] / denom
                    counts[s][w] += post
                    totals[s] += post
        log_likelihoods.append(float(ll))
        for s, row in counts.items():
            norm = totals[s]
            t[s] = defaultdict(float, {w: c / norm for w, c in row.items()})

    table = TranslationTable({s: dict(row) for s, row in t.items()}, prob_floor=prob_floor)
    return table, log_likelihoods


def viterbi_align(table: TranslationTable, pair: ParallelPair) -> Alignment:
    """Link each target position to its most probable source position.

    Ties between source positions go to the smallest index; NULL wins only
    when strictly better than every positioned source, and produces no link.
    """
    links = []
    src = pair.source.surfaces
    for j, w in enumerate(pair.target.surfaces):
        best_i, best_p = None, -1.0
        for i, s in enumerate(src):
            p = table.prob(w, s)
            if p > best_p:
                best_i, best_p = i, p
        if table.prob(w, NULL_TOKEN) > best_p:
            continue
        links.append((best_i, j))
    return Alignment(tuple(links))


def kendall_tau_distance(alignment: Alignment) -> float:
    """Fraction of discordant source-position pairs in target order.

    0 is perfectly monotonic, 1 a full reversal; fewer than two links is
    defined as 0.
    """
    links = sorted(alignment.links, key=lambda ij: ij[1])
    n = len(links)
    if n < 2:
        return 0.0
    discordant = 0
    for a in range(n):
        for b in range(a + 1, n):
            if links[a][0] > links[b][0]:
                discordant += 1
    return discordant / (n * (n - 1) / 2)


def corpus_tau_distances(corpus: ParallelCorpus, table: TranslationTable) -> list[float]:
    return [kendall_tau_distance(viterbi_align(table, pair)) for pair in corpus]


def _take_to_budget(corpus: ParallelCorpus, order, token_budget: int) -> ParallelCorpus:
    total = corpus.source_token_count()
    if token_budget > total:
        raise CorpusError(f"token budget {token_budget} exceeds corpus size {total}")
    taken = []
    used = 0
    for idx in order:
        if used >= token_budget:
            break
        taken.append(corpus.pairs[idx])
        used += len(corpus.pairs[idx].source)
    return ParallelCorpus(tuple(taken))


def select_by_monotonicity(corpus: ParallelCorpus, table: TranslationTable,
                           token_budget: int) -> ParallelCorpus:
    """Most-monotonic pairs first, taken until the source-token budget is met.

    Ties on tau-distance prefer longer pairs, then corpus order.
    """
    taus = corpus_tau_distances(corpus, table)
    order = sorted(range(len(corpus)),
                   key=lambda i: (taus[i], -len(corpus.pairs[i].source), i))
    return _take_to_budget(corpus, order, token_budget)


def select_random(corpus: ParallelCorpus, token_budget: int, seed: int) -> ParallelCorpus:
    """Uniform shuffle, then greedy take to the source-token budget."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(corpus))
    return _take_to_budget(corpus, order, token_budget)


def save_pharaoh(alignments, path) -> None:
    """One pair per line in Pharaoh "i-j" format."""
    with open(path, "w", encoding="utf-8") as fh:
        for alignment in alignments:
            fh.write(alignment.to_pharaoh())
            fh.write("\n")


class IbmModel1(BaseEstimator):
    """Estimator-style wrapper: fit a lexical table, transform pairs to alignments."""

    def __init__(self, iterations: int = 10, prob_floor: float = 1e-12):
        self.iterations = iterations
        self.prob_floor = prob_floor

    def fit(self, X: ParallelCorpus, y=None) -> "IbmModel1":
        self.table_, self.log_likelihoods_ = ibm1_train(
            X, self.iterations, prob_floor=self.prob_floor)
        return self

    def align(self, pair: ParallelPair) -> Alignment:
        return viterbi_align(self.table_, pair)

    def transform(self, X: ParallelCorpus) -> list[Alignment]:
        return [viterbi_align(self.table_, pair) for pair in X]

    def score(self, X: ParallelCorpus, y=None) -> float:
        """Negative mean tau-distance: higher means more monotonic alignments."""
        taus = corpus_tau_distances(X, self.table_)
        return -float(np.mean(taus))
