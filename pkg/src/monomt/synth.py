"""Pseudo-parallel data generation: copies, marked copies, dummies, noise,
and back/forward translation through a translator abstraction.

Every scheme leaves the target side bit-identical to its input corpus; only
the source side is synthesized. Noise and rule-based reordering derive their
RNG from (seed, sentence index), so per-sentence transforms are pure and
independent of evaluation order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .corpus import (
    CONTINUATION, Corpus, CorpusError, ParallelCorpus, ParallelPair,
    Provenance, Sentence, Token, Vocabulary, RESERVED, UNK,
)

log = logging.getLogger(__name__)

UNK_SURFACE = RESERVED[UNK]
DUMMY_SURFACE = RESERVED[3]


def _is_lexical(surface: str, vocab: Vocabulary) -> bool:
    return surface in vocab and vocab.lookup(surface) >= len(RESERVED)


def segment_token(surface: str, vocab: Vocabulary) -> list[str]:
    """Greedy longest-match split of a token into known vocabulary units.

    Matching recurses down to single characters; characters absent from the
    vocabulary become the UNK surface. Non-final known units carry the
    continuation suffix so segmented output stays human-readable.
    """
    if _is_lexical(surface, vocab):
        return [surface]
    pieces: list[tuple[str, bool]] = []  # (surface, known)
    pos = 0
    while pos < len(surface):
        match = None
        for end in range(len(surface), pos, -1):
            cand = surface[pos:end]
            if _is_lexical(cand, vocab):
                match = cand
                break
        if match is None:
            pieces.append((UNK_SURFACE, False))
            pos += 1
        else:
            pieces.append((match, True))
            pos += len(match)
    out = []
    for i, (piece, known) in enumerate(pieces):
        final = i == len(pieces) - 1
        out.append(piece + CONTINUATION if known and not final else piece)
    return out


def make_copy(targets: Corpus, src_vocab: Vocabulary) -> ParallelCorpus:
    """Copy targets onto the source side, segmenting OOV tokens greedily."""
    pairs = []
    for sent in targets:
        surfaces: list[str] = []
        for tok in sent:
            surfaces.extend(segment_token(tok.surface, src_vocab))
        pairs.append(ParallelPair(Sentence.from_surfaces(surfaces), sent,
                                  Provenance.copy()))
    return ParallelCorpus(tuple(pairs))


def make_copy_marked(targets: Corpus, marker: str,
                     src_vocab: Vocabulary | None = None) -> tuple[ParallelCorpus, list[str]]:
    """Copy targets with every token prefixed by ``marker``.

    Returns the pseudo corpus plus the sorted list of new marked entries to
    append to the source vocabulary. When ``src_vocab`` is given, the marker
    must not be a prefix of any existing lexical entry.
    """
    if not marker:
        raise CorpusError("marker must be non-empty")
    if src_vocab is not None:
        for tok in src_vocab.tokens()[len(RESERVED):]:
            if tok.startswith(marker):
                raise CorpusError(f"marker collision: existing token {tok!r}")
    pairs = []
    types: set[str] = set()
    for sent in targets:
        marked = [Token(marker + t.surface, marked=True) for t in sent]
        types.update(t.surface for t in marked)
        pairs.append(ParallelPair(Sentence(tuple(marked)), sent,
                                  Provenance.copy_marked()))
    return ParallelCorpus(tuple(pairs)), sorted(types)


def make_copy_dummies(targets: Corpus) -> ParallelCorpus:
    """Length-preserving source of a single uninformative dummy type."""
    pairs = []
    for sent in targets:
        dummies = Sentence.from_surfaces([DUMMY_SURFACE] * len(sent))
        pairs.append(ParallelPair(dummies, sent, Provenance.copy_dummies()))
    return ParallelCorpus(tuple(pairs))


@dataclass(frozen=True)
class NoiseSpec:
    """Word-drop probability plus max permutation displacement."""

    p_drop: float = 0.1
    k: int = 3
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p_drop <= 1.0:
            raise ValueError(f"p_drop must be in [0, 1], got {self.p_drop}")
        if self.k < 0:
            raise ValueError(f"k must be >= 0, got {self.k}")


def _bounded_permutation(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    # add uniform jitter in [0, k+1) to each index, then stable-sort; every
    # token ends up displaced by at most k positions
    if k == 0 or n <= 1:
        return np.arange(n)
    keys = np.arange(n) + rng.uniform(0.0, k + 1, size=n)
    return np.argsort(keys, kind="stable")


def add_noise(sentence: Sentence, spec: NoiseSpec, index: int = 0) -> Sentence:
    """Delete tokens independently, then locally permute the survivors.

    Never returns an empty sentence: if every token would be deleted, the
    one with the highest survival draw is kept. Deterministic given
    (spec.seed, index).
    """
    rng = np.random.default_rng((spec.seed, index))
    n = len(sentence)
    draws = rng.random(n)
    keep = draws >= spec.p_drop
    if not keep.any():
        keep[int(np.argmax(draws))] = True
    survivors = [tok for tok, k in zip(sentence.tokens, keep) if k]
    order = _bounded_permutation(len(survivors), spec.k, rng)
    return Sentence(tuple(survivors[i] for i in order))


def noise_sources(corpus: ParallelCorpus, spec: NoiseSpec) -> ParallelCorpus:
    """Apply add_noise to every source side, wrapping provenance in Noised."""
    pairs = []
    for idx, pair in enumerate(corpus):
        pairs.append(ParallelPair(add_noise(pair.source, spec, index=idx),
                                  pair.target,
                                  Provenance.noised(pair.provenance)))
    return ParallelCorpus(tuple(pairs))


# ---------------------------------------------------------------------------
# translators


@dataclass
class RuleBased:
    """Word-for-word substitution with optional bounded local reordering.

    ``table`` maps an input token to zero or more output tokens (empty means
    the token is dropped); inputs outside the table come out as UNK.
    """

    table: dict[str, tuple[str, ...]]
    system_id: str = "rule"
    reorder_rate: float = 0.0
    reorder_window: int = 0
    seed: int = 0

    def translate_sentence(self, surfaces, index: int = 0) -> list[str]:
        out: list[str] = []
        for s in surfaces:
            out.extend(self.table.get(s, (UNK_SURFACE,)))
        if self.reorder_rate > 0.0 and self.reorder_window > 0 and len(out) > 1:
            rng = np.random.default_rng((self.seed, index))
            if rng.random() < self.reorder_rate:
                order = _bounded_permutation(len(out), self.reorder_window, rng)
                out = [out[i] for i in order]
        return out


@dataclass
class Degraded:
    """Wrap a translator with per-token substitution-to-UNK errors."""

    base: object
    error_rate: float
    system_id: str = "degraded"
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.error_rate <= 1.0:
            raise ValueError(f"error_rate must be in [0, 1], got {self.error_rate}")

    def translate_sentence(self, surfaces, index: int = 0) -> list[str]:
        out = self.base.translate_sentence(surfaces, index)
        rng = np.random.default_rng((self.seed, 7, index))
        return [UNK_SURFACE if rng.random() < self.error_rate else s for s in out]


def identity_translator(system_id: str = "identity") -> RuleBased:
    class _Identity(dict):
        def get(self, key, default=None):
            return (key,)

    return RuleBased(table=_Identity(), system_id=system_id)


def back_translate(targets: Corpus, translator) -> ParallelCorpus:
    """Pair each target sentence with its translation as the pseudo source."""
    pairs = []
    dropped = 0
    prov = Provenance.back_translated(translator.system_id)
    for idx, sent in enumerate(targets):
        out = translator.translate_sentence(sent.surfaces, idx)
        if not out:
            dropped += 1
            continue
        pairs.append(ParallelPair(Sentence.from_surfaces(out), sent, prov))
    if dropped:
        log.info("back_translate: dropped %d pairs with empty translations", dropped)
    return ParallelCorpus(tuple(pairs))


def forward_translate(sources: Corpus, translator) -> ParallelCorpus:
    """Pair each natural source with its translation as the pseudo target."""
    pairs = []
    dropped = 0
    prov = Provenance.forward_translated(translator.system_id)
    for idx, sent in enumerate(sources):
        out = translator.translate_sentence(sent.surfaces, idx)
        if not out:
            dropped += 1
            continue
        pairs.append(ParallelPair(sent, Sentence.from_surfaces(out), prov))
    if dropped:
        log.info("forward_translate: dropped %d pairs with empty translations", dropped)
    return ParallelCorpus(tuple(pairs))
