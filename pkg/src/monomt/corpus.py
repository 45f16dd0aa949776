"""Data model and IO for monolingual and parallel corpora with provenance.

All corpus values are immutable after construction and safe to share across
threads. File formats: plain text, one whitespace-tokenized sentence per
line, for monolingual data; three-column TSV (source, target, provenance
tag) for parallel data. UTF-8 throughout.
"""

from __future__ import annotations

import hashlib
import json
import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

PAD, UNK, EOS, DUMMY = 0, 1, 2, 3
RESERVED = ("<pad>", "<unk>", "</s>", "<dummy>")
DEFAULT_MARKER = "@trg@"
CONTINUATION = "@@"


class CorpusError(ValueError):
    """Malformed corpus input (bad line, bad tag, empty side)."""


@dataclass(frozen=True)
class Token:
    """A whitespace-free surface string, optionally carrying the target-language marker."""

    surface: str
    marked: bool = False

    def __post_init__(self):
        if not self.surface:
            raise CorpusError("empty token surface")
        if any(c.isspace() for c in self.surface):
            raise CorpusError(f"token contains whitespace: {self.surface!r}")


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]

    def __post_init__(self):
        if not self.tokens:
            raise CorpusError("empty sentence")

    @classmethod
    def from_text(cls, text: str, marker: str | None = None) -> "Sentence":
        return cls.from_surfaces(text.split(), marker=marker)

    @classmethod
    def from_surfaces(cls, surfaces, marker: str | None = None) -> "Sentence":
        return cls(tuple(
            Token(s, marked=bool(marker) and s.startswith(marker)) for s in surfaces
        ))

    @property
    def surfaces(self) -> tuple[str, ...]:
        return tuple(t.surface for t in self.tokens)

    def text(self) -> str:
        return " ".join(self.surfaces)

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


@dataclass(frozen=True)
class Corpus:
    """An ordered collection of monolingual sentences."""

    sentences: tuple[Sentence, ...]

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def __getitem__(self, i):
        return self.sentences[i]


_TAG_RE = re.compile(r"^([A-Za-z]+)(?:\((.*)\))?$")
_SIMPLE_KINDS = ("Natural", "Copy", "CopyMarked", "CopyDummies")
_SYSTEM_KINDS = ("BackTranslated", "ForwardTranslated")


@dataclass(frozen=True)
class Provenance:
    """Origin tag of a parallel pair; Noised wraps exactly one non-Noised tag."""

    kind: str
    system_id: str | None = None
    base: "Provenance | None" = None

    def __post_init__(self):
        if self.kind in _SIMPLE_KINDS:
            if self.system_id is not None or self.base is not None:
                raise CorpusError(f"{self.kind} takes no argument")
        elif self.kind in _SYSTEM_KINDS:
            if not self.system_id or self.base is not None:
                raise CorpusError(f"{self.kind} requires a system id")
        elif self.kind == "Noised":
            if self.base is None or self.base.kind == "Noised":
                raise CorpusError("Noised wraps exactly one non-Noised tag")
        else:
            raise CorpusError(f"unknown provenance kind {self.kind!r}")

    @classmethod
    def natural(cls):
        return cls("Natural")

    @classmethod
    def copy(cls):
        return cls("Copy")

    @classmethod
    def copy_marked(cls):
        return cls("CopyMarked")

    @classmethod
    def copy_dummies(cls):
        return cls("CopyDummies")

    @classmethod
    def back_translated(cls, system_id: str):
        return cls("BackTranslated", system_id=system_id)

    @classmethod
    def forward_translated(cls, system_id: str):
        return cls("ForwardTranslated", system_id=system_id)

    @classmethod
    def noised(cls, base: "Provenance"):
        return cls("Noised", base=base)

    def tag(self) -> str:
        if self.kind in _SIMPLE_KINDS:
            return self.kind
        if self.kind in _SYSTEM_KINDS:
            return f"{self.kind}({self.system_id})"
        return f"Noised({self.base.tag()})"

    @classmethod
    def parse(cls, tag: str) -> "Provenance":
        m = _TAG_RE.match(tag.strip())
        if not m:
            raise CorpusError(f"bad provenance tag {tag!r}")
        kind, arg = m.group(1), m.group(2)
        if kind in _SIMPLE_KINDS and arg is None:
            return cls(kind)
        if kind in _SYSTEM_KINDS and arg:
            return cls(kind, system_id=arg)
        if kind == "Noised" and arg:
            return cls(kind, base=cls.parse(arg))
        raise CorpusError(f"bad provenance tag {tag!r}")


@dataclass(frozen=True)
class ParallelPair:
    source: Sentence
    target: Sentence
    provenance: Provenance


@dataclass(frozen=True)
class ParallelCorpus:
    pairs: tuple[ParallelPair, ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __getitem__(self, i):
        return self.pairs[i]

    def sources(self) -> Corpus:
        return Corpus(tuple(p.source for p in self.pairs))

    def targets(self) -> Corpus:
        return Corpus(tuple(p.target for p in self.pairs))

    def source_token_count(self) -> int:
        return sum(len(p.source) for p in self.pairs)


class Vocabulary:
    """Bijective token/id map with reserved symbols and a marker namespace.

    Ids 0..3 are PAD, UNK, EOS and DUMMY, stable across save/load. Remaining
    ids are assigned by descending frequency with lexicographic tie-break,
    so construction is deterministic. Entries starting with ``marker`` form
    the marked namespace; an unmarked entry may never equal a marked one.
    Lookup strips a trailing continuation suffix ("x@@" resolves to "x"),
    which is how greedy-segmented copy units map back onto known ids.
    """

    def __init__(self, tokens: list[str], marker: str = DEFAULT_MARKER):
        self.marker = marker
        self._id_to_token: list[str] = list(RESERVED)
        self._token_to_id: dict[str, int] = {t: i for i, t in enumerate(RESERVED)}
        for tok in tokens:
            self._add(tok)

    def _add(self, tok: str) -> int:
        if tok in self._token_to_id:
            raise CorpusError(f"duplicate vocabulary entry {tok!r}")
        self._token_to_id[tok] = len(self._id_to_token)
        self._id_to_token.append(tok)
        return self._token_to_id[tok]

    @classmethod
    def build(cls, corpora, min_freq: int = 1, include_chars: bool = False,
              marker: str = DEFAULT_MARKER) -> "Vocabulary":
        """Count token types over one or more corpora and assign ids."""
        if isinstance(corpora, Corpus):
            corpora = [corpora]
        counts: Counter[str] = Counter()
        for corpus in corpora:
            for sent in corpus:
                counts.update(sent.surfaces)
        kept = [t for t, c in counts.items() if c >= min_freq]
        if include_chars:
            chars = {c for t in counts for c in t}
            kept.extend(c for c in chars if c not in counts or counts[c] < min_freq)
        kept.sort(key=lambda t: (-counts.get(t, 0), t))
        return cls(kept, marker=marker)

    def extended(self, new_tokens) -> "Vocabulary":
        """A new vocabulary with ``new_tokens`` appended after existing ids."""
        vocab = Vocabulary.__new__(Vocabulary)
        vocab.marker = self.marker
        vocab._id_to_token = list(self._id_to_token)
        vocab._token_to_id = dict(self._token_to_id)
        for tok in new_tokens:
            if tok in vocab._token_to_id:
                raise CorpusError(f"vocabulary extension collides with entry {tok!r}")
            vocab._add(tok)
        return vocab

    def __len__(self) -> int:
        return len(self._id_to_token)

    def __contains__(self, tok: str) -> bool:
        return tok in self._token_to_id

    def lookup(self, surface: str) -> int:
        tid = self._token_to_id.get(surface)
        if tid is None and surface.endswith(CONTINUATION):
            tid = self._token_to_id.get(surface[: -len(CONTINUATION)])
        return UNK if tid is None else tid

    def id_to_token(self, tid: int) -> str:
        return self._id_to_token[tid]

    def encode(self, surfaces, append_eos: bool = True) -> list[int]:
        ids = [self.lookup(s) for s in surfaces]
        if append_eos:
            ids.append(EOS)
        return ids

    def tokens(self) -> list[str]:
        return list(self._id_to_token)

    def content_hash(self) -> str:
        payload = json.dumps({"marker": self.marker, "entries": self._id_to_token},
                             ensure_ascii=False).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()

    def save(self, path) -> None:
        payload = {"version": 1, "marker": self.marker, "entries": self._id_to_token}
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False, indent=0)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("version") != 1:
            raise CorpusError("unsupported vocabulary file version")
        entries = payload["entries"]
        if tuple(entries[:4]) != RESERVED:
            raise CorpusError("vocabulary file missing reserved symbols")
        vocab = cls(entries[4:], marker=payload["marker"])
        return vocab

    def __eq__(self, other) -> bool:
        return (isinstance(other, Vocabulary) and self.marker == other.marker
                and self._id_to_token == other._id_to_token)


def load_corpus(path, marker: str | None = None) -> Corpus:
    """Read a one-sentence-per-line monolingual file; reject blank lines."""
    sentences = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.split():
                raise CorpusError(f"{path}: line {lineno} has no tokens")
            sentences.append(Sentence.from_text(line, marker=marker))
    if not sentences:
        raise CorpusError(f"{path}: empty corpus file")
    return Corpus(tuple(sentences))


def save_corpus(corpus: Corpus, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for sent in corpus:
            fh.write(sent.text())
            fh.write("\n")


def load_parallel(path, marker: str | None = None) -> ParallelCorpus:
    """Read a source/target/provenance TSV; rows must have exactly 3 columns."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                raise CorpusError(f"{path}: line {lineno} is empty")
            cols = line.split("\t")
            if len(cols) != 3:
                raise CorpusError(f"{path}: line {lineno} has {len(cols)} columns, expected 3")
            src, tgt, tag = cols
            if not src.split() or not tgt.split():
                raise CorpusError(f"{path}: line {lineno} has an empty side")
            pairs.append(ParallelPair(
                Sentence.from_text(src, marker=marker),
                Sentence.from_text(tgt, marker=marker),
                Provenance.parse(tag),
            ))
    return ParallelCorpus(tuple(pairs))


def save_parallel(corpus: ParallelCorpus, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for pair in corpus:
            fh.write(f"{pair.source.text()}\t{pair.target.text()}\t{pair.provenance.tag()}\n")


def mix_equal(in_domain: ParallelCorpus, out_domain: ParallelCorpus, seed: int) -> ParallelCorpus:
    """Shuffled union of in-domain pairs and an equal-size out-domain sample.

    The out-domain subset is drawn uniformly without replacement; both the
    draw and the final shuffle are deterministic given ``seed``.
    """
    n = len(in_domain)
    if len(out_domain) < n:
        raise CorpusError(
            f"out-domain corpus too small: {len(out_domain)} < {n}")
    rng = np.random.default_rng(seed)
    picked = rng.choice(len(out_domain), size=n, replace=False)
    pool = list(in_domain.pairs) + [out_domain.pairs[i] for i in picked]
    order = rng.permutation(len(pool))
    return ParallelCorpus(tuple(pool[i] for i in order))
