"""Distributional corpus diagnostics: length ratios, vocabulary growth,
token/type concentration.

All statistics are order-invariant except vocab_growth, which by design
follows corpus order (pass a pre-shuffled corpus for order-free curves).
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass

from .corpus import Corpus, CorpusError, ParallelCorpus


@dataclass(frozen=True)
class LengthRatioReport:
    src_shorter: int
    equal: int
    src_longer: int
    histogram: tuple[tuple[int, int], ...]  # (len_src - len_tgt, count), sorted

    def to_dict(self) -> dict:
        return {
            "src_shorter": self.src_shorter,
            "equal": self.equal,
            "src_longer": self.src_longer,
            "histogram": {str(d): c for d, c in self.histogram},
        }

    def to_rows(self) -> list[tuple]:
        rows = [("src_shorter", self.src_shorter), ("equal", self.equal),
                ("src_longer", self.src_longer)]
        rows.extend((f"diff_{d}", c) for d, c in self.histogram)
        return rows


@dataclass(frozen=True)
class GrowthCurve:
    points: tuple[tuple[int, int], ...]  # (sentences_seen, types_seen)

    def to_dict(self) -> dict:
        return {"points": [list(p) for p in self.points]}

    def to_rows(self) -> list[tuple]:
        return [(s, t) for s, t in self.points]


@dataclass(frozen=True)
class TokenTypeStats:
    tokens: int
    types: int
    hapax: int
    top_k_mass: float

    def to_dict(self) -> dict:
        return {"tokens": self.tokens, "types": self.types,
                "hapax": self.hapax, "top_k_mass": self.top_k_mass}

    def to_rows(self) -> list[tuple]:
        return list(self.to_dict().items())


def length_ratio_report(corpus: ParallelCorpus) -> LengthRatioReport:
    """Tally per-pair source/target length comparisons."""
    if len(corpus) == 0:
        raise CorpusError("length_ratio_report needs a non-empty corpus")
    shorter = equal = longer = 0
    hist: Counter[int] = Counter()
    for pair in corpus:
        diff = len(pair.source) - len(pair.target)
        hist[diff] += 1
        if diff < 0:
            shorter += 1
        elif diff == 0:
            equal += 1
        else:
            longer += 1
    return LengthRatioReport(shorter, equal, longer,
                             tuple(sorted(hist.items())))


def vocab_growth(corpus: Corpus, step: int = 1) -> GrowthCurve:
    """Cumulative distinct-type count sampled every ``step`` sentences."""
    if step < 1:
        raise ValueError("step must be >= 1")
    seen: set[str] = set()
    points = []
    for i, sent in enumerate(corpus, start=1):
        seen.update(sent.surfaces)
        if i % step == 0 or i == len(corpus):
            if points and points[-1][0] == i:
                continue
            points.append((i, len(seen)))
    return GrowthCurve(tuple(points))


def token_type_stats(corpus: Corpus, top_k: int = 100) -> TokenTypeStats:
    """Token/type/hapax totals plus the mass of the ``top_k`` frequent types."""
    counts: Counter[str] = Counter()
    for sent in corpus:
        counts.update(sent.surfaces)
    tokens = sum(counts.values())
    types = len(counts)
    hapax = sum(1 for c in counts.values() if c == 1)
    if tokens == 0:
        return TokenTypeStats(0, 0, 0, 0.0)
    top_mass = sum(c for _, c in counts.most_common(top_k)) / tokens
    return TokenTypeStats(tokens, types, hapax, top_mass)


def write_report(report, base_path) -> tuple[str, str]:
    """Emit a report as sibling .json and .tsv files; returns their paths."""
    json_path = f"{base_path}.json"
    tsv_path = f"{base_path}.tsv"
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(tsv_path, "w", encoding="utf-8") as fh:
        for row in report.to_rows():
            fh.write("\t".join(str(x) for x in row))
            fh.write("\n")
    return json_path, tsv_path
