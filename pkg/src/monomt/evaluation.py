"""Corpus-level BLEU and experiment result tables.

Inputs are pre-tokenized corpora; no normalization happens here. BLEU uses
clipped modified n-gram precision up to 4-grams with the standard brevity
penalty. Default is unsmoothed; "add-one-on-zero" substitutes
(matches + 1) / (candidates + 1) for any order with zero matches, which
keeps very short toy outputs comparable.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .corpus import Corpus, CorpusError

MAX_ORDER = 4


@dataclass(frozen=True)
class BleuResult:
    score: float  # in [0, 100]
    precisions: tuple[float, float, float, float]
    brevity_penalty: float
    hyp_length: int
    ref_length: int

    def __str__(self) -> str:
        pn = "/".join(f"{100 * p:.1f}" for p in self.precisions)
        return (f"BLEU = {self.score:.2f} {pn} "
                f"(BP = {self.brevity_penalty:.3f}, hyp_len = {self.hyp_length}, "
                f"ref_len = {self.ref_length})")


def _ngrams(tokens, n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def corpus_bleu(hypotheses: Corpus, references: Corpus,
                smoothing: str = "none") -> BleuResult:
    """Corpus BLEU over aligned hypothesis/reference sentences."""
    if smoothing not in ("none", "add-one-on-zero"):
        raise ValueError(f"unknown smoothing {smoothing!r}")
    if len(hypotheses) != len(references):
        raise CorpusError(
            f"corpus size mismatch: {len(hypotheses)} hypotheses vs "
            f"{len(references)} references")
    if len(hypotheses) == 0:
        raise CorpusError("empty corpora")

    correct = [0] * MAX_ORDER
    total = [0] * MAX_ORDER
    hyp_len = ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        h = hyp.surfaces
        r = ref.surfaces
        hyp_len += len(h)
        ref_len += len(r)
        for n in range(1, MAX_ORDER + 1):
            hyp_counts = _ngrams(h, n)
            if not hyp_counts:
                continue
            ref_counts = _ngrams(r, n)
            total[n - 1] += sum(hyp_counts.values())
            correct[n - 1] += sum(min(c, ref_counts[g]) for g, c in hyp_counts.items())

    precisions = []
    for c, t in zip(correct, total):
        if smoothing == "add-one-on-zero" and c == 0:
            precisions.append((c + 1) / (t + 1))
        else:
            precisions.append(c / t if t > 0 else 0.0)

    if hyp_len == 0:
        return BleuResult(0.0, tuple(precisions), 0.0, hyp_len, ref_len)
    bp = 1.0 if hyp_len >= ref_len else math.exp(1.0 - ref_len / hyp_len)
    if all(p > 0.0 for p in precisions):
        score = 100.0 * bp * math.exp(sum(math.log(p) for p in precisions) / MAX_ORDER)
    else:
        score = 0.0
    return BleuResult(score, tuple(precisions), bp, hyp_len, ref_len)


def result_table(runs: list[tuple[str, dict[str, BleuResult]]]) -> tuple[str, str]:
    """Render (name, {test set: BleuResult}) rows as TSV and aligned text.

    Column order is first-appearance order over the runs; missing cells
    render as "-". Output is byte-deterministic for identical input.
    """
    columns: list[str] = []
    for _, results in runs:
        for name in results:
            if name not in columns:
                columns.append(name)

    header = ["system"] + columns
    rows = [header]
    for name, results in runs:
        row = [name]
        for col in columns:
            res = results.get(col)
            row.append(f"{res.score:.2f}" if res is not None else "-")
        rows.append(row)

    tsv = "\n".join("\t".join(row) for row in rows) + "\n"
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    text = "\n".join(
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
        for row in rows) + "\n"
    return tsv, text
