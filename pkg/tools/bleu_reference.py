"""Reference BLEU used once to freeze test fixtures.

Trimmed from sacreBLEU 1.3.5 (Matt Post, Apache-2.0): corpus BLEU on
pre-tokenized input, no smoothing, no tokenization. Kept verbatim in
spirit so fixture regeneration stays independent of the package's own
scorer (tools/make_bleu_fixtures.py).
"""

import math
from collections import Counter, namedtuple
from itertools import zip_longest

NGRAM_ORDER = 4

BLEU = namedtuple("BLEU", "score counts totals precisions bp sys_len ref_len")


def my_log(num):
    if num == 0.0:
        return -9999999999
    return math.log(num)


def extract_ngrams(line, min_order=1, max_order=NGRAM_ORDER) -> Counter:
    ngrams = Counter()
    tokens = line.split()
    for n in range(min_order, max_order + 1):
        for i in range(0, len(tokens) - n + 1):
            ngram = " ".join(tokens[i:i + n])
            ngrams[ngram] += 1
    return ngrams


def ref_stats(output, refs):
    ngrams = Counter()
    closest_diff = None
    closest_len = None
    for ref in refs:
        tokens = ref.split()
        reflen = len(tokens)
        diff = abs(len(output.split()) - reflen)
        if closest_diff is None or diff < closest_diff:
            closest_diff = diff
            closest_len = reflen
        elif diff == closest_diff:
            if reflen < closest_len:
                closest_len = reflen
        ngrams_ref = extract_ngrams(ref)
        for ngram in ngrams_ref.keys():
            ngrams[ngram] = max(ngrams[ngram], ngrams_ref[ngram])
    return ngrams, closest_diff, closest_len


def compute_bleu(correct, total, sys_len, ref_len) -> BLEU:
    precisions = [0 for _ in range(NGRAM_ORDER)]
    effective_order = NGRAM_ORDER
    for n in range(NGRAM_ORDER):
        if total[n] == 0:
            break
        if correct[n] == 0:
            pass
        else:
            precisions[n] = 100.0 * correct[n] / total[n]

    brevity_penalty = 1.0
    if sys_len < ref_len:
        brevity_penalty = math.exp(1 - ref_len / sys_len) if sys_len > 0 else 0.0

    bleu = brevity_penalty * math.exp(
        sum(map(my_log, precisions[:effective_order])) / effective_order)
    return BLEU(bleu, correct, total, precisions, brevity_penalty, sys_len, ref_len)


def corpus_bleu(sys_stream, ref_streams) -> BLEU:
    """BLEU over pre-tokenized segment streams, single or multiple refs."""
    if isinstance(sys_stream, str):
        sys_stream = [sys_stream]
    if isinstance(ref_streams, str):
        ref_streams = [[ref_streams]]

    sys_len = 0
    ref_len = 0
    correct = [0 for _ in range(NGRAM_ORDER)]
    total = [0 for _ in range(NGRAM_ORDER)]

    fhs = [sys_stream] + ref_streams
    for lines in zip_longest(*fhs):
        if None in lines:
            raise EOFError("Source and reference streams have different lengths!")
        output, *refs = lines
        ref_ngrams, closest_diff, closest_len = ref_stats(output, refs)
        sys_len += len(output.split())
        ref_len += closest_len
        sys_ngrams = extract_ngrams(output)
        for ngram in sys_ngrams.keys():
            n = len(ngram.split())
            correct[n - 1] += min(sys_ngrams[ngram], ref_ngrams.get(ngram, 0))
            total[n - 1] += sys_ngrams[ngram]

    return compute_bleu(correct, total, sys_len, ref_len)
