"""Generate the frozen BLEU oracle fixtures in tests/data/bleu_fixtures.json.

Run once; the committed fixtures are what the test suite checks against,
so the reference scorer never has to run at test time.
"""

import json
import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).parent))
from bleu_reference import corpus_bleu  # noqa: E402

OUT = pathlib.Path(__file__).parent.parent / "tests" / "data" / "bleu_fixtures.json"


def make_fixture(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    vocab = [f"w{i}" for i in range(25)]
    n_pairs = int(rng.integers(5, 12))
    hyps, refs = [], []
    for _ in range(n_pairs):
        n = int(rng.integers(6, 18))
        ref = [vocab[i] for i in rng.integers(0, len(vocab), size=n)]
        hyp = list(ref)
        # corrupt: substitutions, deletions, insertions
        for i in range(len(hyp)):
            r = rng.random()
            if r < 0.08:
                hyp[i] = vocab[int(rng.integers(0, len(vocab)))]
        if rng.random() < 0.35 and len(hyp) > 6:
            del hyp[int(rng.integers(0, len(hyp)))]
        if rng.random() < 0.35:
            hyp.insert(int(rng.integers(0, len(hyp) + 1)),
                       vocab[int(rng.integers(0, len(vocab)))])
        hyps.append(" ".join(hyp))
        refs.append(" ".join(ref))
    bleu = corpus_bleu(hyps, [refs])
    return {"seed": seed, "hypotheses": hyps, "references": refs,
            "reference_bleu": bleu.score}


def main():
    fixtures = [make_fixture(seed) for seed in range(20)]
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT, "w", encoding="utf-8") as fh:
        json.dump(fixtures, fh, indent=1)
        fh.write("\n")
    scores = [f["reference_bleu"] for f in fixtures]
    print(f"wrote {len(fixtures)} fixtures to {OUT}")
    print("score range: %.2f .. %.2f" % (min(scores), max(scores)))


if __name__ == "__main__":
    main()
