"""Attentional encoder-decoder: training with early stopping, fine-tuning,
beam translation, corpus scoring and selective parameter freezing.

The model is a single-layer bidirectional GRU encoder, additive attention,
and a GRU decoder initialized from the mean encoder state, all in five
named parameter groups (src_embeddings, encoder, attention, decoder,
tgt_embeddings) so freezing contracts can be audited by checksum.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field, replace

import numpy as np
from sklearn.base import BaseEstimator

from . import tensor as T
from .corpus import (
    Corpus, CorpusError, EOS, PAD, ParallelCorpus, Sentence, UNK, Vocabulary,
    mix_equal, RESERVED,
)
from .rnn import (
    gru_step, init_gru, masked_mean, masked_step, run_bidirectional, sub_params,
)
from .synth import segment_token

log = logging.getLogger(__name__)

GROUPS = ("src_embeddings", "encoder", "attention", "decoder", "tgt_embeddings")

NEG_INF = -1e9


class TrainingDiverged(RuntimeError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    src_vocab_size: int
    tgt_vocab_size: int
    embed_dim: int = 32
    hidden_dim: int = 64
    attention_dim: int = 32
    max_len: int = 40
    char_fallback: bool = True  # segment OOV source tokens at encode time

    def __post_init__(self):
        for name in ("src_vocab_size", "tgt_vocab_size", "embed_dim",
                     "hidden_dim", "attention_dim", "max_len"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class TrainSpec:
    batch_size: int = 16
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    validation_interval: int = 200
    patience: int = 10
    max_updates: int = 2000
    freeze_mask: frozenset = frozenset()
    seed: int = 0

    def __post_init__(self):
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        unknown = set(self.freeze_mask) - set(GROUPS)
        if unknown:
            raise ValueError(f"freeze_mask has unknown groups {sorted(unknown)}")

    def adam(self) -> T.AdamState:
        return T.AdamState(lr=self.lr, beta1=self.beta1, beta2=self.beta2,
                           eps=self.eps)


class NmtModel:
    """Parameter container plus the vocabularies needed to run it."""

    def __init__(self, config: ModelConfig, src_vocab: Vocabulary,
                 tgt_vocab: Vocabulary, seed: int = 0, init_scale: float = 0.08):
        if len(src_vocab) != config.src_vocab_size or len(tgt_vocab) != config.tgt_vocab_size:
            raise ValueError("config vocab sizes disagree with the vocabularies")
        self.config = config
        self.src_vocab = src_vocab
        self.tgt_vocab = tgt_vocab
        rng = np.random.default_rng(seed)
        e, h, a = config.embed_dim, config.hidden_dim, config.attention_dim
        p: dict[str, np.ndarray] = {}

        def u(*shape):
            return rng.uniform(-init_scale, init_scale, size=shape)

        p["src_embeddings.table"] = u(config.src_vocab_size, e)
        for d, name in ((e, "encoder.fwd"), (e, "encoder.bwd")):
            for k, arr in init_gru(rng, d, h, init_scale).items():
                p[f"{name}.{k}"] = arr
        p["attention.W_state"] = u(h, a)
        p["attention.U_enc"] = u(2 * h, a)
        p["attention.b"] = np.zeros(a)
        p["attention.v"] = u(a, 1)
        p["decoder.init.W"] = u(2 * h, h)
        p["decoder.init.b"] = np.zeros(h)
        for k, arr in init_gru(rng, e + 2 * h, h, init_scale).items():
            p[f"decoder.gru.{k}"] = arr
        p["decoder.readout.W"] = u(h + 2 * h + e, e)
        p["decoder.readout.b"] = np.zeros(e)
        p["decoder.out.W"] = u(e, config.tgt_vocab_size)
        p["decoder.out.b"] = np.zeros(config.tgt_vocab_size)
        p["tgt_embeddings.table"] = u(config.tgt_vocab_size, e)

        self.params: dict[str, T.Tensor] = {
            name: T.parameter(arr, name=name) for name, arr in p.items()
        }

    @staticmethod
    def group_of(name: str) -> str:
        head = name.split(".", 1)[0]
        if head not in GROUPS:
            raise ValueError(f"parameter {name!r} has no group")
        return head

    def group_params(self, group: str) -> dict[str, T.Tensor]:
        return {n: p for n, p in self.params.items() if self.group_of(n) == group}

    def checksum(self, group: str | None = None) -> str:
        digest = hashlib.sha256()
        for name in sorted(self.params):
            if group is None or self.group_of(name) == group:
                digest.update(name.encode())
                digest.update(self.params[name].data.tobytes())
        return digest.hexdigest()

    def group_checksums(self) -> dict[str, str]:
        return {g: self.checksum(g) for g in GROUPS}

    def snapshot(self) -> dict[str, np.ndarray]:
        return {n: p.data.copy() for n, p in self.params.items()}

    def restore(self, snapshot: dict[str, np.ndarray]) -> None:
        for n, arr in snapshot.items():
            self.params[n].data = arr.copy()

    def zero_grads(self) -> None:
        for p in self.params.values():
            p.zero_grad()

    def trainable(self, freeze_mask=frozenset()) -> dict[str, T.Tensor]:
        return {n: p for n, p in self.params.items()
                if self.group_of(n) not in freeze_mask}

    def extend_src_vocab(self, new_tokens: list[str], seed: int = 0,
                         init_scale: float = 0.08) -> int:
        """Append embedding rows for new source entries; returns old size."""
        old = self.config.src_vocab_size
        self.src_vocab = self.src_vocab.extended(new_tokens)
        rng = np.random.default_rng(seed)
        fresh = rng.uniform(-init_scale, init_scale,
                            size=(len(new_tokens), self.config.embed_dim))
        table = self.params["src_embeddings.table"]
        table.data = np.concatenate([table.data, fresh], axis=0)
        self.config = replace(self.config, src_vocab_size=len(self.src_vocab))
        return old

    def save(self, path, update_count: int = 0) -> None:
        """Binary parameter file plus a JSON sidecar next to it."""
        T.save_params(path, {n: p.data for n, p in self.params.items()})
        sidecar = {
            "config": self.config.to_dict(),
            "src_vocab_hash": self.src_vocab.content_hash(),
            "tgt_vocab_hash": self.tgt_vocab.content_hash(),
            "update_count": update_count,
            "groups": list(GROUPS),
        }
        with open(f"{path}.json", "w", encoding="utf-8") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path, src_vocab: Vocabulary, tgt_vocab: Vocabulary) -> "NmtModel":
        with open(f"{path}.json", encoding="utf-8") as fh:
            sidecar = json.load(fh)
        if sidecar["src_vocab_hash"] != src_vocab.content_hash():
            raise CorpusError("source vocabulary does not match checkpoint")
        if sidecar["tgt_vocab_hash"] != tgt_vocab.content_hash():
            raise CorpusError("target vocabulary does not match checkpoint")
        config = ModelConfig(**sidecar["config"])
        model = cls(config, src_vocab, tgt_vocab, seed=0)
        arrays = T.load_params(path)
        if set(arrays) != set(model.params):
            raise CorpusError("checkpoint parameter names do not match model")
        model.restore(arrays)
        return model


# ---------------------------------------------------------------------------
# encoding corpora into id arrays


def encode_surfaces(surfaces, vocab: Vocabulary, char_fallback: bool) -> list[int]:
    """Token ids with EOS appended; OOVs optionally segmented into units."""
    ids: list[int] = []
    for s in surfaces:
        tid = vocab.lookup(s)
        if tid == UNK and char_fallback and s != RESERVED[UNK]:
            for piece in segment_token(s, vocab):
                ids.append(vocab.lookup(piece))
        else:
            ids.append(tid)
    ids.append(EOS)
    return ids


@dataclass(frozen=True)
class EncodedPair:
    src: tuple[int, ...]
    tgt: tuple[int, ...]  # with EOS appended


def encode_corpus(corpus: ParallelCorpus, src_vocab: Vocabulary,
                  tgt_vocab: Vocabulary, char_fallback: bool) -> list[EncodedPair]:
    out = []
    for pair in corpus:
        out.append(EncodedPair(
            tuple(encode_surfaces(pair.source.surfaces, src_vocab, char_fallback)),
            tuple(tgt_vocab.encode(pair.target.surfaces)),
        ))
    return out


@dataclass
class Batch:
    src: np.ndarray       # (B, S) ids, PAD-padded
    src_mask: np.ndarray  # (B, S) 0/1
    tgt_in: np.ndarray    # (B, T) EOS-as-BOS then gold prefix
    tgt_out: np.ndarray   # (B, T) gold continuation ending in EOS
    tgt_mask: np.ndarray  # (B, T)

    @property
    def size(self) -> int:
        return self.src.shape[0]

    def token_count(self) -> float:
        return float(self.tgt_mask.sum())


def make_batch(pairs: list[EncodedPair]) -> Batch:
    b = len(pairs)
    s_len = max(len(p.src) for p in pairs)
    t_len = max(len(p.tgt) for p in pairs)
    src = np.full((b, s_len), PAD, dtype=np.int64)
    src_mask = np.zeros((b, s_len))
    tgt_in = np.full((b, t_len), PAD, dtype=np.int64)
    tgt_out = np.full((b, t_len), PAD, dtype=np.int64)
    tgt_mask = np.zeros((b, t_len))
    for i, p in enumerate(pairs):
        src[i, :len(p.src)] = p.src
        src_mask[i, :len(p.src)] = 1.0
        tgt_in[i, 0] = EOS
        tgt_in[i, 1:len(p.tgt)] = p.tgt[:-1]
        tgt_out[i, :len(p.tgt)] = p.tgt
        tgt_mask[i, :len(p.tgt)] = 1.0
    return Batch(src, src_mask, tgt_in, tgt_out, tgt_mask)


def make_batches(pairs: list[EncodedPair], batch_size: int,
                 rng: np.random.Generator | None = None) -> list[Batch]:
    """Length-sorted buckets; batch order shuffled when an rng is given."""
    order = sorted(range(len(pairs)), key=lambda i: (len(pairs[i].src), i))
    chunks = [order[i:i + batch_size] for i in range(0, len(order), batch_size)]
    if rng is not None and len(chunks) > 1:
        chunks = [chunks[i] for i in rng.permutation(len(chunks))]
    return [make_batch([pairs[i] for i in chunk]) for chunk in chunks]


# ---------------------------------------------------------------------------
# forward passes


@dataclass
class EncodedBatchState:
    states: list[T.Tensor]      # per position, (B, 2H)
    states_flat: T.Tensor       # (S*B, 2H), position-major
    att_flat: T.Tensor          # (S*B, A), attention pre-projections
    neg_mask: T.Tensor          # (B, S): 0 on valid, -1e9 on padding
    init_state: T.Tensor        # (B, H)

    @property
    def positions(self) -> int:
        return len(self.states)


def encode_batch(model: NmtModel, src: np.ndarray, src_mask: np.ndarray) -> EncodedBatchState:
    p = model.params
    fwd = sub_params(p, "encoder.fwd")
    bwd = sub_params(p, "encoder.bwd")
    s_len = src.shape[1]
    inputs = [T.embedding_lookup(p["src_embeddings.table"], src[:, t])
              for t in range(s_len)]
    mask_cols = [T.constant(src_mask[:, t:t + 1]) for t in range(s_len)]
    states = run_bidirectional(fwd, bwd, inputs, mask_cols, model.config.hidden_dim)
    mean_state = masked_mean(states, mask_cols)
    init_state = T.tanh(T.add(T.matmul(mean_state, p["decoder.init.W"]),
                              p["decoder.init.b"]))
    states_flat = states[0] if s_len == 1 else T.concat(states, axis=0)
    att_flat = T.matmul(states_flat, p["attention.U_enc"])
    neg_mask = T.constant(np.where(src_mask > 0, 0.0, NEG_INF))
    return EncodedBatchState(states, states_flat, att_flat, neg_mask, init_state)


def attention_context(model: NmtModel, enc: EncodedBatchState,
                      s_prev: T.Tensor) -> tuple[T.Tensor, T.Tensor]:
    p = model.params
    s_len = enc.positions
    query = T.matmul(s_prev, p["attention.W_state"])
    act = T.tanh(T.add(T.add(enc.att_flat, T.tile_rows(query, s_len)),
                       p["attention.b"]))
    scores = T.stack_to_columns(T.matmul(act, p["attention.v"]), s_len)
    alpha = T.softmax_rows(T.add(scores, enc.neg_mask))
    weighted = T.scale_rows(T.columns_to_stack(alpha), enc.states_flat)
    context = T.block_sum(weighted, s_len)
    return context, alpha


def decoder_step(model: NmtModel, enc: EncodedBatchState, s_prev: T.Tensor,
                 prev_ids: np.ndarray,
                 mask_col: T.Tensor | None = None) -> tuple[T.Tensor, T.Tensor]:
    """One teacher-forced or decode step; returns (new state, logits)."""
    p = model.params
    e_prev = T.embedding_lookup(p["tgt_embeddings.table"], prev_ids)
    context, _ = attention_context(model, enc, s_prev)
    x = T.concat([e_prev, context], axis=1)
    s_new = gru_step(sub_params(p, "decoder.gru"), x, s_prev)
    if mask_col is not None:
        s_new = masked_step(s_new, s_prev, mask_col)
    readout_in = T.concat([s_new, context, e_prev], axis=1)
    readout = T.tanh(T.add(T.matmul(readout_in, p["decoder.readout.W"]),
                           p["decoder.readout.b"]))
    logits = T.add(T.matmul(readout, p["decoder.out.W"]), p["decoder.out.b"])
    return s_new, logits


def forward_loss(model: NmtModel, batch: Batch) -> T.Tensor:
    """Mean per-token cross-entropy of teacher-forced decoding."""
    enc = encode_batch(model, batch.src, batch.src_mask)
    s = enc.init_state
    total = None
    t_len = batch.tgt_in.shape[1]
    for t in range(t_len):
        mask_col = T.constant(batch.tgt_mask[:, t:t + 1])
        s, logits = decoder_step(model, enc, s, batch.tgt_in[:, t], mask_col)
        ce = T.cross_entropy(logits, batch.tgt_out[:, t], batch.tgt_mask[:, t])
        total = ce if total is None else T.add(total, ce)
    return T.scale(total, 1.0 / max(batch.token_count(), 1.0))


def score_corpus(model: NmtModel, corpus: ParallelCorpus,
                 batch_size: int = 32) -> dict[str, float]:
    """Teacher-forced cross-entropy per sentence and per token (no updates)."""
    pairs = encode_corpus(corpus, model.src_vocab, model.tgt_vocab,
                          model.config.char_fallback)
    sentence_nll: list[float] = []
    total_nll = 0.0
    total_tokens = 0.0
    for batch in make_batches(pairs, batch_size):
        enc = encode_batch(model, batch.src, batch.src_mask)
        s = enc.init_state
        nll = np.zeros(batch.size)
        for t in range(batch.tgt_in.shape[1]):
            mask_col = T.constant(batch.tgt_mask[:, t:t + 1])
            s, logits = decoder_step(model, enc, s, batch.tgt_in[:, t], mask_col)
            logp = T.log_softmax_rows(logits.data)
            rows = np.arange(batch.size)
            nll -= logp[rows, batch.tgt_out[:, t]] * batch.tgt_mask[:, t]
        sentence_nll.extend(nll.tolist())
        total_nll += float(nll.sum())
        total_tokens += batch.token_count()
    return {
        "mean_sentence_xent": float(np.mean(sentence_nll)) if sentence_nll else 0.0,
        "mean_token_xent": total_nll / total_tokens if total_tokens else 0.0,
    }


def dev_loss(model: NmtModel, dev_pairs: list[EncodedPair],
             batch_size: int = 32) -> float:
    total = 0.0
    tokens = 0.0
    for batch in make_batches(dev_pairs, batch_size):
        loss = forward_loss(model, batch)
        n = batch.token_count()
        total += float(loss.data) * n
        tokens += n
    return total / max(tokens, 1.0)


# ---------------------------------------------------------------------------
# training


@dataclass(frozen=True)
class ValidationPoint:
    update: int
    dev_loss: float
    group_checksums: dict[str, str] = field(compare=False)


@dataclass
class TrainResult:
    history: list[ValidationPoint]
    best_update: int
    best_dev_loss: float
    updates_run: int


def _grad_row_mask(param: T.Tensor, keep_from: int) -> None:
    if param.grad is not None:
        param.grad[:keep_from, :] = 0.0


def train(model: NmtModel, corpus: ParallelCorpus, dev: ParallelCorpus,
          spec: TrainSpec,
          trainable_override: dict[str, T.Tensor] | None = None,
          embed_row_freeze: int | None = None) -> TrainResult:
    """Adam over shuffled length-bucketed batches with dev early stopping.

    Validation runs at update 0 and every ``validation_interval`` updates;
    the best-dev snapshot is restored into the model before returning.
    Groups in ``spec.freeze_mask`` receive no updates. The two keyword
    overrides support staged fine-tuning (train only some tensors, or only
    embedding rows from ``embed_row_freeze`` on).
    """
    if len(corpus) == 0 or len(dev) == 0:
        raise CorpusError("train and dev corpora must be non-empty")
    cf = model.config.char_fallback
    train_pairs = encode_corpus(corpus, model.src_vocab, model.tgt_vocab, cf)
    dev_pairs = encode_corpus(dev, model.src_vocab, model.tgt_vocab, cf)
    rng = np.random.default_rng(spec.seed)
    trainable = (trainable_override if trainable_override is not None
                 else model.trainable(spec.freeze_mask))
    opt = spec.adam()

    history: list[ValidationPoint] = []
    best = dev_loss(model, dev_pairs)
    best_update = 0
    best_params = model.snapshot()
    history.append(ValidationPoint(0, best, model.group_checksums()))
    since_best = 0
    update = 0
    stop = False

    while not stop:
        for batch in make_batches(train_pairs, spec.batch_size, rng):
            update += 1
            model.zero_grads()
            with T.Tape() as tape:
                loss = forward_loss(model, batch)
                tape.backward(loss)
            if not np.isfinite(loss.data):
                raise TrainingDiverged(
                    f"non-finite loss {float(loss.data)} at update {update}")
            if embed_row_freeze is not None:
                _grad_row_mask(model.params["src_embeddings.table"], embed_row_freeze)
            T.adam_step(trainable, opt)

            if update % spec.validation_interval == 0 or update >= spec.max_updates:
                current = dev_loss(model, dev_pairs)
                history.append(ValidationPoint(update, current, model.group_checksums()))
                if current < best:
                    best, best_update = current, update
                    best_params = model.snapshot()
                    since_best = 0
                else:
                    since_best += 1
                if since_best >= spec.patience or update >= spec.max_updates:
                    stop = True
            if stop:
                break

    model.restore(best_params)
    return TrainResult(history, best_update, best, update)


def fine_tune(model: NmtModel, in_domain_pseudo: ParallelCorpus,
              out_domain_natural: ParallelCorpus, dev: ParallelCorpus,
              spec: TrainSpec, vocab_extension: list[str] | None = None,
              extension_pretrain_epochs: int = 3) -> TrainResult:
    """Resume training on an equal mix of pseudo and natural data.

    When ``vocab_extension`` lists new source entries (the copy-marked
    namespace), their fresh embedding rows are first pretrained on the
    in-domain data for ``extension_pretrain_epochs`` epochs with every
    other parameter frozen, then joint tuning runs on the mix with a fresh
    optimizer.
    """
    if vocab_extension:
        old_size = model.extend_src_vocab(vocab_extension, seed=spec.seed + 1)
        if extension_pretrain_epochs > 0:
            n_batches = int(np.ceil(len(in_domain_pseudo) / spec.batch_size))
            pre_spec = replace(
                spec,
                max_updates=extension_pretrain_epochs * n_batches,
                validation_interval=max(1, extension_pretrain_epochs * n_batches),
                patience=extension_pretrain_epochs * n_batches + 1,
            )
            train(model, in_domain_pseudo, dev, pre_spec,
                  trainable_override={"src_embeddings.table":
                                      model.params["src_embeddings.table"]},
                  embed_row_freeze=old_size)

    mixed = mix_equal(in_domain_pseudo, out_domain_natural, seed=spec.seed)
    return train(model, mixed, dev, spec)


# ---------------------------------------------------------------------------
# beam translation


def translate(model: NmtModel, sentence: Sentence, beam_width: int = 4,
              length_norm: float = 1.0) -> Sentence:
    """Length-normalized beam search; beam_width 1 is greedy decoding."""
    if beam_width < 1:
        raise ValueError("beam_width must be >= 1")
    ids = encode_surfaces(sentence.surfaces, model.src_vocab,
                          model.config.char_fallback)
    src = np.asarray([ids], dtype=np.int64)
    src_mask = np.ones((1, len(ids)))
    enc1 = encode_batch(model, src, src_mask)

    def tiled(n: int) -> EncodedBatchState:
        # states_flat is position-major, so each single-row block repeats n times
        return EncodedBatchState(
            states=[T.constant(np.tile(h.data, (n, 1))) for h in enc1.states],
            states_flat=T.constant(np.repeat(enc1.states_flat.data, n, axis=0)),
            att_flat=T.constant(np.repeat(enc1.att_flat.data, n, axis=0)),
            neg_mask=T.constant(np.tile(enc1.neg_mask.data, (n, 1))),
            init_state=T.constant(np.tile(enc1.init_state.data, (n, 1))),
        )

    # live hypotheses: (tokens, logprob, state row)
    live: list[tuple[list[int], float]] = [([], 0.0)]
    states = enc1.init_state.data.copy()
    finished: list[tuple[list[int], float]] = []

    for _ in range(model.config.max_len):
        n = len(live)
        enc = tiled(n)
        prev = np.asarray([h[0][-1] if h[0] else EOS for h in live], dtype=np.int64)
        s_new, logits = decoder_step(model, enc, T.constant(states), prev)
        logp = T.log_softmax_rows(logits.data)
        logp[:, PAD] = NEG_INF  # padding is never a valid output

        cand_scores = np.asarray([h[1] for h in live])[:, None] + logp
        flat = cand_scores.ravel()
        take = min(beam_width, flat.size)
        top = np.argsort(-flat, kind="stable")[:take]

        new_live: list[tuple[list[int], float]] = []
        new_states = []
        for idx in top:
            row, tok = divmod(int(idx), logp.shape[1])
            score = float(flat[idx])
            tokens = live[row][0] + [tok]
            if tok == EOS:
                finished.append((tokens[:-1], score))
            else:
                new_live.append((tokens, score))
                new_states.append(s_new.data[row])
        if not new_live:
            break
        live = new_live[:beam_width]
        states = np.stack(new_states[:beam_width])

    for tokens, score in live:
        finished.append((tokens, score))

    def normalized(entry):
        tokens, score = entry
        return score / (len(tokens) + 1) ** length_norm

    finished.sort(key=lambda e: (-normalized(e), e[0]))
    tokens = next((tok for tok, _ in finished if tok), None)
    if tokens is None:
        tokens = [UNK]
    surfaces = [model.tgt_vocab.id_to_token(t) for t in tokens]
    return Sentence.from_surfaces(surfaces)


def translate_corpus(model: NmtModel, corpus: Corpus, beam_width: int = 4) -> Corpus:
    return Corpus(tuple(translate(model, s, beam_width) for s in corpus))


@dataclass
class NeuralTranslator:
    """Adapter so an NmtModel can serve as a back/forward translator."""

    model: NmtModel
    beam_width: int = 4
    system_id: str = "nmt"

    def translate_sentence(self, surfaces, index: int = 0) -> list[str]:
        out = translate(self.model, Sentence.from_surfaces(surfaces),
                        self.beam_width)
        return list(out.surfaces)


# ---------------------------------------------------------------------------
# estimator facade


class SeqToSeqTranslator(BaseEstimator):
    """fit/predict wrapper over build-vocab + train + beam translate."""

    def __init__(self, embed_dim: int = 32, hidden_dim: int = 64,
                 attention_dim: int = 32, max_len: int = 40,
                 char_fallback: bool = True, batch_size: int = 16,
                 lr: float = 1e-3, validation_interval: int = 200,
                 patience: int = 10, max_updates: int = 2000,
                 beam_width: int = 4, seed: int = 0):
        self.embed_dim = embed_dim
        self.hidden_dim = hidden_dim
        self.attention_dim = attention_dim
        self.max_len = max_len
        self.char_fallback = char_fallback
        self.batch_size = batch_size
        self.lr = lr
        self.validation_interval = validation_interval
        self.patience = patience
        self.max_updates = max_updates
        self.beam_width = beam_width
        self.seed = seed

    def fit(self, X: ParallelCorpus, y=None, dev: ParallelCorpus | None = None):
        src_vocab = Vocabulary.build(X.sources(), include_chars=self.char_fallback)
        tgt_vocab = Vocabulary.build(X.targets())
        config = ModelConfig(
            src_vocab_size=len(src_vocab), tgt_vocab_size=len(tgt_vocab),
            embed_dim=self.embed_dim, hidden_dim=self.hidden_dim,
            attention_dim=self.attention_dim, max_len=self.max_len,
            char_fallback=self.char_fallback)
        self.model_ = NmtModel(config, src_vocab, tgt_vocab, seed=self.seed)
        spec = TrainSpec(batch_size=self.batch_size, lr=self.lr,
                         validation_interval=self.validation_interval,
                         patience=self.patience, max_updates=self.max_updates,
                         seed=self.seed)
        self.history_ = train(self.model_, X, dev if dev is not None else X, spec)
        return self

    def predict(self, X: Corpus) -> Corpus:
        return translate_corpus(self.model_, X, beam_width=self.beam_width)

    def score(self, X: ParallelCorpus, y=None) -> float:
        """Negative mean per-token cross-entropy (higher is better)."""
        return -score_corpus(self.model_, X)["mean_token_xent"]
