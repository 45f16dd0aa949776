"""GRU building blocks shared by the encoder-decoder, the discriminator
and the language model."""

from __future__ import annotations

import numpy as np

from . import tensor as T

GATE_NAMES = ("W_z", "U_z", "b_z", "W_r", "U_r", "b_r", "W_h", "U_h", "b_h")


def init_gru(rng: np.random.Generator, input_dim: int, hidden_dim: int,
             init_scale: float = 0.08) -> dict[str, np.ndarray]:
    """Uniform(-init_scale, init_scale) GRU weights as plain arrays."""
    def u(*shape):
        return rng.uniform(-init_scale, init_scale, size=shape)

    out = {}
    for gate in ("z", "r", "h"):
        out[f"W_{gate}"] = u(input_dim, hidden_dim)
        out[f"U_{gate}"] = u(hidden_dim, hidden_dim)
        out[f"b_{gate}"] = np.zeros(hidden_dim)
    return out


def sub_params(params: dict[str, T.Tensor], prefix: str) -> dict[str, T.Tensor]:
    """View of ``params`` with ``prefix.`` stripped from matching names."""
    cut = len(prefix) + 1
    return {name[cut:]: p for name, p in params.items()
            if name.startswith(prefix + ".")}


def gru_step(p: dict[str, T.Tensor], x: T.Tensor, h: T.Tensor) -> T.Tensor:
    """h_t = (1 - z) * h + z * h~ with update/reset gates (Cho et al. form)."""
    z = T.sigmoid(T.add(T.add(T.matmul(x, p["W_z"]), T.matmul(h, p["U_z"])), p["b_z"]))
    r = T.sigmoid(T.add(T.add(T.matmul(x, p["W_r"]), T.matmul(h, p["U_r"])), p["b_r"]))
    h_bar = T.tanh(T.add(T.add(T.matmul(x, p["W_h"]),
                               T.matmul(T.mul(r, h), p["U_h"])), p["b_h"]))
    return T.add(T.mul(T.one_minus(z), h), T.mul(z, h_bar))


def masked_step(h_new: T.Tensor, h_prev: T.Tensor, mask_col: T.Tensor) -> T.Tensor:
    """Keep the previous state on padded rows; mask_col is a constant (B, 1)."""
    return T.add(T.scale_rows(mask_col, h_new),
                 T.scale_rows(T.constant(1.0 - mask_col.data), h_prev))


def run_bidirectional(p_fwd: dict[str, T.Tensor], p_bwd: dict[str, T.Tensor],
                      inputs: list[T.Tensor], mask_cols: list[T.Tensor],
                      hidden_dim: int) -> list[T.Tensor]:
    """Concatenated forward/backward GRU states per position."""
    batch = inputs[0].data.shape[0]
    zero = T.constant(np.zeros((batch, hidden_dim)))

    fwd_states = []
    h = zero
    for x, m in zip(inputs, mask_cols):
        h = masked_step(gru_step(p_fwd, x, h), h, m)
        fwd_states.append(h)

    bwd_states: list[T.Tensor | None] = [None] * len(inputs)
    h = zero
    for i in reversed(range(len(inputs))):
        h = masked_step(gru_step(p_bwd, inputs[i], h), h, mask_cols[i])
        bwd_states[i] = h

    return [T.concat([f, b], axis=1) for f, b in zip(fwd_states, bwd_states)]


def masked_mean(states: list[T.Tensor], mask_cols: list[T.Tensor]) -> T.Tensor:
    """Mean over valid time steps, per row."""
    acc = None
    for s, m in zip(states, mask_cols):
        piece = T.scale_rows(m, s)
        acc = piece if acc is None else T.add(acc, piece)
    lengths = np.sum([m.data for m in mask_cols], axis=0)
    inv = T.constant(1.0 / np.maximum(lengths, 1.0))
    return T.scale_rows(inv, acc)
