"""Central finite-difference verification of tape gradients."""

from __future__ import annotations

import numpy as np

from .tensor import Tape, Tensor


def numeric_grad(loss_fn, arr: np.ndarray, index: tuple, eps: float = 1e-5) -> float:
    orig = arr[index]
    arr[index] = orig + eps
    up = float(loss_fn().data)
    arr[index] = orig - eps
    down = float(loss_fn().data)
    arr[index] = orig
    return (up - down) / (2.0 * eps)


def check_gradients(loss_fn, params: dict[str, Tensor], eps: float = 1e-5,
                    rtol: float = 1e-4, max_coords: int | None = None,
                    seed: int = 0) -> float:
    """Compare tape gradients of ``loss_fn()`` against central differences.

    ``loss_fn`` must rebuild the forward pass from the current parameter
    values on every call. Checks every coordinate unless ``max_coords``
    caps the sample per parameter. Returns the worst relative error and
    raises AssertionError when it exceeds ``rtol``.
    """
    for p in params.values():
        p.zero_grad()
    with Tape() as tape:
        loss = loss_fn()
        tape.backward(loss)
    analytic = {name: (p.grad.copy() if p.grad is not None else np.zeros_like(p.data))
                for name, p in params.items()}

    rng = np.random.default_rng(seed)
    worst = 0.0
    for name, p in params.items():
        coords = list(np.ndindex(p.data.shape))
        if max_coords is not None and len(coords) > max_coords:
            picks = rng.choice(len(coords), size=max_coords, replace=False)
            coords = [coords[i] for i in picks]
        for index in coords:
            n = numeric_grad(loss_fn, p.data, index, eps=eps)
            a = float(analytic[name][index])
            denom = max(abs(a), abs(n))
            if denom < 1e-6:
                err = abs(a - n)
                ok = err <= 1e-8
            else:
                err = abs(a - n) / denom
                ok = err <= rtol
            worst = max(worst, err if denom >= 1e-6 else 0.0)
            if not ok:
                raise AssertionError(
                    f"gradient mismatch for {name}{tuple(index)}: analytic={a:.3e} numeric={n:.3e}"
                )
    return worst
