"""Adam with a linear warmup-then-decay learning-rate schedule."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError
from .nets import Layers


@dataclass
class AdamState:
    m: Layers
    v: Layers
    t: int = 0

    def copy(self) -> "AdamState":
        return AdamState(
            m=[(w.copy(), b.copy()) for w, b in self.m],
            v=[(w.copy(), b.copy()) for w, b in self.v],
            t=self.t,
        )


def adam_init(layers: Layers) -> AdamState:
    def zeros():
        return [(np.zeros_like(w), np.zeros_like(b)) for w, b in layers]

    return AdamState(m=zeros(), v=zeros())


def adam_step(
    layers: Layers,
    grads: Layers,
    state: AdamState,
    lr: float,
    *,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> None:
    """One in-place Adam update with bias correction."""
    state.t += 1
    c1 = 1.0 - beta1**state.t
    c2 = 1.0 - beta2**state.t
    for (w, b), (gw, gb), (mw, mb), (vw, vb) in zip(layers, grads, state.m, state.v):
        for param, grad, m, v in ((w, gw, mw, vw), (b, gb, mb, vb)):
            m *= beta1
            m += (1.0 - beta1) * grad
            v *= beta2
            v += (1.0 - beta2) * grad * grad
            param -= lr * (m / c1) / (np.sqrt(v / c2) + eps)


def lr_multiplier(step: int, total_steps: int, warmup_proportion: float) -> float:
    """Linear ramp over the warmup span, then linear decay toward zero.

    ``step`` is 0-based; the multiplier never reaches exactly zero inside
    the schedule so every step still moves the parameters.
    """
    if not 0.0 <= warmup_proportion < 1.0:
        raise ParameterError("warmup_proportion must lie in [0, 1)")
    if total_steps <= 0:
        return 0.0
    warmup = int(warmup_proportion * total_steps)
    if step < warmup:
        return (step + 1) / warmup
    return max(0.0, (total_steps - step) / max(1, total_steps - warmup))
