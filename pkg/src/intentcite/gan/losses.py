"""Loss values and exact analytic gradients for adversarial training.

Discriminator objective, over a batch of labeled reals, unlabeled reals
and generated fakes (probabilities from the k+1-way softmax, with class k
the synthetic class):

    L_sup   = mean_labeled  -log( p(y|x) / sum_{c<k} p(c|x) )
    L_unsup = mean_real -log(1 - p_fake(x))  +  mean_fake -log p_fake(x)

Generator objective:

    L_G = mean_fake -log(1 - p_fake(x))
          + || mean_real features - mean_fake features ||^2

All terms are computed on log-sum-exp scale, so gradients stay exact even
when the softmax saturates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError, ValidationError
from .nets import (
    DiscriminatorParams,
    GeneratorParams,
    Layers,
    _discriminator_backward,
    _discriminator_forward_cached,
    _generator_backward,
    _generator_forward_cached,
)


def zero_grads(layers: Layers) -> Layers:
    return [(np.zeros_like(w), np.zeros_like(b)) for w, b in layers]


def add_grads(acc: Layers, extra: Layers) -> None:
    for (aw, ab), (ew, eb) in zip(acc, extra):
        aw += ew
        ab += eb


def _logsumexp(logits: np.ndarray) -> np.ndarray:
    m = logits.max(axis=-1)
    return m + np.log(np.exp(logits - m[..., None]).sum(axis=-1))


def _empty(width: int) -> np.ndarray:
    return np.zeros((0, width), dtype=np.float64)


@dataclass
class DiscriminatorLoss:
    l_sup: float
    l_unsup: float
    grads: Layers

    @property
    def total(self) -> float:
        return self.l_sup + self.l_unsup


def loss_discriminator(
    params: DiscriminatorParams,
    labeled_x,
    labeled_y,
    unlabeled_x,
    fake_x,
    *,
    train_mode: bool = False,
    rng: np.random.Generator | None = None,
    unsupervised: bool = True,
) -> DiscriminatorLoss:
    """Supervised and unsupervised losses with gradients for D.

    Empty batches contribute zero to their terms; an empty labeled batch
    makes ``l_sup`` exactly 0. ``unsupervised=False`` trains on L_sup
    alone (the supervised-only ablation).
    """
    h = params.input_dim
    k = params.num_classes
    lx = np.asarray(labeled_x, dtype=np.float64).reshape(-1, h) if len(labeled_x) else _empty(h)
    ux = np.asarray(unlabeled_x, dtype=np.float64).reshape(-1, h) if len(unlabeled_x) else _empty(h)
    fx = np.asarray(fake_x, dtype=np.float64).reshape(-1, h) if len(fake_x) else _empty(h)
    y = np.asarray(labeled_y, dtype=np.int64).ravel()
    if y.shape[0] != lx.shape[0]:
        raise ParameterError("labeled_y length must match labeled_x batch size")
    if y.size and (y.min() < 0 or y.max() >= k):
        raise ValidationError(f"labels must lie in 0..{k - 1}")

    grads = zero_grads(params.layers)
    n_real = lx.shape[0] + ux.shape[0]
    l_sup = 0.0
    l_real = 0.0
    l_fake = 0.0

    def real_term(logits):
        """-log(1 - p_fake) per example and its dlogits."""
        lse_all = _logsumexp(logits)
        lse_real = _logsumexp(logits[:, :k])
        p_all = np.exp(logits - lse_all[:, None])
        q_real = np.exp(logits[:, :k] - lse_real[:, None])
        d = p_all.copy()
        d[:, :k] -= q_real
        return lse_all - lse_real, d

    if lx.shape[0]:
        logits, _, cache = _discriminator_forward_cached(params, lx, train_mode, rng)
        lse_real = _logsumexp(logits[:, :k])
        picked = logits[np.arange(len(y)), y]
        l_sup = float(np.mean(lse_real - picked))

        q_real = np.exp(logits[:, :k] - lse_real[:, None])
        dlogits = np.zeros_like(logits)
        dlogits[:, :k] = q_real
        dlogits[np.arange(len(y)), y] -= 1.0
        dlogits /= len(y)

        if unsupervised and n_real:
            per_ex, d_real = real_term(logits)
            l_real += float(per_ex.sum())
            dlogits += d_real / n_real
        layer_grads, _ = _discriminator_backward(params, cache, dlogits)
        add_grads(grads, layer_grads)

    if unsupervised and ux.shape[0]:
        logits, _, cache = _discriminator_forward_cached(params, ux, train_mode, rng)
        per_ex, d_real = real_term(logits)
        l_real += float(per_ex.sum())
        layer_grads, _ = _discriminator_backward(params, cache, d_real / n_real)
        add_grads(grads, layer_grads)

    if unsupervised and fx.shape[0]:
        logits, _, cache = _discriminator_forward_cached(params, fx, train_mode, rng)
        lse_all = _logsumexp(logits)
        l_fake = float(np.mean(lse_all - logits[:, k]))
        dlogits = np.exp(logits - lse_all[:, None])
        dlogits[:, k] -= 1.0
        dlogits /= fx.shape[0]
        layer_grads, _ = _discriminator_backward(params, cache, dlogits)
        add_grads(grads, layer_grads)

    l_unsup = (l_real / n_real if n_real else 0.0) + l_fake
    return DiscriminatorLoss(l_sup=l_sup, l_unsup=l_unsup, grads=grads)


def generator_objective(fake_probs, fake_features, real_features) -> tuple[float, float]:
    """(fool term, feature-matching term) from precomputed forward results.

    Matches the training loss exactly; exposed so tests can pin values
    without running backprop.
    """
    fake_probs = np.atleast_2d(np.asarray(fake_probs, dtype=np.float64))
    p_fake = fake_probs[:, -1]
    fool = float(np.mean(-np.log1p(-p_fake)))
    mean_fake = np.atleast_2d(fake_features).mean(axis=0)
    mean_real = np.atleast_2d(real_features).mean(axis=0)
    diff = mean_real - mean_fake
    return fool, float(diff @ diff)


@dataclass
class GeneratorLoss:
    l_g: float
    fool: float
    feature_matching: float
    grads: Layers
    fake_x: np.ndarray


def loss_generator(
    gen_params: GeneratorParams,
    disc_params: DiscriminatorParams,
    noise,
    class_indices,
    real_x,
    *,
    train_mode: bool = False,
    rng: np.random.Generator | None = None,
) -> GeneratorLoss:
    """Generator loss with gradients flowing to generator parameters only.

    The discriminator is traversed for backprop but its parameters receive
    no gradient; real-batch features enter as constants.
    """
    real_x = np.asarray(real_x, dtype=np.float64)
    if real_x.ndim != 2 or real_x.shape[0] == 0:
        raise ParameterError("real batch must be a non-empty matrix")
    noise = np.atleast_2d(np.asarray(noise, dtype=np.float64))
    if noise.shape[0] == 0:
        raise ParameterError("fake batch must be non-empty")
    k = disc_params.num_classes

    fake_x, gen_cache = _generator_forward_cached(
        gen_params, noise, class_indices, train_mode, rng
    )
    fake_logits, fake_feats, disc_cache = _discriminator_forward_cached(
        disc_params, fake_x, train_mode, rng
    )
    _, real_feats, _ = _discriminator_forward_cached(
        disc_params, real_x, train_mode, rng
    )

    b_fake = fake_x.shape[0]
    lse_all = _logsumexp(fake_logits)
    lse_real = _logsumexp(fake_logits[:, :k])
    fool = float(np.mean(lse_all - lse_real))

    mean_fake = fake_feats.mean(axis=0)
    mean_real = real_feats.mean(axis=0)
    diff = mean_real - mean_fake
    fm = float(diff @ diff)

    p_all = np.exp(fake_logits - lse_all[:, None])
    q_real = np.exp(fake_logits[:, :k] - lse_real[:, None])
    dlogits = p_all
    dlogits[:, :k] -= q_real
    dlogits /= b_fake
    dfeatures = np.tile(2.0 * (mean_fake - mean_real) / b_fake, (b_fake, 1))

    _, dfake_x = _discriminator_backward(disc_params, disc_cache, dlogits, dfeatures)
    gen_grads = _generator_backward(gen_params, gen_cache, dfake_x)
    return GeneratorLoss(
        l_g=fool + fm,
        fool=fool,
        feature_matching=fm,
        grads=gen_grads,
        fake_x=fake_x,
    )
