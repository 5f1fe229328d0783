"""Generator and discriminator MLPs with explicit parameter arrays.

Everything is float64 numpy so analytic gradients can be verified against
finite differences. Weight matrices are (in_dim, out_dim); activations are
leaky rectifiers on hidden layers and linear on the output layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from ..errors import ParameterError, ValidationError

Layers = list[tuple[np.ndarray, np.ndarray]]


def _check_chain(layers: Layers, name: str) -> None:
    if not layers:
        raise ValidationError(f"{name} needs at least one layer")
    for i, (w, b) in enumerate(layers):
        if w.ndim != 2 or b.ndim != 1 or w.shape[1] != b.shape[0]:
            raise ValidationError(
                f"{name} layer {i}: weight {w.shape} and bias {b.shape} disagree"
            )
        if i > 0 and layers[i - 1][0].shape[1] != w.shape[0]:
            raise ValidationError(
                f"{name} layer {i}: input width {w.shape[0]} does not chain "
                f"with previous output {layers[i - 1][0].shape[1]}"
            )


@dataclass
class GeneratorParams:
    """MLP from (noise, one-hot class) to a synthetic embedding."""

    layers: Layers
    z_dim: int
    leaky_slope: float = 0.2
    output_dropout_rate: float = 0.0

    def __post_init__(self):
        _check_chain(self.layers, "generator")
        if self.z_dim <= 0:
            raise ValidationError(f"z_dim must be positive, got {self.z_dim}")
        if self.layers[0][0].shape[0] <= self.z_dim:
            raise ValidationError(
                "generator input width must exceed z_dim to hold the class vector"
            )
        if not 0.0 <= self.output_dropout_rate < 1.0:
            raise ValidationError("output_dropout_rate must lie in [0, 1)")

    @property
    def num_classes(self) -> int:
        return self.layers[0][0].shape[0] - self.z_dim

    @property
    def output_dim(self) -> int:
        return self.layers[-1][0].shape[1]


@dataclass
class DiscriminatorParams:
    """MLP from an embedding to k+1 class logits.

    ``feature_layer_index`` names the hidden layer whose activations feed
    feature matching.
    """

    layers: Layers
    input_dropout_rate: float = 0.0
    feature_layer_index: int = 0
    leaky_slope: float = 0.2

    def __post_init__(self):
        _check_chain(self.layers, "discriminator")
        n_hidden = len(self.layers) - 1
        if n_hidden < 1:
            raise ValidationError(
                "discriminator needs at least one hidden layer for features"
            )
        if not 0 <= self.feature_layer_index < n_hidden:
            raise ValidationError(
                f"feature_layer_index {self.feature_layer_index} not a hidden layer"
            )
        if not 0.0 <= self.input_dropout_rate < 1.0:
            raise ValidationError("input_dropout_rate must lie in [0, 1)")
        if self.num_classes < 2:
            raise ValidationError("discriminator must output at least 3 logits (k+1)")

    @property
    def input_dim(self) -> int:
        return self.layers[0][0].shape[0]

    @property
    def num_classes(self) -> int:
        """Number of real classes k (output width minus the fake class)."""
        return self.layers[-1][0].shape[1] - 1


@dataclass
class GanModel:
    """Parameter sets plus optimizer state; the unit of checkpointing."""

    discriminator: DiscriminatorParams
    generator: Optional[GeneratorParams] = None
    opt_discriminator: Optional["AdamState"] = None  # noqa: F821 (optim.AdamState)
    opt_generator: Optional["AdamState"] = None

    def copy(self) -> "GanModel":
        def copy_layers(layers):
            return [(w.copy(), b.copy()) for w, b in layers]

        gen = None
        if self.generator is not None:
            gen = replace(self.generator, layers=copy_layers(self.generator.layers))
        disc = replace(
            self.discriminator, layers=copy_layers(self.discriminator.layers)
        )
        return GanModel(
            discriminator=disc,
            generator=gen,
            opt_discriminator=(
                self.opt_discriminator.copy() if self.opt_discriminator else None
            ),
            opt_generator=self.opt_generator.copy() if self.opt_generator else None,
        )


def leaky_relu(x: np.ndarray, slope: float) -> np.ndarray:
    return np.where(x >= 0, x, slope * x)


def leaky_relu_grad(x: np.ndarray, slope: float) -> np.ndarray:
    return np.where(x >= 0, 1.0, slope)


def dropout_mask(rng: np.random.Generator, shape, rate: float) -> np.ndarray:
    """Inverted-dropout multiplier: zero with probability ``rate``, else
    1/(1-rate) so expectations match eval mode."""
    keep = rng.random(shape) >= rate
    return keep / (1.0 - rate)


def _as_batch(x, width: int, name: str) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    if single:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != width:
        raise ParameterError(f"{name} must have width {width}, got shape {arr.shape}")
    if arr.size and not np.isfinite(arr).all():
        raise ValidationError(f"{name} contains non-finite values")
    return arr, single


def generator_forward(
    params: GeneratorParams,
    noise,
    class_index,
    train_mode: bool = False,
    rng: np.random.Generator | None = None,
):
    """Map noise plus a class condition to a synthetic embedding.

    Accepts a single (z_dim,) vector with an int class or a (B, z_dim)
    batch with an index array. Dropout on the output is active only in
    train mode and draws its mask from ``rng``.
    """
    out, _ = _generator_forward_cached(params, noise, class_index, train_mode, rng)
    return out


def _generator_forward_cached(params, noise, class_index, train_mode, rng):
    k = params.num_classes
    z, single = _as_batch(noise, params.z_dim, "noise")
    classes = np.atleast_1d(np.asarray(class_index, dtype=np.int64))
    if classes.shape[0] != z.shape[0]:
        raise ParameterError("class_index batch size must match noise batch size")
    if classes.size and (classes.min() < 0 or classes.max() >= k):
        raise ParameterError(
            f"class_index must lie in 0..{k - 1}, got {classes.min()}..{classes.max()}"
        )
    onehot = np.zeros((z.shape[0], k), dtype=np.float64)
    onehot[np.arange(z.shape[0]), classes] = 1.0
    h = np.concatenate([z, onehot], axis=1)

    cache = {"inputs": [], "preacts": [], "out_mask": None}
    last = len(params.layers) - 1
    for i, (w, b) in enumerate(params.layers):
        cache["inputs"].append(h)
        pre = h @ w + b
        cache["preacts"].append(pre)
        h = leaky_relu(pre, params.leaky_slope) if i < last else pre
    if train_mode and params.output_dropout_rate > 0.0:
        if rng is None:
            raise ParameterError("train-mode dropout needs an rng")
        mask = dropout_mask(rng, h.shape, params.output_dropout_rate)
        cache["out_mask"] = mask
        h = h * mask
    return (h[0] if single else h), cache


def _generator_backward(params, cache, dout) -> Layers:
    """Gradients of a scalar loss w.r.t. generator parameters given
    dloss/doutput; returns (dW, db) per layer."""
    d = np.atleast_2d(dout)
    if cache["out_mask"] is not None:
        d = d * cache["out_mask"]
    grads: Layers = [None] * len(params.layers)  # type: ignore[list-item]
    last = len(params.layers) - 1
    for i in range(last, -1, -1):
        dz = d if i == last else d * leaky_relu_grad(
            cache["preacts"][i], params.leaky_slope
        )
        grads[i] = (cache["inputs"][i].T @ dz, dz.sum(axis=0))
        if i > 0:
            d = dz @ params.layers[i][0].T
    return grads


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def discriminator_forward(
    params: DiscriminatorParams,
    x,
    train_mode: bool = False,
    rng: np.random.Generator | None = None,
):
    """Class probabilities over k+1 classes plus feature-layer activations."""
    logits, features, _ = _discriminator_forward_cached(params, x, train_mode, rng)
    probs = softmax(logits)
    return probs, features


def _discriminator_forward_cached(params, x, train_mode, rng):
    h, single = _as_batch(x, params.input_dim, "discriminator input")
    cache = {"inputs": [], "preacts": [], "in_mask": None, "single": single}
    if train_mode and params.input_dropout_rate > 0.0:
        if rng is None:
            raise ParameterError("train-mode dropout needs an rng")
        mask = dropout_mask(rng, h.shape, params.input_dropout_rate)
        cache["in_mask"] = mask
        h = h * mask
    features = None
    last = len(params.layers) - 1
    for i, (w, b) in enumerate(params.layers):
        cache["inputs"].append(h)
        pre = h @ w + b
        cache["preacts"].append(pre)
        if i < last:
            h = leaky_relu(pre, params.leaky_slope)
            if i == params.feature_layer_index:
                features = h
        else:
            h = pre
    logits = h
    if single:
        return logits[0], features[0], cache
    return logits, features, cache


def _discriminator_backward(
    params, cache, dlogits, dfeatures=None
) -> tuple[Layers, np.ndarray]:
    """Backprop through the discriminator.

    ``dfeatures`` (if given) is injected at the feature layer's activation
    output. Returns ((dW, db) per layer, dloss/dinput).
    """
    d = np.atleast_2d(dlogits)
    grads: Layers = [None] * len(params.layers)  # type: ignore[list-item]
    last = len(params.layers) - 1
    for i in range(last, -1, -1):
        if i < last:
            if dfeatures is not None and i == params.feature_layer_index:
                d = d + np.atleast_2d(dfeatures)
            dz = d * leaky_relu_grad(cache["preacts"][i], params.leaky_slope)
        else:
            dz = d
        grads[i] = (cache["inputs"][i].T @ dz, dz.sum(axis=0))
        d = dz @ params.layers[i][0].T
    if cache["in_mask"] is not None:
        d = d * cache["in_mask"]
    return grads, d


def init_model(
    k: int,
    embedding_dim: int,
    z_dim: int,
    *,
    generator_hidden_layers: int = 1,
    discriminator_hidden_layers: int = 1,
    dropout: float = 0.2,
    leaky_slope: float = 0.2,
    seed: int = 0,
) -> GanModel:
    """Fresh model with Glorot-normal weights; hidden width equals the
    embedding dim on both networks."""
    if k < 2:
        raise ParameterError(f"need at least 2 classes, got {k}")
    if generator_hidden_layers < 1 or discriminator_hidden_layers < 1:
        raise ParameterError("both networks need at least one hidden layer")
    rng = np.random.default_rng(seed)

    def glorot(n_in, n_out):
        std = np.sqrt(2.0 / (n_in + n_out))
        w = rng.normal(0.0, std, size=(n_in, n_out))
        return w, np.zeros(n_out)

    h = embedding_dim
    g_dims = [z_dim + k] + [h] * generator_hidden_layers + [h]
    d_dims = [h] + [h] * discriminator_hidden_layers + [k + 1]
    generator = GeneratorParams(
        layers=[glorot(a, b) for a, b in zip(g_dims[:-1], g_dims[1:])],
        z_dim=z_dim,
        leaky_slope=leaky_slope,
        output_dropout_rate=dropout,
    )
    discriminator = DiscriminatorParams(
        layers=[glorot(a, b) for a, b in zip(d_dims[:-1], d_dims[1:])],
        input_dropout_rate=dropout,
        feature_layer_index=discriminator_hidden_layers - 1,
        leaky_slope=leaky_slope,
    )
    return GanModel(discriminator=discriminator, generator=generator)


def flatten_layers(layers: Layers) -> np.ndarray:
    return np.concatenate([np.concatenate([w.ravel(), b]) for w, b in layers])


def assign_from_flat(layers: Layers, flat: np.ndarray) -> None:
    pos = 0
    for w, b in layers:
        w[...] = flat[pos : pos + w.size].reshape(w.shape)
        pos += w.size
        b[...] = flat[pos : pos + b.size]
        pos += b.size
    if pos != flat.size:
        raise ParameterError("flat vector length does not match parameter count")
