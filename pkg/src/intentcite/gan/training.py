"""Adversarial training loop over precomputed embeddings.

Each batch runs one discriminator update followed by one generator
update, with Adam and a shared linear warmup/decay schedule. Every source
of randomness (shuffling, noise, conditioning classes, dropout masks)
draws from a single seeded generator in a fixed order, so a run is fully
reproducible from its seed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from ..embeddings import EmbeddingSet
from ..errors import ParameterError, ValidationError
from ..floatfmt import fmt_float
from ..splits import DatasetSplit
from .inference import classify_matrix
from .losses import loss_discriminator, loss_generator
from .metrics import macro_f1_from_counts
from .nets import GanModel, generator_forward
from .optim import adam_init, adam_step, lr_multiplier

TRAIN_LOG_HEADER = ["epoch", "L_sup", "L_unsup", "L_G", "dev_macro_f1"]


@dataclass
class TrainConfig:
    """Optimization hyperparameters (defaults follow the SciCite setup)."""

    batch_size: int = 32
    lr_discriminator: float = 2e-7
    lr_generator: float = 2e-7
    adam_epsilon: float = 2e-7
    epochs: int = 20
    warmup_proportion: float = 0.10
    seed: int = 42
    max_seq_len: int = 160  # informational; consumed by the embedding exporter

    def __post_init__(self):
        if self.batch_size < 1:
            raise ParameterError(f"batch_size must be >= 1, got {self.batch_size}")
        for name in ("lr_discriminator", "lr_generator", "adam_epsilon"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be positive")
        if self.epochs < 0:
            raise ParameterError("epochs must be >= 0")
        if not 0.0 <= self.warmup_proportion < 1.0:
            raise ParameterError("warmup_proportion must lie in [0, 1)")


@dataclass
class EpochStats:
    epoch: int
    l_sup: float
    l_unsup: float
    l_g: float
    dev_macro_f1: float


@dataclass
class TrainResult:
    model: GanModel
    log: list[EpochStats] = field(default_factory=list)
    best_epoch: int = 0


def _check_inputs(model, split, embeddings, labels, semi_supervised):
    disc = model.discriminator
    k = disc.num_classes
    for record_id in split.all_ids:
        if record_id not in embeddings:
            raise ValidationError(f"no embedding for split record {record_id!r}")
    if semi_supervised and model.generator is None:
        raise ValidationError("semi-supervised training needs a generator")
    if embeddings.dim != disc.input_dim:
        raise ValidationError(
            f"embedding dim {embeddings.dim} != discriminator input {disc.input_dim}"
        )
    for record_id in list(split.labeled_train) + list(split.dev):
        if record_id not in labels:
            raise ValidationError(f"no gold label for record {record_id!r}")
        if not 0 <= labels[record_id] < k:
            raise ValidationError(f"label for {record_id!r} out of range 0..{k - 1}")


def _dev_macro_f1(model: GanModel, x_dev, y_dev, k: int) -> float:
    if len(y_dev) == 0:
        return float("nan")
    pred, _ = classify_matrix(model.discriminator, x_dev)
    counts = np.zeros((k, k), dtype=np.int64)
    np.add.at(counts, (y_dev, pred), 1)
    return macro_f1_from_counts(counts)


def train(
    model: GanModel,
    split: DatasetSplit,
    embeddings: EmbeddingSet,
    labels: Mapping[str, int],
    config: TrainConfig,
    *,
    semi_supervised: bool = True,
) -> TrainResult:
    """Train the GAN classifier, returning the best-dev checkpoint.

    ``labels`` must cover labeled_train and dev ids. With
    ``semi_supervised=False`` only the supervised loss trains the
    discriminator and the generator is left untouched (the ablation
    baseline). Without a dev set the final epoch is retained.
    """
    _check_inputs(model, split, embeddings, labels, semi_supervised)
    k = model.discriminator.num_classes

    x_labeled = embeddings.matrix(list(split.labeled_train))
    y_labeled = np.array([labels[i] for i in split.labeled_train], dtype=np.int64)
    x_unlabeled = embeddings.matrix(list(split.unlabeled_train))
    x_dev = embeddings.matrix(list(split.dev))
    y_dev = np.array([labels[i] for i in split.dev], dtype=np.int64)

    if config.epochs == 0:
        return TrainResult(model=model, log=[], best_epoch=0)
    if len(x_labeled) == 0:
        raise ValidationError("labeled_train is empty; nothing to supervise")

    work = model.copy()
    if work.opt_discriminator is None:
        work.opt_discriminator = adam_init(work.discriminator.layers)
    if semi_supervised and work.opt_generator is None:
        work.opt_generator = adam_init(work.generator.layers)

    n_train = len(x_labeled) + len(x_unlabeled)
    is_labeled = np.zeros(n_train, dtype=bool)
    is_labeled[: len(x_labeled)] = True
    x_train = np.concatenate([x_labeled, x_unlabeled], axis=0)
    y_train = np.concatenate(
        [y_labeled, np.full(len(x_unlabeled), -1, dtype=np.int64)]
    )

    rng = np.random.default_rng(config.seed)
    steps_per_epoch = (n_train + config.batch_size - 1) // config.batch_size
    total_steps = config.epochs * steps_per_epoch
    z_dim = work.generator.z_dim if work.generator is not None else 0

    log: list[EpochStats] = []
    best_f1 = -np.inf
    best_epoch = 0
    best_model = work.copy()
    have_dev = len(y_dev) > 0

    global_step = 0
    for epoch in range(1, config.epochs + 1):
        perm = rng.permutation(n_train)
        sum_sup = sum_unsup = sum_g = 0.0
        for lo in range(0, n_train, config.batch_size):
            idx = perm[lo : lo + config.batch_size]
            xb = x_train[idx]
            labeled_mask = is_labeled[idx]
            lx = xb[labeled_mask]
            ly = y_train[idx][labeled_mask]
            ux = xb[~labeled_mask]
            mult = lr_multiplier(global_step, total_steps, config.warmup_proportion)
            global_step += 1

            if semi_supervised:
                noise = rng.standard_normal((len(idx), z_dim))
                classes = rng.integers(0, k, size=len(idx))
                fake = generator_forward(
                    work.generator, noise, classes, train_mode=True, rng=rng
                )
            else:
                fake = np.zeros((0, embeddings.dim))

            d_loss = loss_discriminator(
                work.discriminator,
                lx,
                ly,
                ux,
                fake,
                train_mode=True,
                rng=rng,
                unsupervised=semi_supervised,
            )
            adam_step(
                work.discriminator.layers,
                d_loss.grads,
                work.opt_discriminator,
                config.lr_discriminator * mult,
                eps=config.adam_epsilon,
            )
            sum_sup += d_loss.l_sup
            sum_unsup += d_loss.l_unsup

            if semi_supervised:
                g_noise = rng.standard_normal((len(idx), z_dim))
                g_classes = rng.integers(0, k, size=len(idx))
                g_loss = loss_generator(
                    work.generator,
                    work.discriminator,
                    g_noise,
                    g_classes,
                    xb,
                    train_mode=True,
                    rng=rng,
                )
                adam_step(
                    work.generator.layers,
                    g_loss.grads,
                    work.opt_generator,
                    config.lr_generator * mult,
                    eps=config.adam_epsilon,
                )
                sum_g += g_loss.l_g

        dev_f1 = _dev_macro_f1(work, x_dev, y_dev, k)
        log.append(
            EpochStats(
                epoch=epoch,
                l_sup=sum_sup / steps_per_epoch,
                l_unsup=sum_unsup / steps_per_epoch,
                l_g=sum_g / steps_per_epoch,
                dev_macro_f1=dev_f1,
            )
        )
        if have_dev and dev_f1 > best_f1:
            best_f1 = dev_f1
            best_epoch = epoch
            best_model = work.copy()

    if not have_dev:
        best_model = work
        best_epoch = config.epochs
    return TrainResult(model=best_model, log=log, best_epoch=best_epoch)


def write_train_log(log: list[EpochStats], path) -> None:
    """Per-epoch CSV: ``epoch,L_sup,L_unsup,L_G,dev_macro_f1``."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRAIN_LOG_HEADER)
        for row in log:
            writer.writerow(
                [
                    row.epoch,
                    fmt_float(row.l_sup),
                    fmt_float(row.l_unsup),
                    fmt_float(row.l_g),
                    fmt_float(row.dev_macro_f1),
                ]
            )
