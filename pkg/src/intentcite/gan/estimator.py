"""Scikit-learn style wrapper around the GAN classifier.

Follows the semi-supervised convention of sklearn's label propagation:
samples with ``y == -1`` are treated as unlabeled and strengthen the
discriminator through the adversarial objective only.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from ..embeddings import EmbeddingSet
from ..errors import ValidationError
from ..records import CitationRecord
from ..splits import make_split
from ..validation import check_matrix
from .inference import classify_matrix
from .nets import discriminator_forward, init_model
from .training import TrainConfig, train


class GanIntentClassifier(BaseEstimator, ClassifierMixin):
    """Semi-supervised GAN classifier over embedding vectors.

    Parameters mirror the training configuration; defaults follow the
    SciCite setup. ``validation_fraction`` carves a stratified dev split
    from the labeled data for best-epoch selection (0 keeps the final
    epoch).
    """

    def __init__(
        self,
        z_dim: int = 100,
        generator_hidden_layers: int = 1,
        discriminator_hidden_layers: int = 1,
        dropout: float = 0.2,
        leaky_slope: float = 0.2,
        batch_size: int = 32,
        lr_discriminator: float = 2e-7,
        lr_generator: float = 2e-7,
        adam_epsilon: float = 2e-7,
        epochs: int = 20,
        warmup_proportion: float = 0.1,
        validation_fraction: float = 0.1,
        semi_supervised: bool = True,
        random_state: int = 0,
    ):
        self.z_dim = z_dim
        self.generator_hidden_layers = generator_hidden_layers
        self.discriminator_hidden_layers = discriminator_hidden_layers
        self.dropout = dropout
        self.leaky_slope = leaky_slope
        self.batch_size = batch_size
        self.lr_discriminator = lr_discriminator
        self.lr_generator = lr_generator
        self.adam_epsilon = adam_epsilon
        self.epochs = epochs
        self.warmup_proportion = warmup_proportion
        self.validation_fraction = validation_fraction
        self.semi_supervised = semi_supervised
        self.random_state = random_state

    def fit(self, X, y):
        X = check_matrix(X, "X")
        y = np.asarray(y)
        if y.shape[0] != X.shape[0]:
            raise ValidationError(
                f"X has {X.shape[0]} rows but y has {y.shape[0]} entries"
            )
        labeled_mask = y != -1
        self.classes_ = np.unique(y[labeled_mask])
        if len(self.classes_) < 2:
            raise ValidationError("need labeled examples from at least 2 classes")
        class_index = {c: i for i, c in enumerate(self.classes_)}

        records = []
        embeddings = EmbeddingSet(dim=X.shape[1])
        labels = {}
        for i in range(X.shape[0]):
            record_id = str(i)
            gold = class_index[y[i]] if labeled_mask[i] else None
            records.append(
                CitationRecord(record_id, citing_id="", cited_id="", context="",
                               gold_intent=gold)
            )
            embeddings.add(record_id, X[i])
            if gold is not None:
                labels[record_id] = gold

        split = make_split(
            records,
            labeled_fraction=1.0,
            seed=self.random_state,
            dev_fraction=self.validation_fraction,
        )
        model = init_model(
            k=len(self.classes_),
            embedding_dim=X.shape[1],
            z_dim=self.z_dim,
            generator_hidden_layers=self.generator_hidden_layers,
            discriminator_hidden_layers=self.discriminator_hidden_layers,
            dropout=self.dropout,
            leaky_slope=self.leaky_slope,
            seed=self.random_state,
        )
        config = TrainConfig(
            batch_size=self.batch_size,
            lr_discriminator=self.lr_discriminator,
            lr_generator=self.lr_generator,
            adam_epsilon=self.adam_epsilon,
            epochs=self.epochs,
            warmup_proportion=self.warmup_proportion,
            seed=self.random_state,
        )
        result = train(
            model, split, embeddings, labels, config,
            semi_supervised=self.semi_supervised,
        )
        self.model_ = result.model
        self.history_ = result.log
        self.best_epoch_ = result.best_epoch
        self.n_features_in_ = X.shape[1]
        return self

    def _check_fitted_input(self, X) -> np.ndarray:
        if not hasattr(self, "model_"):
            raise ValidationError("estimator is not fitted; call fit first")
        return check_matrix(X, "X", n_cols=self.n_features_in_)

    def predict(self, X):
        X = self._check_fitted_input(X)
        pred, _ = classify_matrix(self.model_.discriminator, X)
        return self.classes_[pred]

    def predict_proba(self, X):
        """Probabilities over the real classes, renormalized so the
        synthetic class is excluded."""
        X = self._check_fitted_input(X)
        probs, _ = discriminator_forward(self.model_.discriminator, X)
        real = np.atleast_2d(probs)[:, : len(self.classes_)]
        return real / real.sum(axis=1, keepdims=True)
