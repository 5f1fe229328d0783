"""Intent prediction with a trained discriminator.

Inference always runs with dropout disabled, predicts over the k real
classes only (the synthetic class is excluded from the argmax), and
reports confidence as the chosen class's probability renormalized over
the real classes. Argmax ties resolve to the lowest class index.
"""

from __future__ import annotations

import numpy as np

from ..embeddings import EmbeddingSet
from ..errors import ValidationError
from .nets import DiscriminatorParams, GanModel, discriminator_forward


def classify_matrix(
    disc: DiscriminatorParams, x: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """(predicted class indices, renormalized confidences) for rows of x."""
    if x.shape[0] == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.float64)
    probs, _ = discriminator_forward(disc, x, train_mode=False)
    probs = np.atleast_2d(probs)
    real = probs[:, : disc.num_classes]
    pred = real.argmax(axis=1)
    confidence = real[np.arange(len(pred)), pred] / real.sum(axis=1)
    return pred, confidence


def classify(
    model: GanModel, embeddings: EmbeddingSet
) -> dict[str, tuple[int, float]]:
    """record_id -> (intent index, confidence) for every embedded record."""
    disc = model.discriminator
    if embeddings.dim != disc.input_dim:
        raise ValidationError(
            f"embedding dim {embeddings.dim} != discriminator input {disc.input_dim}"
        )
    ids = list(embeddings.rows)
    pred, conf = classify_matrix(disc, embeddings.matrix(ids))
    return {
        record_id: (int(p), float(c)) for record_id, p, c in zip(ids, pred, conf)
    }
