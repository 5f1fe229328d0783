"""Classification metrics: per-class precision/recall/F1 and confusion."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..errors import ValidationError
from ..schema import LabelSchema


@dataclass(frozen=True)
class ClassMetrics:
    label: str
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class EvalReport:
    per_class: list[ClassMetrics]
    macro_f1: float
    micro_f1: float
    confusion: np.ndarray  # rows = gold, columns = predicted
    n_examples: int

    @property
    def macro_f1_percent(self) -> float:
        return 100.0 * self.macro_f1

    @property
    def n_errors(self) -> int:
        return self.n_examples - int(np.trace(self.confusion))


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def macro_f1_from_counts(confusion: np.ndarray) -> float:
    """Unweighted mean per-class F1; empty classes count as 0."""
    k = confusion.shape[0]
    f1s = []
    for c in range(k):
        tp = confusion[c, c]
        pred_c = confusion[:, c].sum()
        gold_c = confusion[c, :].sum()
        precision = tp / pred_c if pred_c else 0.0
        recall = tp / gold_c if gold_c else 0.0
        f1s.append(_f1(precision, recall))
    return float(np.mean(f1s))


def evaluate(
    predictions: Mapping[str, int],
    gold: Mapping[str, int],
    schema: LabelSchema,
) -> EvalReport:
    """Score predictions against gold labels keyed by the same ids."""
    missing_pred = sorted(set(gold) - set(predictions))
    missing_gold = sorted(set(predictions) - set(gold))
    if missing_pred or missing_gold:
        parts = []
        if missing_pred:
            parts.append(f"ids without predictions: {missing_pred[:10]}")
        if missing_gold:
            parts.append(f"ids without gold labels: {missing_gold[:10]}")
        raise ValidationError("prediction/gold id mismatch; " + "; ".join(parts))

    k = schema.k
    confusion = np.zeros((k, k), dtype=np.int64)
    for record_id, gold_intent in gold.items():
        pred_intent = predictions[record_id]
        if not 0 <= gold_intent < k:
            raise ValidationError(f"gold intent {gold_intent} out of range for {record_id!r}")
        if not 0 <= pred_intent < k:
            raise ValidationError(f"predicted intent {pred_intent} out of range for {record_id!r}")
        confusion[gold_intent, pred_intent] += 1

    per_class = []
    for c in range(k):
        tp = int(confusion[c, c])
        pred_c = int(confusion[:, c].sum())
        gold_c = int(confusion[c, :].sum())
        precision = tp / pred_c if pred_c else 0.0
        recall = tp / gold_c if gold_c else 0.0
        per_class.append(
            ClassMetrics(
                label=schema.name_of(c),
                precision=precision,
                recall=recall,
                f1=_f1(precision, recall),
                support=gold_c,
            )
        )
    n = int(confusion.sum())
    micro = float(np.trace(confusion) / n) if n else 0.0
    return EvalReport(
        per_class=per_class,
        macro_f1=float(np.mean([m.f1 for m in per_class])),
        micro_f1=micro,
        confusion=confusion,
        n_examples=n,
    )
