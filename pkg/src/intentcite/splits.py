"""Deterministic stratified train/dev/test splitting."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ParameterError, ValidationError
from .records import CitationRecord
from .schema import LabelSchema

SPLIT_CSV_HEADER = ["record_id", "subset", "gold_intent"]
_SUBSETS = ("labeled", "unlabeled", "dev", "test")


@dataclass(frozen=True)
class DatasetSplit:
    labeled_train: tuple[str, ...]
    unlabeled_train: tuple[str, ...]
    dev: tuple[str, ...]
    test: tuple[str, ...]

    def __post_init__(self):
        groups = [self.labeled_train, self.unlabeled_train, self.dev, self.test]
        all_ids = [i for group in groups for i in group]
        if len(set(all_ids)) != len(all_ids):
            raise ValidationError("split sets must be pairwise disjoint")

    @property
    def all_ids(self) -> tuple[str, ...]:
        return self.labeled_train + self.unlabeled_train + self.dev + self.test


def _round_count(fraction: float, size: int) -> int:
    return int(round(fraction * size))


def make_split(
    records: Sequence[CitationRecord],
    labeled_fraction: float,
    seed: int,
    *,
    dev_fraction: float = 0.0,
    test_fraction: float = 0.0,
    schema: LabelSchema | None = None,
) -> DatasetSplit:
    """Partition records into labeled/unlabeled train, dev and test ids.

    Stratified per gold class with a seeded shuffle, so the labeled set
    mirrors the full class distribution to within rounding. Records
    without a gold label always land in ``unlabeled_train``. Raises when
    ``labeled_fraction`` would leave any class without a labeled example.
    """
    if not 0.0 < labeled_fraction <= 1.0:
        raise ParameterError(
            f"labeled_fraction must lie in (0, 1], got {labeled_fraction!r}"
        )
    if dev_fraction < 0 or test_fraction < 0 or dev_fraction + test_fraction >= 1.0:
        raise ParameterError("dev_fraction + test_fraction must lie in [0, 1)")

    by_class: dict[int, list[str]] = {}
    unlabeled: list[str] = []
    for rec in records:
        if rec.gold_intent is None:
            unlabeled.append(rec.record_id)
        else:
            by_class.setdefault(rec.gold_intent, []).append(rec.record_id)

    if schema is not None:
        missing = [c for c in range(schema.k) if c not in by_class]
        if missing:
            raise ValidationError(
                f"no gold records for classes {missing}; cannot stratify"
            )
    if not by_class:
        raise ValidationError("no records carry a gold intent; nothing to stratify")

    rng = np.random.default_rng(seed)
    labeled: list[str] = []
    dev: list[str] = []
    test: list[str] = []
    for cls in sorted(by_class):
        ids = list(by_class[cls])
        order = rng.permutation(len(ids))
        shuffled = [ids[i] for i in order]

        n_test = _round_count(test_fraction, len(shuffled))
        n_dev = _round_count(dev_fraction, len(shuffled))
        test.extend(shuffled[:n_test])
        dev.extend(shuffled[n_test : n_test + n_dev])
        remaining = shuffled[n_test + n_dev :]

        n_labeled = _round_count(labeled_fraction, len(remaining))
        if n_labeled == 0:
            raise ParameterError(
                f"labeled_fraction {labeled_fraction} leaves class {cls} with no "
                f"labeled examples ({len(remaining)} candidates)"
            )
        labeled.extend(remaining[:n_labeled])
        unlabeled.extend(remaining[n_labeled:])

    return DatasetSplit(
        labeled_train=tuple(labeled),
        unlabeled_train=tuple(unlabeled),
        dev=tuple(dev),
        test=tuple(test),
    )


def official_split(
    train: Iterable[CitationRecord],
    test: Iterable[CitationRecord],
    dev: Iterable[CitationRecord] = (),
    *,
    labeled_fraction: float = 1.0,
    seed: int = 0,
) -> DatasetSplit:
    """Preserve a published train/dev/test partition as-is.

    Only the train portion is optionally split into labeled and unlabeled
    parts; dev and test ids pass through untouched.
    """
    train = list(train)
    inner = make_split(train, labeled_fraction, seed) if train else None
    return DatasetSplit(
        labeled_train=inner.labeled_train if inner else (),
        unlabeled_train=inner.unlabeled_train if inner else (),
        dev=tuple(r.record_id for r in dev),
        test=tuple(r.record_id for r in test),
    )


def write_split_csv(split: DatasetSplit, labels: Mapping[str, int], path) -> int:
    """Self-contained split file: ``record_id,subset,gold_intent``.

    Gold labels are carried for labeled/dev/test rows so training needs
    no second lookup; unlabeled rows leave the label cell empty even when
    a gold label is known (that is the masking).
    """
    path = Path(path)
    count = 0
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SPLIT_CSV_HEADER)
        for subset, ids in zip(
            _SUBSETS, (split.labeled_train, split.unlabeled_train, split.dev, split.test)
        ):
            for record_id in ids:
                gold = "" if subset == "unlabeled" else labels.get(record_id, "")
                writer.writerow([record_id, subset, gold])
                count += 1
    return count


def read_split_csv(path) -> tuple[DatasetSplit, dict[str, int]]:
    path = Path(path)
    groups: dict[str, list[str]] = {name: [] for name in _SUBSETS}
    labels: dict[str, int] = {}
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SPLIT_CSV_HEADER:
            raise ValidationError(
                f"{path}: unexpected header {header!r}, want {SPLIT_CSV_HEADER!r}"
            )
        for row in reader:
            if len(row) != 3:
                raise ValidationError(f"{path}: malformed split row {row!r}")
            record_id, subset, gold = row
            if subset not in groups:
                raise ValidationError(f"{path}: unknown subset {subset!r}")
            groups[subset].append(record_id)
            if gold != "":
                labels[record_id] = int(gold)
    split = DatasetSplit(
        labeled_train=tuple(groups["labeled"]),
        unlabeled_train=tuple(groups["unlabeled"]),
        dev=tuple(groups["dev"]),
        test=tuple(groups["test"]),
    )
    return split, labels
