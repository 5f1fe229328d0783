"""Intent label schemas.

A schema is an ordered list of intent names; the file format is one label
per line, line order defining indices ``0..k-1``. Index ``k`` is reserved
for synthetic examples produced during adversarial training and never
appears as a real label.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError

# Display name for the reserved synthetic class; not a legal schema label.
FAKE_LABEL = "<fake>"


@dataclass(frozen=True)
class LabelSchema:
    labels: tuple[str, ...]

    def __init__(self, labels):
        object.__setattr__(self, "labels", tuple(labels))
        self._validate()

    def _validate(self):
        if len(self.labels) < 2:
            raise ValidationError(
                f"schema needs at least 2 labels, got {len(self.labels)}"
            )
        if len(set(self.labels)) != len(self.labels):
            raise ValidationError("schema labels must be unique")
        for label in self.labels:
            if not label:
                raise ValidationError("schema labels must be non-empty")
            if label == FAKE_LABEL:
                raise ValidationError(
                    f"{FAKE_LABEL!r} is reserved for the synthetic class"
                )

    @property
    def k(self) -> int:
        return len(self.labels)

    @property
    def reserved_fake_index(self) -> int:
        return self.k

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValidationError(
                f"unknown intent label {label!r}; schema has {list(self.labels)}"
            ) from None

    def name_of(self, index: int) -> str:
        if not 0 <= index < self.k:
            raise ValidationError(f"intent index {index} out of range 0..{self.k - 1}")
        return self.labels[index]


def load_schema(path) -> LabelSchema:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    labels = [line.strip() for line in lines if line.strip()]
    return LabelSchema(labels)


def save_schema(schema: LabelSchema, path) -> None:
    Path(path).write_text("\n".join(schema.labels) + "\n", encoding="utf-8")
