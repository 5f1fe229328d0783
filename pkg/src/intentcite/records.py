"""Citation records: JSONL parsing and CSV round-tripping.

Scholarly corpora arrive as line-delimited JSON with per-dataset key
names, so the parser takes a ``field_map`` describing which keys hold the
context, the citing/cited identifiers, and the optional section, record id
and gold label. Parsing is best effort: a malformed or incomplete line is
skipped and reported, never fatal.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .errors import ValidationError
from .schema import LabelSchema

CSV_HEADER = ["record_id", "citing_id", "cited_id", "section", "context", "gold_intent"]

REQUIRED_FIELDS = ("context", "citing_id", "cited_id")
OPTIONAL_FIELDS = ("record_id", "section", "gold_intent")


@dataclass(frozen=True)
class CitationRecord:
    record_id: str
    citing_id: str
    cited_id: str
    context: str
    section: Optional[str] = None
    gold_intent: Optional[int] = None


@dataclass(frozen=True)
class SkippedLine:
    line_number: int  # 1-based
    reason: str


@dataclass
class ParseResult:
    records: list[CitationRecord] = field(default_factory=list)
    skips: list[SkippedLine] = field(default_factory=list)

    @property
    def n_skipped(self) -> int:
        return len(self.skips)


def _lookup(obj, dotted_key: str):
    """Fetch a possibly nested value; dots descend into sub-objects."""
    value = obj
    for part in dotted_key.split("."):
        if not isinstance(value, dict) or part not in value:
            return None
        value = value[part]
    return value


def parse_jsonl(
    lines: Iterable[str],
    field_map: dict,
    schema: LabelSchema | None = None,
) -> ParseResult:
    """Parse line-delimited JSON into citation records.

    ``field_map`` maps the canonical field names (``context``, ``citing_id``,
    ``cited_id`` required; ``record_id``, ``section``, ``gold_intent``
    optional) to the JSON keys holding them; dotted keys reach into nested
    objects. Records without a mapped ``record_id`` get ``line-<n>``.
    Gold labels may be schema label names (resolved via ``schema``) or
    integer indices.
    """
    for name in REQUIRED_FIELDS:
        if name not in field_map:
            raise ValidationError(f"field_map must name a key for {name!r}")
    unknown = set(field_map) - set(REQUIRED_FIELDS) - set(OPTIONAL_FIELDS)
    if unknown:
        raise ValidationError(f"field_map has unknown entries: {sorted(unknown)}")

    result = ParseResult()
    seen_ids: set[str] = set()
    for line_number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            result.skips.append(SkippedLine(line_number, f"malformed JSON: {exc.msg}"))
            continue
        if not isinstance(obj, dict):
            result.skips.append(SkippedLine(line_number, "line is not a JSON object"))
            continue

        values = {}
        missing = None
        for name in REQUIRED_FIELDS:
            raw = _lookup(obj, field_map[name])
            if raw is None or raw == "":
                missing = name
                break
            values[name] = str(raw)
        if missing is not None:
            result.skips.append(SkippedLine(line_number, f"missing field {missing!r}"))
            continue

        record_id = None
        if "record_id" in field_map:
            raw = _lookup(obj, field_map["record_id"])
            if raw is not None and raw != "":
                record_id = str(raw)
        if record_id is None:
            record_id = f"line-{line_number}"
        if record_id in seen_ids:
            result.skips.append(
                SkippedLine(line_number, f"duplicate record_id {record_id!r}")
            )
            continue

        section = None
        if "section" in field_map:
            raw = _lookup(obj, field_map["section"])
            if raw is not None and raw != "":
                section = str(raw)

        gold_intent = None
        if "gold_intent" in field_map:
            raw = _lookup(obj, field_map["gold_intent"])
            if raw is not None and raw != "":
                if isinstance(raw, bool):
                    result.skips.append(
                        SkippedLine(line_number, "gold label is not a name or index")
                    )
                    continue
                if isinstance(raw, int):
                    gold_intent = raw
                elif schema is not None:
                    try:
                        gold_intent = schema.index_of(str(raw))
                    except ValidationError:
                        result.skips.append(
                            SkippedLine(line_number, f"unknown gold label {raw!r}")
                        )
                        continue
                else:
                    result.skips.append(
                        SkippedLine(
                            line_number, "gold label given as name but no schema loaded"
                        )
                    )
                    continue
                if schema is not None and not 0 <= gold_intent < schema.k:
                    result.skips.append(
                        SkippedLine(line_number, f"gold index {gold_intent} out of range")
                    )
                    continue

        seen_ids.add(record_id)
        result.records.append(
            CitationRecord(
                record_id=record_id,
                citing_id=values["citing_id"],
                cited_id=values["cited_id"],
                context=values["context"],
                section=section,
                gold_intent=gold_intent,
            )
        )
    return result


def write_csv(records: Iterable[CitationRecord], path) -> int:
    """Write records as RFC-4180 CSV; returns the data row count.

    Line endings are LF so output bytes are platform independent.
    """
    path = Path(path)
    count = 0
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for rec in records:
                writer.writerow(
                    [
                        rec.record_id,
                        rec.citing_id,
                        rec.cited_id,
                        rec.section if rec.section is not None else "",
                        rec.context,
                        rec.gold_intent if rec.gold_intent is not None else "",
                    ]
                )
                count += 1
    except OSError as exc:
        raise OSError(f"cannot write records CSV to {path}: {exc}") from exc
    return count


def read_csv(path) -> list[CitationRecord]:
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise ValidationError(
                f"{path}: unexpected header {header!r}, want {CSV_HEADER!r}"
            )
        records = []
        for row in reader:
            if len(row) != len(CSV_HEADER):
                raise ValidationError(f"{path}: row with {len(row)} fields: {row!r}")
            record_id, citing, cited, section, context, gold = row
            records.append(
                CitationRecord(
                    record_id=record_id,
                    citing_id=citing,
                    cited_id=cited,
                    context=context,
                    section=section or None,
                    gold_intent=int(gold) if gold != "" else None,
                )
            )
    return records
