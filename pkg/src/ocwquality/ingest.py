"""Corpus loading, cleanup, and random sampling.

A corpus file is JSON Lines, one course per line. Loading applies the
cleanup rules that turn a raw collection into a trustable one: records that
fail validation, point at nothing (empty URL), or demonstrably contain no
learning material are dropped and accounted for, never silently discarded.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .model import CourseRecord, validate


class DropReason(str, Enum):
    BROKEN_LINK = "broken-link"
    EMPTY_MATERIAL = "empty-material"
    INVALID_RECORD = "invalid-record"


@dataclass(frozen=True)
class CleanupReport:
    """Outcome of corpus cleanup: which course ids survived and which were
    dropped, with the rule that removed each one. Kept and dropped ids
    partition the input."""

    kept: tuple[str, ...]
    dropped: tuple[tuple[str, DropReason], ...]

    @property
    def clean(self) -> bool:
        return not self.dropped

    def to_dict(self) -> dict:
        return {
            "kept": list(self.kept),
            "dropped": [
                {"id": course_id, "reason": reason.value}
                for course_id, reason in self.dropped
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _drop_reason(record: CourseRecord) -> DropReason | None:
    """Apply cleanup rules in order of severity; None means keep."""
    if validate(record):
        return DropReason.INVALID_RECORD
    if not record.url.strip():
        return DropReason.BROKEN_LINK
    if record.probe_log is not None and record.probe_log.samples:
        if all(s.material_present is False for s in record.probe_log.samples):
            return DropReason.EMPTY_MATERIAL
    return None


def clean_records(records: list[CourseRecord]) -> tuple[list[CourseRecord], CleanupReport]:
    """Run cleanup over already-parsed records, preserving input order.

    A record lacking a probe log is kept: absence of availability evidence
    is not evidence of empty material.
    """
    kept: list[CourseRecord] = []
    kept_ids: list[str] = []
    dropped: list[tuple[str, DropReason]] = []
    seen: set[str] = set()
    for record in records:
        if record.id in seen:
            dropped.append((record.id, DropReason.INVALID_RECORD))
            continue
        seen.add(record.id)
        reason = _drop_reason(record)
        if reason is None:
            kept.append(record)
            kept_ids.append(record.id)
        else:
            dropped.append((record.id, reason))
    return kept, CleanupReport(kept=tuple(kept_ids), dropped=tuple(dropped))


def load_corpus(path: str | Path) -> tuple[list[CourseRecord], CleanupReport]:
    """Parse a JSON Lines corpus file and apply the cleanup rules.

    Unreadable files raise OSError (fatal). A malformed line is not fatal:
    it becomes a dropped entry with a synthetic ``line-N`` id and processing
    continues. Every returned record passes :func:`validate` cleanly, and
    output order matches input order.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")

    records: list[CourseRecord] = []
    parse_failures: list[tuple[int, str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(CourseRecord.from_json(line))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError):
            parse_failures.append((lineno, f"line-{lineno}"))

    kept, report = clean_records(records)
    if parse_failures:
        dropped = list(report.dropped)
        dropped.extend(
            (synthetic_id, DropReason.INVALID_RECORD)
            for _lineno, synthetic_id in parse_failures
        )
        report = CleanupReport(kept=report.kept, dropped=tuple(dropped))
    return kept, report


def sample(records: list[CourseRecord], n: int, seed: int) -> list[CourseRecord]:
    """Draw ``n`` distinct records uniformly without replacement.

    Deterministic for a fixed seed; there is deliberately no ambient-RNG
    variant, so observatory runs stay reproducible.
    """
    if n < 1:
        raise ValueError(f"sample size must be positive, got {n}")
    if n > len(records):
        raise ValueError(
            f"sample size {n} exceeds population size {len(records)}"
        )
    return random.Random(seed).sample(records, n)
