"""Per-course quality metrics.

Ten dimensions, one operation each plus a composing :func:`assess`. All
operations are pure and deterministic: they read only the record passed in
plus the observation date, never the network or the clock, so a corpus can
be assessed with arbitrary parallelism.

Conventions shared by the numeric metrics:

- Calendar arithmetic that reports whole years subtracts calendar years;
  real-valued "years" are day differences divided by 365.
- Quotients of counts are exact fractions, so identities such as
  mean-per-module x module-count == total hold without rounding error.
- Anything the record does not expose becomes ``unmeasured`` with a reason,
  never a zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from fractions import Fraction
from statistics import pstdev
from typing import Optional

from .model import (
    AttractivenessLevel,
    CourseRecord,
    CreationType,
    LicenseDescriptor,
    MetricValue,
    ProbeLog,
    ReuseFunction,
    RevisionHistory,
    SearchObservation,
    TranslationState,
    TriState,
    validate,
)

#: Days per year for real-valued recency figures.
DAYS_PER_YEAR = 365

#: Sentinel label for a course that no query surfaced within the rank cutoff.
ABOVE_CUTOFF = "above-cutoff"

#: Every metric id, keyed by dimension. A course assessment carries exactly
#: these ids, each measured or unmeasured.
METRIC_CATALOG: dict[str, tuple[str, ...]] = {
    "M1": ("M1.1", "M1.2", "M1.3_BY", "M1.3_SA", "M1.3_NC", "M1.3_ND", "M1.4", "M1.5"),
    "M2": ("M2.1", "M2.2", "M2.3", "M2.4"),
    "M3": ("M3.1", "M3.2", "M3.3"),
    "M4": ("M4.1", "M4.1.1", "M4.1.2", "M4.2"),
    "M5": ("M5.1", "M5.2", "M5.3.recency", "M5.3.dispersion"),
    "M6": (
        "M6.1",
        "M6.2",
        "M6.2.1",
        "M6.3.1",
        "M6.3.2",
        "M6.4.1",
        "M6.4.2",
        "M6.4.3",
        "M6.5.1",
    ),
    "M7": ("M7.1", "M7.2", "M7.3", "M7.Sol.1", "M7.Sol.2"),
    "M8": ("M8.1", "M8.2", "M8.3.1", "M8.3.2", "M8.learnability"),
    "M9": ("M9.1", "M9.2", "M9.3", "M9.4", "M9.5"),
    "M10": ("M10.1",),
}

DIMENSIONS = tuple(METRIC_CATALOG)


@dataclass(frozen=True)
class DimensionResult:
    """All metric values of one dimension for one course."""

    dimension: str
    values: dict[str, MetricValue]

    def __post_init__(self) -> None:
        expected = METRIC_CATALOG.get(self.dimension)
        if expected is None:
            raise ValueError(f"unknown dimension: {self.dimension!r}")
        if set(self.values) != set(expected):
            missing = set(expected) - set(self.values)
            extra = set(self.values) - set(expected)
            raise ValueError(
                f"{self.dimension} metric ids mismatch "
                f"(missing={sorted(missing)}, extra={sorted(extra)})"
            )

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "values": {mid: self.values[mid].to_dict() for mid in sorted(self.values)},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DimensionResult":
        return cls(
            dimension=data["dimension"],
            values={
                mid: MetricValue.from_dict(raw)
                for mid, raw in data["values"].items()
            },
        )


@dataclass(frozen=True)
class CourseAssessment:
    """Complete assessment of one course at one observation date.

    Beyond the ten dimension results this carries the handful of raw facts
    that corpus aggregation needs but no single metric stores: the license
    label, self-assessment placement, example/illustration totals, the
    per-revision recency series, and the per-round server-up pattern.
    """

    course_id: str
    observation_date: date
    results: tuple[DimensionResult, ...]
    is_open_license: bool
    license_label: Optional[str] = None
    sa_placement: Optional[str] = None
    example_total: Optional[int] = None
    illustration_total: Optional[int] = None
    revision_recency_series: tuple[float, ...] = ()
    availability_pattern: tuple[bool, ...] = ()

    def __post_init__(self) -> None:
        dims = tuple(r.dimension for r in self.results)
        if dims != DIMENSIONS:
            raise ValueError(f"expected one result per dimension, got {dims}")

    def result(self, dimension: str) -> DimensionResult:
        return self.results[DIMENSIONS.index(dimension)]

    def value(self, metric_id: str) -> MetricValue:
        dimension = metric_id.split(".", 1)[0].split("_", 1)[0]
        return self.result(dimension).values[metric_id]

    def to_dict(self) -> dict:
        return {
            "course_id": self.course_id,
            "observation_date": self.observation_date.isoformat(),
            "is_open_license": self.is_open_license,
            "license_label": self.license_label,
            "sa_placement": self.sa_placement,
            "example_total": self.example_total,
            "illustration_total": self.illustration_total,
            "revision_recency_series": list(self.revision_recency_series),
            "availability_pattern": list(self.availability_pattern),
            "results": [r.to_dict() for r in self.results],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CourseAssessment":
        return cls(
            course_id=data["course_id"],
            observation_date=date.fromisoformat(data["observation_date"]),
            results=tuple(DimensionResult.from_dict(r) for r in data["results"]),
            is_open_license=bool(data["is_open_license"]),
            license_label=data.get("license_label"),
            sa_placement=data.get("sa_placement"),
            example_total=data.get("example_total"),
            illustration_total=data.get("illustration_total"),
            revision_recency_series=tuple(data.get("revision_recency_series", [])),
            availability_pattern=tuple(data.get("availability_pattern", [])),
        )


def _ratio_or_real(value: Fraction) -> MetricValue:
    """Ratios are reported as such while they stay in [0, 1]; degenerate
    data (more examples than units, say) widens to a plain real instead of
    failing or clamping."""
    if 0 <= value <= 1:
        return MetricValue.ratio(value)
    return MetricValue.real(value)


# ---------------------------------------------------------------------------
# M1 Legal reusability
# ---------------------------------------------------------------------------


def assess_legal(license: LicenseDescriptor) -> tuple[DimensionResult, bool]:
    """Score the license dimension and decide openness.

    A course is open when a license exists and neither the non-commercial
    nor the no-derivatives condition applies; an unspecified condition is
    not good enough. Without any license, everything beyond existence is
    unmeasured.
    """
    if not license.present:
        reason = "no license present"
        values = {
            "M1.1": MetricValue.boolean(False),
            "M1.2": MetricValue.unmeasured(reason),
            "M1.3_BY": MetricValue.unmeasured(reason),
            "M1.3_SA": MetricValue.unmeasured(reason),
            "M1.3_NC": MetricValue.unmeasured(reason),
            "M1.3_ND": MetricValue.unmeasured(reason),
            "M1.4": MetricValue.unmeasured(reason),
            "M1.5": MetricValue.unmeasured(reason),
        }
        return DimensionResult("M1", values), False

    is_open = license.nc is TriState.FALSE and license.nd is TriState.FALSE
    values = {
        "M1.1": MetricValue.boolean(True),
        "M1.2": MetricValue.boolean(license.human_readable),
        "M1.3_BY": MetricValue.tri_state(license.by),
        "M1.3_SA": MetricValue.tri_state(license.sa),
        "M1.3_NC": MetricValue.tri_state(license.nc),
        "M1.3_ND": MetricValue.tri_state(license.nd),
        "M1.4": MetricValue.boolean(license.machine_readable_indication),
        "M1.5": MetricValue.boolean(license.machine_readable_description),
    }
    return DimensionResult("M1", values), is_open


# ---------------------------------------------------------------------------
# M2 Multilinguality
# ---------------------------------------------------------------------------


def assess_multilinguality(record: CourseRecord) -> DimensionResult:
    translations = record.translations
    distinct = {t.language for t in translations}

    if record.original_language:
        original = MetricValue.label(record.original_language)
    else:
        original = MetricValue.unmeasured("original language not recorded")

    if not translations:
        states = MetricValue.unmeasured("no translations")
    elif all(t.state is TranslationState.UNSPECIFIED for t in translations):
        states = MetricValue.unmeasured("translation state not recorded")
    else:
        states = MetricValue.labels(t.state.value for t in translations)

    values = {
        "M2.1": original,
        "M2.2": MetricValue.boolean(bool(translations)),
        "M2.3": MetricValue.count(len(distinct)),
        "M2.4": states,
    }
    return DimensionResult("M2", values)


# ---------------------------------------------------------------------------
# M3 Format re-purposeability
# ---------------------------------------------------------------------------


def format_labels(record: CourseRecord) -> tuple[str, ...]:
    """Distinct format names, first-occurrence order."""
    seen: list[str] = []
    for entry in record.formats:
        if entry.format not in seen:
            seen.append(entry.format)
    return tuple(seen)


def assess_format(record: CourseRecord) -> DimensionResult:
    if not record.formats:
        reason = "no formats recorded"
        values = {
            "M3.1": MetricValue.unmeasured(reason),
            "M3.2": MetricValue.unmeasured(reason),
            "M3.3": MetricValue.unmeasured(reason),
        }
        return DimensionResult("M3", values)

    functions: list[str] = []
    for entry in record.formats:
        if entry.reuse_function is not ReuseFunction.NONE:
            if entry.reuse_function.value not in functions:
                functions.append(entry.reuse_function.value)

    values = {
        "M3.1": MetricValue.labels(format_labels(record)),
        "M3.2": MetricValue.boolean(any(f.reusable for f in record.formats)),
        "M3.3": MetricValue.labels(functions),
    }
    return DimensionResult("M3", values)


# ---------------------------------------------------------------------------
# M4 Recency
# ---------------------------------------------------------------------------


def assess_recency(record: CourseRecord, t_obs: date) -> DimensionResult:
    """Whole-course and per-unit age relative to the observation date.

    Reported with year granularity: most courses are taught and refreshed
    on a yearly cycle, so finer precision would be noise.
    """
    obs_year = t_obs.year

    if record.last_updated is None:
        overall = MetricValue.unmeasured("last update year not provided")
    elif record.last_updated > obs_year:
        raise ValueError(
            f"last_updated {record.last_updated} is after observation year {obs_year}"
        )
    else:
        overall = MetricValue.count(obs_year - record.last_updated)

    entries = record.unit_update_years
    if not entries:
        reason = "per-unit update years not provided"
        mean_age = MetricValue.unmeasured(reason)
        module_means = MetricValue.unmeasured(reason)
        unit_ages = MetricValue.unmeasured(reason)
    else:
        ages = []
        by_module: dict[int, list[int]] = {}
        for module_idx, _unit_idx, year in entries:
            if year > obs_year:
                raise ValueError(
                    f"unit update year {year} is after observation year {obs_year}"
                )
            ages.append(obs_year - year)
            by_module.setdefault(module_idx, []).append(obs_year - year)
        mean_age = MetricValue.real(Fraction(sum(ages), len(ages)))
        module_means = MetricValue.reals(
            Fraction(sum(v), len(v)) for _idx, v in sorted(by_module.items())
        )
        unit_ages = MetricValue.reals(Fraction(a) for a in ages)

    values = {
        "M4.1": mean_age,
        "M4.1.1": module_means,
        "M4.1.2": unit_ages,
        "M4.2": overall,
    }
    return DimensionResult("M4", values)


# ---------------------------------------------------------------------------
# M5 Sustainability
# ---------------------------------------------------------------------------


def revision_count(history: RevisionHistory) -> MetricValue:
    if not history.available:
        return MetricValue.unmeasured("revision history not available")
    return MetricValue.count(len(history.timestamps))


def regularity(history: RevisionHistory) -> MetricValue:
    """How evenly spaced the revisions are: 1 means all inter-revision gaps
    are identical, and the score decays with the coefficient of variation
    of the gaps (clamped at 0). Needs at least three revisions to say
    anything about spacing."""
    if not history.available:
        return MetricValue.unmeasured("revision history not available")
    if len(history.timestamps) < 3:
        return MetricValue.unmeasured("fewer than three revisions")
    gaps = [
        (later - earlier).days
        for earlier, later in zip(history.timestamps, history.timestamps[1:])
    ]
    mean_gap = sum(gaps) / len(gaps)
    score = max(0.0, 1.0 - pstdev(gaps) / mean_gap)
    return MetricValue.ratio(score)


def revision_recency(
    history: RevisionHistory, t_obs: date
) -> tuple[MetricValue, MetricValue]:
    """Average age of the revisions in years, plus the spread of the
    revisions over the course lifetime.

    The spread is the population variance of revision positions after
    mapping the lifetime [first revision, last revision] onto [0, 1]; it
    needs two revisions to be defined, the average needs one.
    """
    if not history.available or not history.timestamps:
        reason = (
            "revision history not available"
            if not history.available
            else "no revisions"
        )
        return MetricValue.unmeasured(reason), MetricValue.unmeasured(reason)

    last = history.timestamps[-1]
    if last > t_obs:
        raise ValueError(f"revision {last} is after observation date {t_obs}")

    ages_days = [(t_obs - t).days for t in history.timestamps]
    average = MetricValue.real(
        Fraction(sum(ages_days), DAYS_PER_YEAR * len(ages_days))
    )

    if len(history.timestamps) < 2:
        return average, MetricValue.unmeasured("fewer than two revisions")

    first = history.timestamps[0]
    span = (last - first).days
    positions = [Fraction((t - first).days, span) for t in history.timestamps]
    mean_pos = sum(positions) / len(positions)
    variance = sum((p - mean_pos) ** 2 for p in positions) / len(positions)
    return average, MetricValue.real(variance)


def assess_sustainability(record: CourseRecord, t_obs: date) -> DimensionResult:
    average, dispersion = revision_recency(record.revisions, t_obs)
    values = {
        "M5.1": revision_count(record.revisions),
        "M5.2": regularity(record.revisions),
        "M5.3.recency": average,
        "M5.3.dispersion": dispersion,
    }
    return DimensionResult("M5", values)


# ---------------------------------------------------------------------------
# M6 Availability
# ---------------------------------------------------------------------------


def assess_availability(record: CourseRecord) -> DimensionResult:
    values: dict[str, MetricValue] = {}

    log = record.probe_log
    if log is None or not log.samples:
        reason = "no probe log" if log is None else "probe log has no samples"
        values["M6.1"] = MetricValue.unmeasured(reason)
        values["M6.2"] = MetricValue.unmeasured(reason)
    else:
        up = sum(1 for s in log.samples if s.server_up)
        values["M6.1"] = MetricValue.ratio(Fraction(up, len(log.samples)))
        known = [s.material_present for s in log.samples if s.material_present is not None]
        if any(flag is False for flag in known):
            values["M6.2"] = MetricValue.boolean(False)
        elif known:
            values["M6.2"] = MetricValue.boolean(True)
        else:
            values["M6.2"] = MetricValue.unmeasured("material presence never observed")

    formats = record.formats
    if not formats:
        reason = "no formats recorded"
        for metric_id in ("M6.2.1", "M6.3.1", "M6.3.2", "M6.4.1", "M6.4.2", "M6.4.3", "M6.5.1"):
            values[metric_id] = MetricValue.unmeasured(reason)
        return DimensionResult("M6", values)

    videos = [f for f in formats if f.format == "video"]
    caption_flags = [f.closed_captions for f in videos if f.closed_captions is not None]
    if not videos:
        values["M6.2.1"] = MetricValue.unmeasured("no video format")
    elif not caption_flags:
        values["M6.2.1"] = MetricValue.unmeasured("closed captions not recorded")
    else:
        values["M6.2.1"] = MetricValue.boolean(all(caption_flags))

    # Obtaining content: any format that can be downloaded suffices.
    values["M6.3.1"] = MetricValue.boolean(any(f.downloadable_whole for f in formats))
    values["M6.3.2"] = MetricValue.boolean(any(f.downloadable_parts for f in formats))
    # Viewing content: every offered format must be portable.
    values["M6.4.1"] = MetricValue.boolean(all(f.viewer_all_os for f in formats))
    values["M6.4.2"] = MetricValue.boolean(all(f.lossless_all_os for f in formats))
    values["M6.4.3"] = MetricValue.boolean(all(f.free_viewer_all_os for f in formats))
    values["M6.5.1"] = MetricValue.boolean(
        any(f.structured_granularity for f in formats)
    )
    return DimensionResult("M6", values)


# ---------------------------------------------------------------------------
# M7 Learning by self-assessment
# ---------------------------------------------------------------------------


def assess_self_assessment(record: CourseRecord) -> DimensionResult:
    """Self-assessment density and coverage.

    Objects are counted individually (an exam sheet with ten exercises is
    ten objects, not one). Without module information nothing can be said,
    so the whole dimension is unmeasured rather than zero.
    """
    modules = record.modules
    if not modules:
        reason = "no modules recorded"
        values = {mid: MetricValue.unmeasured(reason) for mid in METRIC_CATALOG["M7"]}
        return DimensionResult("M7", values)

    n_modules = len(modules)
    total_sa = sum(m.sa_count for m in modules)
    total_solutions = sum(m.sa_with_solutions_count for m in modules)
    covered = sum(1 for m in modules if m.sa_count >= 1)

    values = {
        "M7.1": MetricValue.boolean(total_sa > 0),
        "M7.2": MetricValue.real(Fraction(total_sa, n_modules)),
        "M7.3": MetricValue.ratio(Fraction(covered, n_modules)),
        "M7.Sol.1": MetricValue.boolean(total_solutions > 0),
        "M7.Sol.2": MetricValue.real(Fraction(total_solutions, n_modules)),
    }
    return DimensionResult("M7", values)


# ---------------------------------------------------------------------------
# M8 Learning by examples and illustrations
# ---------------------------------------------------------------------------


def assess_examples(record: CourseRecord) -> DimensionResult:
    if record.attractiveness_annotation is None:
        annotation = MetricValue.unmeasured("attractiveness not annotated")
    else:
        annotation = MetricValue.label(record.attractiveness_annotation.value)

    total_units = sum(m.unit_count for m in record.modules)
    if not record.modules or total_units == 0:
        reason = "no modules recorded" if not record.modules else "no units recorded"
        values = {
            "M8.1": MetricValue.unmeasured(reason),
            "M8.2": MetricValue.unmeasured(reason),
            "M8.3.1": MetricValue.unmeasured(reason),
            "M8.3.2": annotation,
            "M8.learnability": MetricValue.unmeasured(reason),
        }
        return DimensionResult("M8", values)

    examples = Fraction(sum(m.example_count for m in record.modules), total_units)
    illustrations = Fraction(
        sum(m.illustration_count for m in record.modules), total_units
    )
    values = {
        "M8.1": _ratio_or_real(examples),
        "M8.2": _ratio_or_real(illustrations),
        "M8.3.1": _ratio_or_real(illustrations),
        "M8.3.2": annotation,
        "M8.learnability": MetricValue.real(examples + illustrations),
    }
    return DimensionResult("M8", values)


# ---------------------------------------------------------------------------
# M9 Community involvement
# ---------------------------------------------------------------------------


def assess_community(record: CourseRecord) -> DimensionResult:
    com = record.community

    if com.creation_type is CreationType.UNKNOWN:
        creation = MetricValue.unmeasured("creation type unknown")
    else:
        creation = MetricValue.label(com.creation_type.value)

    def _count(value: Optional[int], what: str) -> MetricValue:
        if value is None:
            return MetricValue.unmeasured(f"{what} not provided")
        return MetricValue.count(value)

    values = {
        "M9.1": creation,
        "M9.2": _count(com.contributor_count, "contributor count"),
        "M9.3": _count(com.user_count, "user count"),
        "M9.4": _count(com.comment_count, "comment count"),
        "M9.5": _count(com.download_count, "download count"),
    }
    return DimensionResult("M9", values)


# ---------------------------------------------------------------------------
# M10 Discoverability
# ---------------------------------------------------------------------------


def assess_discoverability(
    observation: Optional[SearchObservation],
) -> DimensionResult:
    """Mean search rank over the queries that surfaced the course; the
    ``above-cutoff`` label when no query did."""
    if observation is None:
        value = MetricValue.unmeasured("no search observation")
    elif not observation.queries:
        value = MetricValue.unmeasured("no queries recorded")
    else:
        usable = [q for q in observation.queries if not q.failed]
        if not usable:
            value = MetricValue.unmeasured("all queries failed")
        else:
            ranks = [q.rank for q in usable if q.rank is not None]
            if not ranks:
                value = MetricValue.label(ABOVE_CUTOFF)
            else:
                value = MetricValue.real(Fraction(sum(ranks), len(ranks)))
    return DimensionResult("M10", {"M10.1": value})


# ---------------------------------------------------------------------------
# Composition
# ---------------------------------------------------------------------------


def _revision_recency_series(history: RevisionHistory, t_obs: date) -> tuple[float, ...]:
    if not history.available:
        return ()
    return tuple((t_obs - t).days / DAYS_PER_YEAR for t in history.timestamps)


def _availability_pattern(log: Optional[ProbeLog]) -> tuple[bool, ...]:
    if log is None:
        return ()
    return tuple(s.server_up for s in log.samples)


def assess(record: CourseRecord, t_obs: date) -> CourseAssessment:
    """Assess one course across all ten dimensions.

    The record must be valid; run it through corpus cleanup first. The
    result is exactly the assembly of the ten per-dimension operations plus
    the carried aggregation facts, so callers may equally well call those
    operations directly.
    """
    violations = validate(record)
    if violations:
        raise ValueError(
            f"record {record.id!r} fails validation: " + "; ".join(violations)
        )

    legal, is_open = assess_legal(record.license)
    results = (
        legal,
        assess_multilinguality(record),
        assess_format(record),
        assess_recency(record, t_obs),
        assess_sustainability(record, t_obs),
        assess_availability(record),
        assess_self_assessment(record),
        assess_examples(record),
        assess_community(record),
        assess_discoverability(record.search_observation),
    )

    has_modules = bool(record.modules)
    return CourseAssessment(
        course_id=record.id,
        observation_date=t_obs,
        results=results,
        is_open_license=is_open,
        license_label=record.license.label,
        sa_placement=None if record.sa_placement is None else record.sa_placement.value,
        example_total=(
            sum(m.example_count for m in record.modules) if has_modules else None
        ),
        illustration_total=(
            sum(m.illustration_count for m in record.modules) if has_modules else None
        ),
        revision_recency_series=_revision_recency_series(record.revisions, t_obs),
        availability_pattern=_availability_pattern(record.probe_log),
    )
