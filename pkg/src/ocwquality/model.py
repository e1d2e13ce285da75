"""Domain types for course quality assessment.

Every type here is an immutable value object: records are safe to share
between threads and to copy freely. Consistency rules are not enforced at
construction time; :func:`validate` reports them as data-level violations so
that a corpus loader can keep good records and drop bad ones instead of
crashing on the first malformed course.

The canonical on-disk form of a corpus is JSON Lines, one course per line,
with field names matching the dataclass attributes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date, datetime
from enum import Enum
from fractions import Fraction
from typing import Any, Optional


class TriState(str, Enum):
    """Three-valued license condition: explicitly true, explicitly false,
    or not specified by the license text."""

    TRUE = "true"
    FALSE = "false"
    UNSPECIFIED = "unspecified"


class TranslationState(str, Enum):
    AUTOMATIC = "automatic-translation"
    SYNCHRONIZED = "synchronized"
    EXPERT_REVISED = "expert-revised"
    LOCALIZED = "localized"
    UNSPECIFIED = "unspecified"


class ReuseFunction(str, Enum):
    DIRECT_EDIT = "direct-edit"
    COPY_PASTE = "copy-paste"
    NONE = "none"


class CreationType(str, Enum):
    SINGLE_AUTHOR = "single-author"
    COLLABORATIVE = "collaborative"
    UNKNOWN = "unknown"


class AttractivenessLevel(str, Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


class SelfAssessmentPlacement(str, Enum):
    """Whether self-assessment material ships as separate objects (exercise
    or exam sheets) or inline within the course content."""

    SEPARATE = "separate"
    INLINE = "inline"


#: Format names with first-class semantics elsewhere in the toolkit.
#: Any other string is accepted and treated as a custom ("other") format.
KNOWN_FORMATS = frozenset(
    {
        "pdf",
        "html",
        "epub",
        "plain-text",
        "xml",
        "powerpoint",
        "latex",
        "video",
        "audio",
        "interactive",
        "simulation",
    }
)


@dataclass(frozen=True)
class LicenseDescriptor:
    """Licensing facts for one course.

    ``by``/``sa``/``nc``/``nd`` are the reuse conditions (attribution,
    share-alike, non-commercial, no-derivatives); each is tri-state because
    many licenses simply do not speak to a condition.
    """

    present: bool
    human_readable: bool = False
    by: TriState = TriState.UNSPECIFIED
    sa: TriState = TriState.UNSPECIFIED
    nc: TriState = TriState.UNSPECIFIED
    nd: TriState = TriState.UNSPECIFIED
    machine_readable_indication: bool = False
    machine_readable_description: bool = False
    label: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "present": self.present,
            "human_readable": self.human_readable,
            "by": self.by.value,
            "sa": self.sa.value,
            "nc": self.nc.value,
            "nd": self.nd.value,
            "machine_readable_indication": self.machine_readable_indication,
            "machine_readable_description": self.machine_readable_description,
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LicenseDescriptor":
        return cls(
            present=bool(data["present"]),
            human_readable=bool(data.get("human_readable", False)),
            by=TriState(data.get("by", "unspecified")),
            sa=TriState(data.get("sa", "unspecified")),
            nc=TriState(data.get("nc", "unspecified")),
            nd=TriState(data.get("nd", "unspecified")),
            machine_readable_indication=bool(
                data.get("machine_readable_indication", False)
            ),
            machine_readable_description=bool(
                data.get("machine_readable_description", False)
            ),
            label=data.get("label"),
        )


@dataclass(frozen=True)
class TranslationEntry:
    language: str
    state: TranslationState = TranslationState.UNSPECIFIED

    def to_dict(self) -> dict:
        return {"language": self.language, "state": self.state.value}

    @classmethod
    def from_dict(cls, data: dict) -> "TranslationEntry":
        return cls(
            language=data["language"],
            state=TranslationState(data.get("state", "unspecified")),
        )


@dataclass(frozen=True)
class FormatEntry:
    """One delivery format of the course material with its reuse,
    download, and portability characteristics.

    ``closed_captions`` is only meaningful for video material and must be
    left as None for anything else.
    """

    format: str
    reusable: bool = False
    reuse_function: ReuseFunction = ReuseFunction.NONE
    downloadable_whole: bool = False
    downloadable_parts: bool = False
    viewer_all_os: bool = True
    lossless_all_os: bool = True
    free_viewer_all_os: bool = True
    structured_granularity: bool = False
    closed_captions: Optional[bool] = None

    def to_dict(self) -> dict:
        return {
            "format": self.format,
            "reusable": self.reusable,
            "reuse_function": self.reuse_function.value,
            "downloadable_whole": self.downloadable_whole,
            "downloadable_parts": self.downloadable_parts,
            "viewer_all_os": self.viewer_all_os,
            "lossless_all_os": self.lossless_all_os,
            "free_viewer_all_os": self.free_viewer_all_os,
            "structured_granularity": self.structured_granularity,
            "closed_captions": self.closed_captions,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FormatEntry":
        return cls(
            format=data["format"],
            reusable=bool(data.get("reusable", False)),
            reuse_function=ReuseFunction(data.get("reuse_function", "none")),
            downloadable_whole=bool(data.get("downloadable_whole", False)),
            downloadable_parts=bool(data.get("downloadable_parts", False)),
            viewer_all_os=bool(data.get("viewer_all_os", True)),
            lossless_all_os=bool(data.get("lossless_all_os", True)),
            free_viewer_all_os=bool(data.get("free_viewer_all_os", True)),
            structured_granularity=bool(data.get("structured_granularity", False)),
            closed_captions=data.get("closed_captions"),
        )


@dataclass(frozen=True)
class ModuleEntry:
    """One instructor-defined part of a course with its content counts.

    Counts are supplied by the data producer; this toolkit never parses
    course content itself.
    """

    title: str
    unit_count: int = 0
    sa_count: int = 0
    sa_with_solutions_count: int = 0
    example_count: int = 0
    illustration_count: int = 0

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "unit_count": self.unit_count,
            "sa_count": self.sa_count,
            "sa_with_solutions_count": self.sa_with_solutions_count,
            "example_count": self.example_count,
            "illustration_count": self.illustration_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModuleEntry":
        return cls(
            title=data.get("title", ""),
            unit_count=int(data.get("unit_count", 0)),
            sa_count=int(data.get("sa_count", 0)),
            sa_with_solutions_count=int(data.get("sa_with_solutions_count", 0)),
            example_count=int(data.get("example_count", 0)),
            illustration_count=int(data.get("illustration_count", 0)),
        )


@dataclass(frozen=True)
class RevisionHistory:
    """Ordered revision timestamps, when the hosting repository exposes them."""

    available: bool = False
    timestamps: tuple[date, ...] = ()

    def to_dict(self) -> dict:
        return {
            "available": self.available,
            "timestamps": [t.isoformat() for t in self.timestamps],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RevisionHistory":
        return cls(
            available=bool(data.get("available", False)),
            timestamps=tuple(
                date.fromisoformat(t) for t in data.get("timestamps", [])
            ),
        )


@dataclass(frozen=True)
class ProbeSample:
    """One availability observation: was the server up, and if it answered,
    was the learning material actually there (None = unknown)."""

    timestamp: datetime
    server_up: bool
    material_present: Optional[bool] = None

    def to_dict(self) -> dict:
        return {
            "timestamp": self.timestamp.isoformat(),
            "server_up": self.server_up,
            "material_present": self.material_present,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProbeSample":
        return cls(
            timestamp=datetime.fromisoformat(data["timestamp"]),
            server_up=bool(data["server_up"]),
            material_present=data.get("material_present"),
        )


@dataclass(frozen=True)
class ProbeLog:
    samples: tuple[ProbeSample, ...] = ()

    def to_dict(self) -> dict:
        return {"samples": [s.to_dict() for s in self.samples]}

    @classmethod
    def from_dict(cls, data: dict) -> "ProbeLog":
        return cls(
            samples=tuple(ProbeSample.from_dict(s) for s in data.get("samples", []))
        )


@dataclass(frozen=True)
class QueryRank:
    """Result of one search query: 1-based rank of the course, None when the
    course did not appear within the cutoff. ``failed`` marks queries the
    provider could not answer at all; they carry no rank information."""

    query: str
    rank: Optional[int] = None
    failed: bool = False

    def to_dict(self) -> dict:
        return {"query": self.query, "rank": self.rank, "failed": self.failed}

    @classmethod
    def from_dict(cls, data: dict) -> "QueryRank":
        return cls(
            query=data["query"],
            rank=data.get("rank"),
            failed=bool(data.get("failed", False)),
        )


DEFAULT_SEARCH_CUTOFF = 100


@dataclass(frozen=True)
class SearchObservation:
    queries: tuple[QueryRank, ...] = ()
    cutoff: int = DEFAULT_SEARCH_CUTOFF

    def to_dict(self) -> dict:
        return {"queries": [q.to_dict() for q in self.queries], "cutoff": self.cutoff}

    @classmethod
    def from_dict(cls, data: dict) -> "SearchObservation":
        return cls(
            queries=tuple(QueryRank.from_dict(q) for q in data.get("queries", [])),
            cutoff=int(data.get("cutoff", DEFAULT_SEARCH_CUTOFF)),
        )


@dataclass(frozen=True)
class CommunityInfo:
    creation_type: CreationType = CreationType.UNKNOWN
    contributor_count: Optional[int] = None
    user_count: Optional[int] = None
    comment_count: Optional[int] = None
    download_count: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "creation_type": self.creation_type.value,
            "contributor_count": self.contributor_count,
            "user_count": self.user_count,
            "comment_count": self.comment_count,
            "download_count": self.download_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CommunityInfo":
        def _opt_int(key: str) -> Optional[int]:
            value = data.get(key)
            return None if value is None else int(value)

        return cls(
            creation_type=CreationType(data.get("creation_type", "unknown")),
            contributor_count=_opt_int("contributor_count"),
            user_count=_opt_int("user_count"),
            comment_count=_opt_int("comment_count"),
            download_count=_opt_int("download_count"),
        )


@dataclass(frozen=True)
class CourseRecord:
    """Full observable description of one course.

    Optional fields encode "the repository did not expose this" and are
    never defaulted to zero; downstream metrics report them as unmeasured.
    """

    id: str
    title: str
    repository: str
    url: str
    original_language: str
    license: LicenseDescriptor
    translations: tuple[TranslationEntry, ...] = ()
    formats: tuple[FormatEntry, ...] = ()
    modules: tuple[ModuleEntry, ...] = ()
    last_updated: Optional[int] = None
    unit_update_years: Optional[tuple[tuple[int, int, int], ...]] = None
    revisions: RevisionHistory = field(default_factory=RevisionHistory)
    community: CommunityInfo = field(default_factory=CommunityInfo)
    probe_log: Optional[ProbeLog] = None
    search_observation: Optional[SearchObservation] = None
    attractiveness_annotation: Optional[AttractivenessLevel] = None
    sa_placement: Optional[SelfAssessmentPlacement] = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "repository": self.repository,
            "url": self.url,
            "original_language": self.original_language,
            "license": self.license.to_dict(),
            "translations": [t.to_dict() for t in self.translations],
            "formats": [f.to_dict() for f in self.formats],
            "modules": [m.to_dict() for m in self.modules],
            "last_updated": self.last_updated,
            "unit_update_years": (
                None
                if self.unit_update_years is None
                else [list(entry) for entry in self.unit_update_years]
            ),
            "revisions": self.revisions.to_dict(),
            "community": self.community.to_dict(),
            "probe_log": None if self.probe_log is None else self.probe_log.to_dict(),
            "search_observation": (
                None
                if self.search_observation is None
                else self.search_observation.to_dict()
            ),
            "attractiveness_annotation": (
                None
                if self.attractiveness_annotation is None
                else self.attractiveness_annotation.value
            ),
            "sa_placement": (
                None if self.sa_placement is None else self.sa_placement.value
            ),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CourseRecord":
        uuy = data.get("unit_update_years")
        return cls(
            id=str(data["id"]),
            title=str(data.get("title", "")),
            repository=str(data.get("repository", "")),
            url=str(data.get("url", "")),
            original_language=str(data.get("original_language", "")),
            license=LicenseDescriptor.from_dict(data["license"]),
            translations=tuple(
                TranslationEntry.from_dict(t) for t in data.get("translations", [])
            ),
            formats=tuple(FormatEntry.from_dict(f) for f in data.get("formats", [])),
            modules=tuple(ModuleEntry.from_dict(m) for m in data.get("modules", [])),
            last_updated=(
                None if data.get("last_updated") is None else int(data["last_updated"])
            ),
            unit_update_years=(
                None
                if uuy is None
                else tuple((int(m), int(u), int(y)) for m, u, y in uuy)
            ),
            revisions=RevisionHistory.from_dict(data.get("revisions", {})),
            community=CommunityInfo.from_dict(data.get("community", {})),
            probe_log=(
                None
                if data.get("probe_log") is None
                else ProbeLog.from_dict(data["probe_log"])
            ),
            search_observation=(
                None
                if data.get("search_observation") is None
                else SearchObservation.from_dict(data["search_observation"])
            ),
            attractiveness_annotation=(
                None
                if data.get("attractiveness_annotation") is None
                else AttractivenessLevel(data["attractiveness_annotation"])
            ),
            sa_placement=(
                None
                if data.get("sa_placement") is None
                else SelfAssessmentPlacement(data["sa_placement"])
            ),
        )

    def to_json(self) -> str:
        """Serialize to one JSON Lines record (no trailing newline)."""
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "CourseRecord":
        return cls.from_dict(json.loads(line))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate(record: CourseRecord) -> list[str]:
    """Check a record against all cross-field consistency rules.

    Returns one human-readable violation per broken rule, each naming the
    offending field; an empty list means the record is consistent. Pure:
    identical records always produce identical violation lists.
    """
    violations: list[str] = []

    if not record.id:
        violations.append("id: must be non-empty")
    if not record.original_language:
        violations.append("original_language: must be a non-empty language code")

    lic = record.license
    if not lic.present:
        for name, value in (
            ("by", lic.by),
            ("sa", lic.sa),
            ("nc", lic.nc),
            ("nd", lic.nd),
        ):
            if value is not TriState.UNSPECIFIED:
                violations.append(
                    f"license.{name}: must be unspecified when no license is present"
                )
        if lic.machine_readable_indication:
            violations.append(
                "license.machine_readable_indication: must be false when no "
                "license is present"
            )
        if lic.machine_readable_description:
            violations.append(
                "license.machine_readable_description: must be false when no "
                "license is present"
            )

    for i, entry in enumerate(record.translations):
        if not entry.language:
            violations.append(f"translations[{i}].language: must be non-empty")
        elif entry.language == record.original_language:
            violations.append(
                f"translations[{i}].language: must differ from original_language"
            )

    for i, fmt in enumerate(record.formats):
        if not fmt.format:
            violations.append(f"formats[{i}].format: must be non-empty")
        none_function = fmt.reuse_function is ReuseFunction.NONE
        if none_function != (not fmt.reusable):
            violations.append(
                f"formats[{i}].reuse_function: 'none' is required exactly when "
                "the format is not reusable"
            )
        if fmt.closed_captions is not None and fmt.format != "video":
            violations.append(
                f"formats[{i}].closed_captions: only meaningful for video formats"
            )

    for i, mod in enumerate(record.modules):
        for name in (
            "unit_count",
            "sa_count",
            "sa_with_solutions_count",
            "example_count",
            "illustration_count",
        ):
            if getattr(mod, name) < 0:
                violations.append(f"modules[{i}].{name}: must be nonnegative")
        if mod.sa_with_solutions_count > mod.sa_count:
            violations.append(
                f"modules[{i}].sa_with_solutions_count: must not exceed sa_count"
            )

    if record.unit_update_years is not None:
        for i, (mod_idx, _unit_idx, _year) in enumerate(record.unit_update_years):
            if not (0 <= mod_idx < len(record.modules)):
                violations.append(
                    f"unit_update_years[{i}]: module index {mod_idx} out of range"
                )

    rev = record.revisions
    if not rev.available and rev.timestamps:
        violations.append(
            "revisions.timestamps: must be empty when history is unavailable"
        )
    for earlier, later in zip(rev.timestamps, rev.timestamps[1:]):
        if later <= earlier:
            violations.append("revisions.timestamps: must be strictly ascending")
            break

    if record.probe_log is not None:
        stamps = [s.timestamp for s in record.probe_log.samples]
        if any(b < a for a, b in zip(stamps, stamps[1:])):
            violations.append("probe_log.samples: timestamps must be ascending")

    obs = record.search_observation
    if obs is not None:
        if obs.cutoff < 1:
            violations.append("search_observation.cutoff: must be positive")
        for i, q in enumerate(obs.queries):
            if q.rank is not None and not (1 <= q.rank <= obs.cutoff):
                violations.append(
                    f"search_observation.queries[{i}].rank: must be in "
                    f"[1, {obs.cutoff}]"
                )

    com = record.community
    if (
        com.creation_type is CreationType.SINGLE_AUTHOR
        and com.contributor_count is not None
        and com.contributor_count != 1
    ):
        violations.append(
            "community.contributor_count: must equal 1 for single-author courses"
        )
    for name in ("contributor_count", "user_count", "comment_count", "download_count"):
        value = getattr(com, name)
        if value is not None and value < 0:
            violations.append(f"community.{name}: must be nonnegative")

    return violations


# ---------------------------------------------------------------------------
# Metric values
# ---------------------------------------------------------------------------

_METRIC_KINDS = frozenset(
    {
        "boolean",
        "tri_state",
        "count",
        "ratio",
        "real",
        "label",
        "labels",
        "reals",
        "year",
        "unmeasured",
    }
)


@dataclass(frozen=True)
class MetricValue:
    """Tagged value of a single quality metric.

    ``unmeasured`` always carries a reason so that reports can distinguish
    "the repository did not expose this" from a genuine zero. Exact
    :class:`~fractions.Fraction` values are used for count quotients so that
    identities like mean x module-count == total hold without rounding;
    they compare equal to the corresponding floats where representable.
    """

    kind: str
    value: Any = None
    reason: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in _METRIC_KINDS:
            raise ValueError(f"unknown metric kind: {self.kind!r}")
        if self.kind == "unmeasured" and not self.reason:
            raise ValueError("unmeasured values must carry a reason")
        if self.kind == "ratio" and not (0 <= self.value <= 1):
            raise ValueError(f"ratio outside [0, 1]: {self.value!r}")
        if self.kind == "count" and (not isinstance(self.value, int) or self.value < 0):
            raise ValueError(f"count must be a nonnegative integer: {self.value!r}")

    @property
    def measured(self) -> bool:
        return self.kind != "unmeasured"

    @classmethod
    def boolean(cls, value: bool) -> "MetricValue":
        return cls("boolean", bool(value))

    @classmethod
    def tri_state(cls, value: TriState) -> "MetricValue":
        return cls("tri_state", value.value)

    @classmethod
    def count(cls, value: int) -> "MetricValue":
        return cls("count", int(value))

    @classmethod
    def ratio(cls, value) -> "MetricValue":
        return cls("ratio", value)

    @classmethod
    def real(cls, value) -> "MetricValue":
        return cls("real", value)

    @classmethod
    def label(cls, value: str) -> "MetricValue":
        return cls("label", str(value))

    @classmethod
    def labels(cls, values) -> "MetricValue":
        return cls("labels", tuple(str(v) for v in values))

    @classmethod
    def reals(cls, values) -> "MetricValue":
        return cls("reals", tuple(values))

    @classmethod
    def year(cls, value: int) -> "MetricValue":
        return cls("year", int(value))

    @classmethod
    def unmeasured(cls, reason: str) -> "MetricValue":
        return cls("unmeasured", None, reason)

    def to_dict(self) -> dict:
        value = self.value
        if isinstance(value, Fraction):
            value = float(value)
        elif isinstance(value, tuple):
            value = [float(v) if isinstance(v, Fraction) else v for v in value]
        out: dict = {"kind": self.kind, "value": value}
        if self.reason is not None:
            out["reason"] = self.reason
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "MetricValue":
        value = data.get("value")
        if isinstance(value, list):
            value = tuple(value)
        return cls(kind=data["kind"], value=value, reason=data.get("reason"))


def records_to_jsonl(records: list[CourseRecord]) -> str:
    """Render a corpus as JSON Lines text (trailing newline included)."""
    return "".join(record.to_json() + "\n" for record in records)
