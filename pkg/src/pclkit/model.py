"""Canonical data types, validation, persistence and corpus statistics.

Everything downstream (lexicon filtering, cleaning, instruction building,
evaluation, annotation) works on the two record types defined here:
``Document`` for one text unit and ``LabelRecord`` for one annotator's
layered judgment.  Datasets are stored as line-oriented JSON (one object
per line, UTF-8) so million-line corpora can be streamed.
"""

from __future__ import annotations

import datetime as _dt
import enum
import hashlib
import json
from dataclasses import dataclass, field
from decimal import Decimal, ROUND_HALF_UP
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union


class ValidationError(ValueError):
    """A record violates a model invariant."""


class DatasetError(ValueError):
    """A dataset file cannot be parsed; carries the offending line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Language(str, enum.Enum):
    EN = "EN"
    ZH = "ZH"


class Source(str, enum.Enum):
    REDDIT = "REDDIT"
    WEIBO = "WEIBO"
    ZHIHU = "ZHIHU"
    NEWS = "NEWS"
    OTHER = "OTHER"


class GroupTag(str, enum.Enum):
    DISABLED = "DISABLED"
    WOMEN = "WOMEN"
    ELDERLY = "ELDERLY"
    CHILDREN = "CHILDREN"
    SINGLE_PARENT = "SINGLE_PARENT"
    ORDINARY = "ORDINARY"
    DISADVANTAGED = "DISADVANTAGED"
    OTHER = "OTHER"


class Split(str, enum.Enum):
    TRAIN = "TRAIN"
    TEST = "TEST"
    UNSPLIT = "UNSPLIT"


class Round(str, enum.Enum):
    PRIMARY = "PRIMARY"
    PROOFREAD = "PROOFREAD"


class Subcategory(str, enum.Enum):
    UNBALANCED_POWER = "UNBALANCED_POWER"
    SPECTATOR = "SPECTATOR"
    PREJUDICE = "PREJUDICE"
    APPEAL = "APPEAL"
    COMPASSION = "COMPASSION"


class Intensity(str, enum.Enum):
    NONE = "NONE"
    MILD = "MILD"
    MODERATE = "MODERATE"
    SEVERE = "SEVERE"


class Stage(str, enum.Enum):
    PT = "PT"
    SFT = "SFT"
    TEST = "TEST"


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    language: Language
    source: Source = Source.OTHER
    group_tag: Optional[GroupTag] = None
    interference: bool = False
    split: Split = Split.UNSPLIT
    collected_at: Optional[_dt.date] = None

    def __post_init__(self):
        if not self.id:
            raise ValidationError("document id must be non-empty")
        if not self.text.strip():
            raise ValidationError(f"document {self.id!r}: text empty after trimming")
        # Interference samples are a test-set construct.
        if self.interference and self.split is not Split.TEST:
            raise ValidationError(
                f"document {self.id!r}: interference=true requires split=TEST"
            )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "language": self.language.value,
            "source": self.source.value,
            "group_tag": self.group_tag.value if self.group_tag else None,
            "interference": self.interference,
            "split": self.split.value,
            "collected_at": self.collected_at.isoformat() if self.collected_at else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Document":
        try:
            return cls(
                id=d["id"],
                text=d["text"],
                language=Language(d["language"]),
                source=Source(d.get("source", "OTHER")),
                group_tag=GroupTag(d["group_tag"]) if d.get("group_tag") else None,
                interference=bool(d.get("interference", False)),
                split=Split(d.get("split", "UNSPLIT")),
                collected_at=_dt.date.fromisoformat(d["collected_at"])
                if d.get("collected_at")
                else None,
            )
        except (KeyError, ValueError, TypeError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"bad document record: {exc}") from exc


@dataclass(frozen=True)
class LabelRecord:
    doc_id: str
    annotator_id: str
    round: Round
    pcl: bool
    subcategories: frozenset = frozenset()
    group: Optional[GroupTag] = None
    intensity: Intensity = Intensity.NONE
    dpm_level: Optional[int] = None

    def __post_init__(self):
        if not self.doc_id or not self.annotator_id:
            raise ValidationError("doc_id and annotator_id must be non-empty")
        object.__setattr__(self, "subcategories", frozenset(
            Subcategory(s) for s in self.subcategories
        ))
        # Layered gating (the questionnaire only opens lower layers for PCL).
        if not self.pcl:
            if self.subcategories:
                raise ValidationError(
                    f"label for {self.doc_id!r}: pcl=false forbids subcategories"
                )
            if self.intensity is not Intensity.NONE:
                raise ValidationError(
                    f"label for {self.doc_id!r}: pcl=false forbids intensity"
                )
        else:
            if not self.subcategories:
                raise ValidationError(
                    f"label for {self.doc_id!r}: pcl=true requires subcategories"
                )
        if self.dpm_level is not None and not 0 <= self.dpm_level <= 4:
            raise ValidationError(
                f"label for {self.doc_id!r}: dpm_level {self.dpm_level} outside 0..4"
            )

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "annotator_id": self.annotator_id,
            "round": self.round.value,
            "pcl": self.pcl,
            "subcategories": sorted(s.value for s in self.subcategories),
            "group": self.group.value if self.group else None,
            "intensity": self.intensity.value,
            "dpm_level": self.dpm_level,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LabelRecord":
        try:
            return cls(
                doc_id=d["doc_id"],
                annotator_id=d["annotator_id"],
                round=Round(d.get("round", "PRIMARY")),
                pcl=bool(d["pcl"]),
                subcategories=frozenset(d.get("subcategories") or ()),
                group=GroupTag(d["group"]) if d.get("group") else None,
                intensity=Intensity(d.get("intensity", "NONE")),
                dpm_level=d.get("dpm_level"),
            )
        except (KeyError, ValueError, TypeError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"bad label record: {exc}") from exc


@dataclass(frozen=True)
class DatasetManifest:
    name: str
    stage: Stage
    language: Language
    doc_count: int
    checksum: str

    def __post_init__(self):
        if self.doc_count < 0:
            raise ValidationError("doc_count must be non-negative")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "stage": self.stage.value,
            "language": self.language.value,
            "doc_count": self.doc_count,
            "checksum": self.checksum,
        }


Record = Union[Document, LabelRecord]


def canonical_json(obj) -> str:
    """Deterministic JSON rendering shared by library, CLI and API outputs."""
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


_dumps = canonical_json


def load_dataset(path) -> list:
    """Load a line-oriented dataset of Documents or LabelRecords.

    The record type is sniffed from the fields of each line ("doc_id"
    marks a label record).  Malformed lines raise :class:`DatasetError`
    with the 1-based line number; duplicate ids raise an error naming
    every involved line.
    """
    path = Path(path)
    records: list = []
    seen: dict[str, int] = {}
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"invalid JSON: {exc}", line=lineno) from exc
            if not isinstance(obj, dict):
                raise DatasetError("record is not an object", line=lineno)
            try:
                if "doc_id" in obj:
                    rec: Record = LabelRecord.from_dict(obj)
                    key = f"{rec.doc_id}::{rec.annotator_id}::{rec.round.value}"
                else:
                    rec = Document.from_dict(obj)
                    key = rec.id
            except ValidationError as exc:
                raise DatasetError(str(exc), line=lineno) from exc
            if key in seen:
                raise DatasetError(
                    f"duplicate id {key!r} (first seen on line {seen[key]})",
                    line=lineno,
                )
            seen[key] = lineno
            records.append(rec)
    return records


def save_dataset(
    records: Sequence[Record],
    path,
    name: Optional[str] = None,
    stage: Stage = Stage.PT,
) -> DatasetManifest:
    """Write records line-oriented and return a manifest with a content hash.

    Serialization is deterministic (sorted keys, no wall-clock fields), so
    re-saving unchanged records reproduces the checksum byte for byte.
    """
    path = Path(path)
    lines = [_dumps(r.to_dict()) for r in records]
    payload = ("\n".join(lines) + "\n") if lines else ""
    data = payload.encode("utf-8")
    path.write_bytes(data)
    languages = {r.language for r in records if isinstance(r, Document)}
    language = languages.pop() if len(languages) == 1 else Language.EN
    return DatasetManifest(
        name=name or path.stem,
        stage=stage,
        language=language,
        doc_count=len(records),
        checksum=hashlib.sha256(data).hexdigest(),
    )


# --------------------------------------------------------------------------
# Platform statistics (per-platform / per-group totals, positives, prop.%)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class StatsCell:
    total: int
    positives: int

    @property
    def proportion(self) -> Optional[float]:
        """Positives as a percentage, rounded half-up to one decimal.

        Undefined (None) when total is zero, never silently 0.
        """
        return proportion_percent(self.positives, self.total)


def proportion_percent(positives: int, total: int) -> Optional[float]:
    if total == 0:
        return None
    value = Decimal(positives) * 100 / Decimal(total)
    return float(value.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def compute_platform_stats(
    labels: Iterable[LabelRecord],
    docs: Iterable[Document],
) -> dict:
    """Cross-tabulate labels by (platform, group) into totals and positives.

    Returns a mapping ``(Source, GroupTag|None) -> StatsCell`` plus a
    per-platform row total under key ``(Source, "TOTAL")`` and a grand
    total under ``("TOTAL", "TOTAL")``.
    """
    by_id = {d.id: d for d in docs}
    counts: dict = {}

    def bump(key, pcl):
        total, pos = counts.get(key, (0, 0))
        counts[key] = (total + 1, pos + (1 if pcl else 0))

    for rec in labels:
        doc = by_id.get(rec.doc_id)
        if doc is None:
            raise ValidationError(f"label references unknown document {rec.doc_id!r}")
        group = rec.group if rec.group is not None else doc.group_tag
        bump((doc.source, group), rec.pcl)
        bump((doc.source, "TOTAL"), rec.pcl)
        bump(("TOTAL", "TOTAL"), rec.pcl)
    return {k: StatsCell(total=v[0], positives=v[1]) for k, v in counts.items()}
