"""Layered human-annotation workflow and inter-annotator agreement.

Each document is labeled independently by exactly two primary annotators;
disagreements go to a proofreader whose resolution becomes the final
label.  Agreement is Cohen's Kappa, reported for the binary layer, for
the binary layer with weak-intensity items removed, and one-vs-rest per
subcategory.  Session mutations are serialized through a per-session
lock so concurrent clients cannot interleave partial writes.
"""

from __future__ import annotations

import json
import random
import threading
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .model import (
    Document,
    Intensity,
    LabelRecord,
    Subcategory,
    ValidationError,
)


class Role:
    PRIMARY = "PRIMARY"
    PROOFREADER = "PROOFREADER"
    ADMIN = "ADMIN"


class SessionError(ValueError):
    pass


class UndefinedKappaError(ValueError):
    """Chance agreement is 1; kappa has no defined value."""


# --------------------------------------------------------------------------
# Cohen's Kappa
# --------------------------------------------------------------------------

def cohen_kappa(labels_a: Sequence, labels_b: Sequence) -> float:
    """kappa = (p_o - p_e) / (1 - p_e), p_e from marginal label frequencies."""
    if len(labels_a) != len(labels_b):
        raise ValidationError("label vectors must be item-aligned")
    n = len(labels_a)
    if n == 0:
        raise ValidationError("kappa requires at least one item")
    p_o = sum(1 for a, b in zip(labels_a, labels_b) if a == b) / n
    count_a = Counter(labels_a)
    count_b = Counter(labels_b)
    p_e = sum(
        (count_a[label] / n) * (count_b.get(label, 0) / n) for label in count_a
    )
    if p_e == 1.0:
        raise UndefinedKappaError("both annotators constant with identical marginals")
    return (p_o - p_e) / (1 - p_e)


def kappa_weak_removed(pairs: Sequence[tuple]) -> float:
    """Binary kappa after excluding items either annotator marked MILD."""
    survivors = [
        (a, b) for a, b in pairs
        if a.intensity is not Intensity.MILD and b.intensity is not Intensity.MILD
    ]
    if not survivors:
        raise ValidationError("all items removed by the weak-level filter")
    return cohen_kappa([a.pcl for a, _ in survivors], [b.pcl for _, b in survivors])


def kappa_per_subcategory(pairs: Sequence[tuple]) -> dict:
    """One-vs-rest kappa per subcategory; undefined rows map to None."""
    result = {}
    for sub in Subcategory:
        a_vec = [sub in a.subcategories for a, _ in pairs]
        b_vec = [sub in b.subcategories for _, b in pairs]
        try:
            result[sub] = cohen_kappa(a_vec, b_vec)
        except (UndefinedKappaError, ValidationError):
            result[sub] = None
    return result


@dataclass(frozen=True)
class IAAReport:
    kappa_all: float
    kappa_weak_removed: Optional[float]
    kappa_per_subcategory: dict
    n_items: int
    n_removed_weak: int

    def to_dict(self) -> dict:
        return {
            "kappa_all": self.kappa_all,
            "kappa_weak_removed": self.kappa_weak_removed,
            "kappa_per_subcategory": {
                sub.value: value for sub, value in sorted(
                    self.kappa_per_subcategory.items(), key=lambda kv: kv[0].value
                )
            },
            "n_items": self.n_items,
            "n_removed_weak": self.n_removed_weak,
        }

    def render_text(self) -> str:
        """Layout mirrors the agreement table: binary rows, then subcategories."""
        lines = ["Binary-classification\tKappa IAA",
                 f"All labels\t{self.kappa_all:.2f}"]
        if self.kappa_weak_removed is not None:
            lines.append(f"Remove Weak level\t{self.kappa_weak_removed:.2f}")
        lines.append("Multi-classification\tKappa IAA")
        for sub, value in sorted(self.kappa_per_subcategory.items(),
                                 key=lambda kv: kv[0].value):
            rendered = "undefined" if value is None else f"{value:.2f}"
            lines.append(f"{sub.value}\t{rendered}")
        lines.append(f"n_items\t{self.n_items}")
        lines.append(f"n_removed_weak\t{self.n_removed_weak}")
        return "\n".join(lines) + "\n"


def compute_iaa_report(pairs: Sequence[tuple]) -> IAAReport:
    if not pairs:
        raise ValidationError("IAA report requires at least one doubly-annotated item")
    weak = sum(
        1 for a, b in pairs
        if a.intensity is Intensity.MILD or b.intensity is Intensity.MILD
    )
    try:
        weak_removed = kappa_weak_removed(pairs) if weak < len(pairs) else None
    except UndefinedKappaError:
        weak_removed = None
    return IAAReport(
        kappa_all=cohen_kappa([a.pcl for a, _ in pairs], [b.pcl for _, b in pairs]),
        kappa_weak_removed=weak_removed,
        kappa_per_subcategory=kappa_per_subcategory(pairs),
        n_items=len(pairs),
        n_removed_weak=weak,
    )


# --------------------------------------------------------------------------
# Annotation sessions
# --------------------------------------------------------------------------

PENDING = "PENDING"
SUBMITTED = "SUBMITTED"

CONFLICT_FIELDS = ("pcl", "subcategories", "group", "intensity")


@dataclass
class AnnotationSession:
    session_id: str
    docs: dict  # doc_id -> Document, insertion-ordered
    annotators: dict  # annotator_id -> role
    assignment: dict  # doc_id -> tuple of two primary annotator ids
    status: dict  # (doc_id, annotator_id) -> PENDING | SUBMITTED
    submissions: dict = field(default_factory=dict)  # (doc_id, annotator_id) -> LabelRecord
    final_labels: dict = field(default_factory=dict)  # doc_id -> LabelRecord
    locked: bool = False
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    @property
    def primaries(self) -> list:
        return [a for a, r in self.annotators.items() if r == Role.PRIMARY]

    def pending_docs(self, annotator_id: str) -> list:
        """Assigned docs still awaiting this annotator's submission, stable order."""
        if annotator_id not in self.annotators:
            raise SessionError(f"unknown annotator {annotator_id!r}")
        return [
            doc_id for doc_id in self.docs
            if annotator_id in self.assignment.get(doc_id, ())
            and self.status.get((doc_id, annotator_id)) == PENDING
        ]

    def annotated_pairs(self) -> list:
        """(record_a, record_b) for every doc with both submissions, doc order."""
        pairs = []
        for doc_id, (a, b) in self.assignment.items():
            ra = self.submissions.get((doc_id, a))
            rb = self.submissions.get((doc_id, b))
            if ra is not None and rb is not None:
                pairs.append((ra, rb))
        return pairs

    def is_complete(self) -> bool:
        return all(doc_id in self.final_labels for doc_id in self.docs)

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "docs": [d.to_dict() for d in self.docs.values()],
            "annotators": dict(self.annotators),
            "assignment": {k: list(v) for k, v in self.assignment.items()},
            "status": [
                {"doc_id": d, "annotator_id": a, "status": s}
                for (d, a), s in self.status.items()
            ],
            "submissions": [r.to_dict() for r in self.submissions.values()],
            "final_labels": {k: v.to_dict() for k, v in self.final_labels.items()},
            "locked": self.locked,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AnnotationSession":
        docs = {d["id"]: Document.from_dict(d) for d in data["docs"]}
        submissions = {}
        for rec_d in data.get("submissions", []):
            rec = LabelRecord.from_dict(rec_d)
            submissions[(rec.doc_id, rec.annotator_id)] = rec
        return cls(
            session_id=data["session_id"],
            docs=docs,
            annotators=dict(data["annotators"]),
            assignment={k: tuple(v) for k, v in data["assignment"].items()},
            status={(s["doc_id"], s["annotator_id"]): s["status"]
                    for s in data.get("status", [])},
            submissions=submissions,
            final_labels={k: LabelRecord.from_dict(v)
                          for k, v in data.get("final_labels", {}).items()},
            locked=bool(data.get("locked", False)),
        )

    def save(self, path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True, indent=1),
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path) -> "AnnotationSession":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def create_session(
    session_id: str,
    docs: Sequence[Document],
    annotators: dict,
    seed: int = 0,
) -> AnnotationSession:
    """Assign each doc to exactly two primaries, workload-balanced (max-min <= 1)."""
    primaries = [a for a, r in annotators.items() if r == Role.PRIMARY]
    if len(primaries) < 2:
        raise SessionError("a session needs at least two primary annotators")
    rng = random.Random(seed)
    order = list(primaries)
    rng.shuffle(order)
    load = {a: 0 for a in order}
    assignment = {}
    status = {}
    for doc in docs:
        # Two least-loaded annotators; seeded order breaks ties.
        chosen = sorted(order, key=lambda a: (load[a], order.index(a)))[:2]
        assignment[doc.id] = tuple(chosen)
        for a in chosen:
            load[a] += 1
            status[(doc.id, a)] = PENDING
    return AnnotationSession(
        session_id=session_id,
        docs={d.id: d for d in docs},
        annotators=dict(annotators),
        assignment=assignment,
        status=status,
    )


def submit_label(session: AnnotationSession, annotator_id: str, record: LabelRecord) -> None:
    """Store a primary submission; atomic check-then-update per session."""
    with session._lock:
        if session.locked:
            raise SessionError("session is locked")
        if record.annotator_id != annotator_id:
            raise SessionError("record annotator does not match submitting annotator")
        if annotator_id not in session.assignment.get(record.doc_id, ()):
            raise SessionError(
                f"annotator {annotator_id!r} is not assigned to doc {record.doc_id!r}"
            )
        session.submissions[(record.doc_id, annotator_id)] = record
        session.status[(record.doc_id, annotator_id)] = SUBMITTED


@dataclass(frozen=True)
class Conflict:
    doc_id: str
    submissions: tuple  # the two primary LabelRecords
    fields: tuple  # which layered fields disagree

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "submissions": [r.to_dict() for r in self.submissions],
            "fields": list(self.fields),
        }


def _conflict_fields(a: LabelRecord, b: LabelRecord) -> tuple:
    fields = []
    if a.pcl != b.pcl:
        fields.append("pcl")
    if a.subcategories != b.subcategories:
        fields.append("subcategories")
    if a.group != b.group:
        fields.append("group")
    if a.intensity != b.intensity:
        fields.append("intensity")
    return tuple(fields)


def adjudication_queue(session: AnnotationSession) -> list:
    """Docs whose two primary records disagree in any layered field.

    Full-agreement docs get their final label auto-set to the agreed record.
    """
    with session._lock:
        queue = []
        for doc_id, (a, b) in session.assignment.items():
            ra = session.submissions.get((doc_id, a))
            rb = session.submissions.get((doc_id, b))
            if ra is None or rb is None:
                continue
            fields = _conflict_fields(ra, rb)
            if fields:
                if doc_id not in session.final_labels:
                    queue.append(Conflict(doc_id=doc_id, submissions=(ra, rb), fields=fields))
            elif doc_id not in session.final_labels:
                session.final_labels[doc_id] = ra
        return queue


def resolve_conflict(
    session: AnnotationSession,
    proofreader_id: str,
    record: LabelRecord,
) -> None:
    with session._lock:
        role = session.annotators.get(proofreader_id)
        if role not in (Role.PROOFREADER, Role.ADMIN):
            raise SessionError("only a proofreader may resolve conflicts")
        if record.doc_id not in session.docs:
            raise SessionError(f"unknown doc {record.doc_id!r}")
        session.final_labels[record.doc_id] = record


def lock_session(session: AnnotationSession) -> None:
    with session._lock:
        session.locked = True
