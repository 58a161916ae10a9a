"""Simulate a two-annotator session with proofreader adjudication.

Creates a session over ten fixture documents, plays both primary
annotators with slightly different judgment, prints the agreement report
and resolves the remaining conflicts.
"""

from pathlib import Path

from pclkit.annotation import (
    Role,
    adjudication_queue,
    compute_iaa_report,
    create_session,
    resolve_conflict,
    submit_label,
)
from pclkit.model import Intensity, LabelRecord, Round, Subcategory, load_dataset

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"

docs = load_dataset(FIXTURES / "raw_docs.jsonl")[:10]
session = create_session("demo", docs,
                         {"ann-a": Role.PRIMARY, "ann-b": Role.PRIMARY,
                          "proof": Role.PROOFREADER}, seed=1)


def judge(doc, annotator, strict):
    condescending = "poor" in doc.text or "可怜" in doc.text
    if strict and "bless" in doc.text:
        condescending = True
    return LabelRecord(
        doc_id=doc.id, annotator_id=annotator, round=Round.PRIMARY,
        pcl=condescending,
        subcategories={Subcategory.COMPASSION} if condescending else frozenset(),
        intensity=Intensity.MILD if condescending else Intensity.NONE,
    )


for doc in docs:
    submit_label(session, "ann-a", judge(doc, "ann-a", strict=True))
    submit_label(session, "ann-b", judge(doc, "ann-b", strict=False))

print(compute_iaa_report(session.annotated_pairs()).render_text())

conflicts = adjudication_queue(session)
print(f"{len(conflicts)} conflicts to adjudicate")
for conflict in conflicts:
    chosen = conflict.submissions[0]
    resolve_conflict(session, "proof", LabelRecord(
        doc_id=conflict.doc_id, annotator_id="proof", round=Round.PROOFREAD,
        pcl=chosen.pcl, subcategories=chosen.subcategories,
        intensity=chosen.intensity,
    ))
print(f"session complete: {session.is_complete()}")
