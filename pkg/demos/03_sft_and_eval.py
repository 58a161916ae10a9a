"""Build an instruction-tuning dataset and evaluate stored predictions.

Uses the fixture gold labels and the bundled stand-in model outputs, then
prints macro precision/recall/F1 with per-group and per-subcategory
breakdowns.
"""

import json
from pathlib import Path

from pclkit import evaluation as ev
from pclkit.instruct import TemplateConfig, build_doc_dataset
from pclkit.model import Language, load_dataset
from pclkit.webclean import CleaningConfig, clean_pipeline

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"

docs = load_dataset(FIXTURES / "raw_docs.jsonl")
cleaned, _ = clean_pipeline(docs, CleaningConfig.load(FIXTURES / "cleaning.yaml"))
labels = load_dataset(FIXTURES / "labels.jsonl")

samples, report = build_doc_dataset(cleaned, labels,
                                    config=TemplateConfig.load(FIXTURES / "templates.yaml"))
print(f"built {report.exported} instruction samples")
print(f"example output token: {samples[0].output!r}")

gold = {r.doc_id: r for r in labels}
preds = {}
for line in (FIXTURES / "predictions.jsonl").read_text(encoding="utf-8").splitlines():
    obj = json.loads(line)
    doc = next(d for d in cleaned if d.id == obj["doc_id"])
    preds[obj["doc_id"]] = ev.map_output(obj["raw_output"], doc.language)

ids = sorted(gold)
result = ev.evaluate([gold[i].pcl for i in ids], [preds[i] for i in ids])
print(f"\nmacro P {result.macro.precision:.3f} "
      f"R {result.macro.recall:.3f} F1 {result.macro.f1:.3f}")

by_id = {d.id: d for d in cleaned}
triples = [(gold[i].pcl, preds[i], by_id[i].group_tag)
           for i in ids if by_id[i].group_tag]
for group, metrics in sorted(ev.group_breakdown(triples).items(),
                             key=lambda kv: kv[0].value):
    print(f"  {group.value:<14} F1 {metrics.f1:.3f}")
