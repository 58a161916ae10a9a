"""Clean the raw fixture corpus and score it with the offline scorer.

Shows the cleaning report (dedup, mention redaction, boilerplate and
emoji handling) and the toxicity score distribution with its
mild/moderate/severe bucketing.
"""

from pathlib import Path

from pclkit.lexicon import load_lexicon
from pclkit.model import Language, load_dataset
from pclkit.toxicity import bucketize, distribution_stats, score_fallback
from pclkit.webclean import CleaningConfig, clean_pipeline

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"

config = CleaningConfig.load(FIXTURES / "cleaning.yaml")
docs = load_dataset(FIXTURES / "raw_docs.jsonl")
cleaned, report = clean_pipeline(docs, config)
print(f"cleaned {len(docs)} -> {len(cleaned)} docs")
for key, value in report.to_dict().items():
    print(f"  {key}: {value}")

lex_en = load_lexicon(FIXTURES / "lexicon_en.tsv", Language.EN)
lex_zh = load_lexicon(FIXTURES / "lexicon_zh.tsv", Language.ZH)
scores = [
    score_fallback(d.id, d.text, lex_en if d.language is Language.EN else lex_zh)
    for d in cleaned
]
stats = distribution_stats([s.score for s in scores])
print(f"\nscore mean {stats.mean:.3f}, median {stats.median:.3f}")
print(f"histogram {stats.histogram}")

buckets = {}
for s in scores:
    level = bucketize(s.score)
    buckets[level.value] = buckets.get(level.value, 0) + 1
print(f"intensity buckets: {buckets}")
