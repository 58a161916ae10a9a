"""Generate the deterministic test fixture set under fixtures/.

Everything here is synthetic.  The corpus mixes English and Chinese
comments, seeds a fraction of them with dictionary terms, and writes the
lexicons, cleaning config, gold labels, model predictions, API tokens
and a pipeline run config that the CLI and acceptance tests consume.
Re-running the script always produces byte-identical files.
"""

import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from pclkit.instruct import TemplateConfig
from pclkit.lexicon import Lexicon, LexiconEntry, match_terms, save_lexicon
from pclkit.model import (
    Document,
    GroupTag,
    Intensity,
    LabelRecord,
    Language,
    Round,
    Source,
    Subcategory,
    canonical_json,
)
from pclkit.webclean import CleaningConfig, clean_pipeline

ROOT = Path(__file__).resolve().parents[1]
OUT = ROOT / "fixtures"

EN_TERMS = [
    ("poor thing", 1.0), ("bless their heart", 0.9), ("so brave", 0.8),
    ("these people", 0.7), ("less fortunate", 0.9), ("simple folk", 0.6),
    ("they just need", 0.5), ("good for them", 0.4), ("helpless", 0.7),
    ("pity", 0.8),
]
ZH_TERMS = [
    ("可怜", 1.0), ("弱势群体", 0.9), ("这些人", 0.6), ("不容易", 0.5),
    ("需要帮助", 0.7), ("底层", 0.8), ("同情", 0.8), ("心疼", 0.6),
]

EN_FILLER = [
    "the city council voted on the new budget today",
    "traffic was heavy on the ring road this morning",
    "a long thread about keyboard layouts and typing speed",
    "someone shared photos from a weekend hiking trip",
    "the library extended its opening hours for exams",
    "a recipe for lentil soup with too many steps",
    "discussion of an old film that aged surprisingly well",
    "notes from a lecture on river erosion patterns",
]
ZH_FILLER = [
    "今天的天气预报说下午有阵雨",
    "地铁早高峰比平时拥挤了很多",
    "楼下的早餐店换了新的菜单",
    "周末去郊外爬山拍了不少照片",
    "图书馆考试周延长了开放时间",
    "这部老电影现在看依然很有味道",
    "小区门口新开了一家修车铺",
    "讲座的内容是河流侵蚀的规律",
]

GROUPS = [
    GroupTag.DISABLED, GroupTag.WOMEN, GroupTag.ELDERLY, GroupTag.CHILDREN,
    GroupTag.SINGLE_PARENT, GroupTag.ORDINARY, GroupTag.DISADVANTAGED,
]


def write_jsonl(path, dicts):
    path.write_text("".join(canonical_json(d) + "\n" for d in dicts),
                    encoding="utf-8")


def build_docs(rng):
    docs = []
    for i in range(300):
        parts = [rng.choice(EN_FILLER), f"case {i}"]
        if rng.random() < 0.4:
            parts.insert(1, rng.choice(EN_TERMS)[0])
        if rng.random() < 0.15:
            parts.insert(0, "@user" + str(rng.randint(1, 40)))
        docs.append(Document(
            id=f"en{i:04d}", text=" ".join(parts), language=Language.EN,
            source=Source.REDDIT, group_tag=GROUPS[i % len(GROUPS)],
        ))
    for i in range(200):
        parts = [rng.choice(ZH_FILLER), f"第{i}条"]
        if rng.random() < 0.4:
            parts.insert(1, rng.choice(ZH_TERMS)[0])
        if rng.random() < 0.15:
            parts.insert(0, "@网友" + str(rng.randint(1, 40)))
        if rng.random() < 0.1:
            parts.insert(0, "# 话题内容")
        docs.append(Document(
            id=f"zh{i:04d}", text=" ".join(parts), language=Language.ZH,
            source=Source.WEIBO if i % 2 else Source.ZHIHU,
            group_tag=GROUPS[i % len(GROUPS)],
        ))
    return docs


def main():
    rng = random.Random(20240817)
    OUT.mkdir(exist_ok=True)

    lex_en = Lexicon(language=Language.EN, entries=tuple(
        LexiconEntry(term, conf, True) for term, conf in EN_TERMS
    ))
    lex_zh = Lexicon(language=Language.ZH, entries=tuple(
        LexiconEntry(term, conf, True) for term, conf in ZH_TERMS
    ))
    save_lexicon(lex_en, OUT / "lexicon_en.tsv")
    save_lexicon(lex_zh, OUT / "lexicon_zh.tsv")

    cleaning = CleaningConfig(
        boilerplate_patterns=["# 话题内容", "# 评论日期"],
        emoji_map={"😢": "[sad]", "👍": "[thumbs up]"},
        min_length=5,
    )
    cleaning.save(OUT / "cleaning.yaml")

    docs = build_docs(rng)
    write_jsonl(OUT / "raw_docs.jsonl", [d.to_dict() for d in docs])

    # Labels and predictions reference the post-cleaning corpus so the
    # pipeline's dataset builder never sees an unknown id.
    cleaned, _ = clean_pipeline(docs, cleaning)
    labeled = [d for d in cleaned if rng.random() < 0.4]
    labels, predictions = [], []
    for d in labeled:
        lex = lex_en if d.language is Language.EN else lex_zh
        hit = bool(match_terms(d.text, lex))
        gold = hit if rng.random() < 0.9 else not hit
        labels.append(LabelRecord(
            doc_id=d.id, annotator_id="gold", round=Round.PROOFREAD, pcl=gold,
            subcategories=frozenset({rng.choice(list(Subcategory))}) if gold else frozenset(),
            group=d.group_tag if gold else None,
            intensity=rng.choice([Intensity.MILD, Intensity.MODERATE,
                                  Intensity.SEVERE]) if gold else Intensity.NONE,
        ))
        # The stand-in model answers from the dictionary, with a little noise.
        verdict = hit if rng.random() < 0.85 else not hit
        if d.language is Language.EN:
            raw = "Yes, it talks down." if verdict else "No, it reads neutral."
        else:
            raw = "是，含有居高临下的语气。" if verdict else "否，语气正常。"
        predictions.append({"doc_id": d.id, "raw_output": raw})
    write_jsonl(OUT / "labels.jsonl", [r.to_dict() for r in labels])
    write_jsonl(OUT / "predictions.jsonl", predictions)

    TemplateConfig.default().save(OUT / "templates.yaml")

    (OUT / "tokens.tsv").write_text(
        "tok-ann-a\tann-a\tPRIMARY\n"
        "tok-ann-b\tann-b\tPRIMARY\n"
        "tok-proof\tproof\tPROOFREADER\n",
        encoding="utf-8",
    )

    (OUT / "run_config.yaml").write_text(
        "workdir: .\n"
        "out_dir: out\n"
        "language: EN\n"
        "lexicon: lexicon_en.tsv\n"
        "cleaning_config: cleaning.yaml\n"
        "raw_docs: raw_docs.jsonl\n"
        "labels: labels.jsonl\n"
        "predictions: predictions.jsonl\n"
        "template_config: templates.yaml\n"
        "sft_dataset: cpcl\n"
        "with_intensity: true\n"
        "keep_prob: 0.30\n"
        "seeds:\n"
        "  pt_filter: 7\n"
        "training:\n"
        "  base_model: placeholder-7b\n"
        "  epochs: 3\n"
        "  learning_rate: 2.0e-5\n"
        "  batch_size: 16\n",
        encoding="utf-8",
    )

    print(f"wrote fixtures for {len(docs)} docs "
          f"({len(labels)} labeled) to {OUT}")


if __name__ == "__main__":
    main()
