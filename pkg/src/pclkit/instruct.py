"""Instruction-sample construction for supervised fine-tuning export.

Samples are instruction/input/output triples.  The instruction always
carries the fixed per-language condescension description (definition plus
the five subcategory names); an intensity clause is optionally appended
with the bucketed toxicity level substituted in.  Pair corpora are
concatenated with a marked separator, scrubbed with an offensive-language
lexicon, and length-capped (discard, never truncate).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import yaml

from .lexicon import Lexicon, match_terms
from .model import Document, Intensity, LabelRecord, Language, ValidationError

PAIR_SEPARATOR = "⟦SEP⟧"

SUBCATEGORY_NAMES = {
    Language.EN: (
        "Unbalanced Power Relations",
        "Spectator",
        "Prejudice",
        "Appeal",
        "Elicit Compassion",
    ),
    Language.ZH: ("不平等权力关系", "旁观者", "偏见", "呼吁", "唤起同情"),
}

INTENSITY_WORDS = {
    Language.EN: {Intensity.MILD: "mild", Intensity.MODERATE: "moderate", Intensity.SEVERE: "severe"},
    Language.ZH: {Intensity.MILD: "轻微", Intensity.MODERATE: "中等", Intensity.SEVERE: "严重"},
}

_EN_DESCRIPTION = (
    "Determine whether the following text contains patronizing or condescending "
    "language toward a vulnerable group. Such language conveys a sense of "
    "superiority, pity, or false sympathy, and its toxicity is implicit rather "
    "than openly aggressive. Its subcategories are: Unbalanced Power Relations, "
    "Spectator, Prejudice, Appeal, and Elicit Compassion. Answer with exactly "
    "one word: Yes or No."
)
_ZH_DESCRIPTION = (
    "请判断下面的文本是否包含针对弱势群体的居高临下或屈尊俯就的言论。"
    "这类言论传递优越感、怜悯或虚假同情，其毒性是隐性的而非公开攻击性的。"
    "其子类别包括：不平等权力关系、旁观者、偏见、呼吁、唤起同情。"
    "请只回答一个词：是 或 否。"
)
_EN_INTENSITY_CLAUSE = " The toxicity intensity of this text is {level}."
_ZH_INTENSITY_CLAUSE = " 该文本的毒性强度为{level}。"


@dataclass(frozen=True)
class LanguageTemplates:
    description_text: str
    intensity_clause: str
    positive_token: str
    negative_token: str
    max_input_units: int

    def __post_init__(self):
        if self.intensity_clause.count("{level}") != 1:
            raise ValidationError("intensity_clause must contain {level} exactly once")
        if self.max_input_units <= 0:
            raise ValidationError("max_input_units must be positive")


@dataclass(frozen=True)
class TemplateConfig:
    languages: dict

    def for_language(self, language: Language) -> LanguageTemplates:
        if language not in self.languages:
            raise ValidationError(f"no templates configured for {language.value}")
        return self.languages[language]

    @classmethod
    def default(cls) -> "TemplateConfig":
        # Max input lengths are Unicode scalar counts sized conservatively
        # under the 4096/8192-token model contexts.
        return cls(languages={
            Language.EN: LanguageTemplates(
                _EN_DESCRIPTION, _EN_INTENSITY_CLAUSE, "Yes", "No", 3500
            ),
            Language.ZH: LanguageTemplates(
                _ZH_DESCRIPTION, _ZH_INTENSITY_CLAUSE, "是", "否", 7000
            ),
        })

    @classmethod
    def load(cls, path) -> "TemplateConfig":
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        languages = {}
        for lang, spec in data["languages"].items():
            languages[Language(lang)] = LanguageTemplates(
                description_text=spec["description_text"],
                intensity_clause=spec["intensity_clause"],
                positive_token=spec["positive_token"],
                negative_token=spec["negative_token"],
                max_input_units=int(spec["max_input_units"]),
            )
        return cls(languages=languages)

    def save(self, path) -> None:
        data = {"languages": {
            lang.value: {
                "description_text": t.description_text,
                "intensity_clause": t.intensity_clause,
                "positive_token": t.positive_token,
                "negative_token": t.negative_token,
                "max_input_units": t.max_input_units,
            }
            for lang, t in self.languages.items()
        }}
        Path(path).write_text(
            yaml.safe_dump(data, allow_unicode=True, sort_keys=True), encoding="utf-8"
        )


@dataclass(frozen=True)
class InstructionSample:
    instruction: str
    input: str
    output: str
    language: Language
    meta: dict = field(default_factory=dict)

    def validate(self, config: TemplateConfig) -> None:
        t = config.for_language(self.language)
        for name in SUBCATEGORY_NAMES[self.language]:
            if name not in self.instruction:
                raise ValidationError(f"instruction missing subcategory name {name!r}")
        if self.output not in (t.positive_token, t.negative_token):
            raise ValidationError(f"output token {self.output!r} is not canonical")

    def to_dict(self) -> dict:
        return {
            "instruction": self.instruction,
            "input": self.input,
            "output": self.output,
            "language": self.language.value,
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InstructionSample":
        return cls(
            instruction=d["instruction"],
            input=d["input"],
            output=d["output"],
            language=Language(d["language"]),
            meta=d.get("meta") or {},
        )


def build_description_instruction(language: Language, config: TemplateConfig) -> str:
    return config.for_language(language).description_text


def build_sample(
    doc: Document,
    label: LabelRecord,
    intensity: Optional[Intensity] = None,
    include_intensity: bool = False,
    config: Optional[TemplateConfig] = None,
    pcl_override: Optional[bool] = None,
) -> InstructionSample:
    """Build one sample.  ``pcl_override`` substitutes the output label
    (used when binarizing 0..4 hierarchy levels at a custom threshold)."""
    config = config or TemplateConfig.default()
    if label.doc_id != doc.id:
        raise ValidationError(f"label doc_id {label.doc_id!r} does not match document {doc.id!r}")
    t = config.for_language(doc.language)
    instruction = t.description_text
    meta = {"source": doc.source.value}
    if include_intensity:
        if intensity is None or intensity is Intensity.NONE:
            raise ValidationError(f"document {doc.id!r}: intensity required but missing")
        instruction += t.intensity_clause.format(
            level=INTENSITY_WORDS[doc.language][intensity]
        )
        meta["intensity"] = intensity.value
    if label.subcategories:
        meta["subcategories"] = sorted(s.value for s in label.subcategories)
    pcl = label.pcl if pcl_override is None else pcl_override
    return InstructionSample(
        instruction=instruction,
        input=doc.text,
        output=t.positive_token if pcl else t.negative_token,
        language=doc.language,
        meta=meta,
    )


def concat_pair(comment: str, reply: str, separator: str = PAIR_SEPARATOR) -> str:
    """Join a comment/reply pair recoverably.  Rejects (never mangles) texts
    that already contain the separator."""
    if not comment or not reply:
        raise ValidationError("both sides of a pair must be non-empty")
    if separator in comment or separator in reply:
        raise ValidationError(f"text contains the pair separator {separator!r}")
    return f"{comment} {separator} {reply}"


def split_pair(joined: str, separator: str = PAIR_SEPARATOR) -> tuple:
    left, sep, right = joined.partition(f" {separator} ")
    if not sep:
        raise ValidationError("input does not contain the pair separator")
    return left, right


def filter_offensive_pairs(pairs: Sequence[tuple], offensive_lexicon: Lexicon) -> tuple:
    """Drop pairs where either side matches a relevant offensive term.

    Returns (kept pairs, removed count).
    """
    kept = []
    removed = 0
    for comment, reply in pairs:
        if match_terms(comment, offensive_lexicon) or match_terms(reply, offensive_lexicon):
            removed += 1
        else:
            kept.append((comment, reply))
    return kept, removed


def enforce_length(sample: InstructionSample, config: TemplateConfig) -> Optional[InstructionSample]:
    """Keep the sample iff its input fits the per-language unit budget
    (unit = Unicode scalar values).  Boundary inclusive; discarded samples
    are dropped whole, never truncated."""
    t = config.for_language(sample.language)
    if len(sample.input) <= t.max_input_units:
        return sample
    return None


def binarize_dpm(dpm_level: int, threshold: int = 2) -> bool:
    if not 0 <= dpm_level <= 4:
        raise ValidationError(f"dpm_level {dpm_level} outside 0..4")
    return dpm_level >= threshold


@dataclass(frozen=True)
class BuildReport:
    input_count: int
    offensive_removed: int = 0
    length_discarded: int = 0
    unsure_dropped: int = 0
    exported: int = 0

    def to_dict(self) -> dict:
        return {
            "input_count": self.input_count,
            "offensive_removed": self.offensive_removed,
            "length_discarded": self.length_discarded,
            "unsure_dropped": self.unsure_dropped,
            "exported": self.exported,
        }


def build_doc_dataset(
    docs: Sequence[Document],
    labels: Sequence[LabelRecord],
    intensities: Optional[dict] = None,
    include_intensity: bool = False,
    config: Optional[TemplateConfig] = None,
    dpm_threshold: Optional[int] = None,
) -> tuple:
    """Build samples for a document-level corpus (DPM/CPCL style).

    ``intensities`` maps doc_id -> Intensity when the intensity clause is
    enabled.  When ``dpm_threshold`` is given, labels carrying a 0..4
    hierarchy level have their output binarized at that threshold.
    Returns (samples sorted by doc id, BuildReport).
    """
    config = config or TemplateConfig.default()
    by_id = {d.id: d for d in docs}
    samples = []
    discarded = 0
    for label in sorted(labels, key=lambda r: r.doc_id):
        doc = by_id.get(label.doc_id)
        if doc is None:
            raise ValidationError(f"label references unknown document {label.doc_id!r}")
        override = None
        if dpm_threshold is not None and label.dpm_level is not None:
            override = binarize_dpm(label.dpm_level, dpm_threshold)
        sample = build_sample(
            doc,
            label,
            intensity=(intensities or {}).get(doc.id),
            include_intensity=include_intensity,
            config=config,
            pcl_override=override,
        )
        kept = enforce_length(sample, config)
        if kept is None:
            discarded += 1
        else:
            samples.append(kept)
    report = BuildReport(
        input_count=len(labels),
        length_discarded=discarded,
        exported=len(samples),
    )
    return samples, report


def build_pair_dataset(
    pairs: Sequence[tuple],
    labels: Sequence,  # parallel to pairs: True / False / None (unsure)
    offensive_lexicon: Optional[Lexicon] = None,
    language: Language = Language.EN,
    config: Optional[TemplateConfig] = None,
) -> tuple:
    """Build samples from a comment/reply pair corpus (TalkDown style).

    Unsure pairs (label None) are dropped and counted.  Returns
    (samples, BuildReport) with exact conservation bookkeeping:
    exported = inputs - unsure - offensive removals - length discards.
    """
    if len(pairs) != len(labels):
        raise ValidationError("pairs and labels must be parallel")
    config = config or TemplateConfig.default()
    t = config.for_language(language)
    labeled = [(p, l) for p, l in zip(pairs, labels) if l is not None]
    unsure = len(pairs) - len(labeled)
    if offensive_lexicon is not None:
        survivors = []
        removed = 0
        for p, l in labeled:
            if match_terms(p[0], offensive_lexicon) or match_terms(p[1], offensive_lexicon):
                removed += 1
            else:
                survivors.append((p, l))
    else:
        survivors, removed = labeled, 0
    samples = []
    discarded = 0
    for (comment, reply), pcl in survivors:
        sample = InstructionSample(
            instruction=t.description_text,
            input=concat_pair(comment, reply),
            output=t.positive_token if pcl else t.negative_token,
            language=language,
            meta={"source": "PAIR"},
        )
        kept = enforce_length(sample, config)
        if kept is None:
            discarded += 1
        else:
            samples.append(kept)
    report = BuildReport(
        input_count=len(pairs),
        offensive_removed=removed,
        length_discarded=discarded,
        unsure_dropped=unsure,
        exported=len(samples),
    )
    return samples, report


def export_samples(samples: Sequence[InstructionSample], path) -> None:
    """Deterministic line-oriented export (sorted keys, no timestamps)."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(json.dumps(s.to_dict(), ensure_ascii=False, sort_keys=True,
                                separators=(",", ":")) + "\n")


def load_samples(path) -> list:
    samples = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line:
            samples.append(InstructionSample.from_dict(json.loads(line)))
    return samples
