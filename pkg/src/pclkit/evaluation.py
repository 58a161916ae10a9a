"""Scoring classifier predictions: output mapping, macro P/R/F1, breakdowns.

Macro values are the unweighted mean over the positive and negative
classes ("macro-average"); a support-weighted variant is available
behind a flag.  Free-text model outputs are mapped to binary labels via
ordered cue phrases; unparseable outputs become UNKNOWN and are scored
by an explicit policy instead of being silently dropped.
"""

from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass, field
from decimal import Decimal, ROUND_HALF_UP
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import yaml

from .model import Document, GroupTag, Language, Subcategory, ValidationError


class MappedLabel(str, enum.Enum):
    POSITIVE = "POSITIVE"
    NEGATIVE = "NEGATIVE"
    UNKNOWN = "UNKNOWN"


class UnknownPolicy(str, enum.Enum):
    COUNT_AS_NEGATIVE = "COUNT_AS_NEGATIVE"
    COUNT_AS_WRONG = "COUNT_AS_WRONG"


@dataclass(frozen=True)
class Prediction:
    doc_id: str
    raw_output: str
    mapped: MappedLabel


DEFAULT_CUES = {
    Language.EN: (["yes", "is pcl", "contains pcl"],
                  ["no", "not pcl", "does not contain"]),
    Language.ZH: (["是", "包含"], ["否", "不是", "不包含"]),
}


@dataclass(frozen=True)
class MappingConfig:
    """Ordered cue phrases per language.

    ``cues[language]`` is a single ordered list of (phrase, label); the
    earliest listed phrase found in the raw output decides the label.
    Built from separate positive/negative lists with positives first.
    """

    cues: dict

    @classmethod
    def from_lists(cls, per_language: dict) -> "MappingConfig":
        cues = {}
        for lang, (positive, negative) in per_language.items():
            cues[Language(lang)] = tuple(
                [(p, MappedLabel.POSITIVE) for p in positive]
                + [(n, MappedLabel.NEGATIVE) for n in negative]
            )
        return cls(cues=cues)

    @classmethod
    def default(cls) -> "MappingConfig":
        return cls.from_lists(DEFAULT_CUES)

    @classmethod
    def load(cls, path) -> "MappingConfig":
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        return cls.from_lists({
            lang: (spec["positive"], spec["negative"])
            for lang, spec in data["cues"].items()
        })


def map_output(raw: str, language: Language, config: Optional[MappingConfig] = None) -> MappedLabel:
    config = config or MappingConfig.default()
    haystack = raw.casefold()
    for phrase, label in config.cues.get(language, ()):
        if phrase.casefold() in haystack:
            return label
    return MappedLabel.UNKNOWN


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    fn: int
    tn: int
    unknown_count: int = 0

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn,
                "unknown_count": self.unknown_count}


@dataclass(frozen=True)
class MacroMetrics:
    precision: float
    recall: float
    f1: float

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


@dataclass(frozen=True)
class EvalReport:
    confusion: Confusion
    macro: MacroMetrics
    per_group: dict = field(default_factory=dict)
    per_subcategory: dict = field(default_factory=dict)
    scenario: Optional[str] = None

    def to_dict(self) -> dict:
        d = {
            "confusion": self.confusion.to_dict(),
            "macro": self.macro.to_dict(),
            "per_group": {k.value if isinstance(k, GroupTag) else k: v.to_dict()
                          for k, v in sorted(self.per_group.items(), key=lambda kv: str(kv[0]))},
            "per_subcategory": {k.value if isinstance(k, Subcategory) else k: v
                                for k, v in sorted(self.per_subcategory.items(),
                                                   key=lambda kv: str(kv[0]))},
        }
        if self.scenario is not None:
            d["scenario"] = self.scenario
        return d


def report_to_json(report: EvalReport) -> str:
    """Canonical machine-readable rendering (the API serves these bytes)."""
    return json.dumps(report.to_dict(), ensure_ascii=False, sort_keys=True,
                      separators=(",", ":"))


def _effective_label(gold: bool, pred: MappedLabel, policy: UnknownPolicy) -> bool:
    if pred is MappedLabel.UNKNOWN:
        if policy is UnknownPolicy.COUNT_AS_NEGATIVE:
            return False
        return not gold  # always wrong
    return pred is MappedLabel.POSITIVE


def _prf_for_class(gold: Sequence[bool], pred: Sequence[bool], positive: bool) -> tuple:
    tp = sum(1 for g, p in zip(gold, pred) if g == positive and p == positive)
    fp = sum(1 for g, p in zip(gold, pred) if g != positive and p == positive)
    fn = sum(1 for g, p in zip(gold, pred) if g == positive and p != positive)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def macro_prf(
    gold: Sequence[bool],
    pred: Sequence[MappedLabel],
    unknown_policy: UnknownPolicy = UnknownPolicy.COUNT_AS_WRONG,
    support_weighted: bool = False,
) -> MacroMetrics:
    if len(gold) != len(pred):
        raise ValidationError("gold and predictions must have equal length")
    if not gold:
        raise ValidationError("macro_prf requires non-empty input")
    eff = [_effective_label(g, p, unknown_policy) for g, p in zip(gold, pred)]
    pos = _prf_for_class(gold, eff, True)
    neg = _prf_for_class(gold, eff, False)
    if support_weighted:
        n_pos = sum(1 for g in gold if g)
        w_pos, w_neg = n_pos / len(gold), 1 - n_pos / len(gold)
    else:
        w_pos = w_neg = 0.5
    return MacroMetrics(
        precision=w_pos * pos[0] + w_neg * neg[0],
        recall=w_pos * pos[1] + w_neg * neg[1],
        f1=w_pos * pos[2] + w_neg * neg[2],
    )


def evaluate(
    gold: Sequence[bool],
    pred: Sequence[MappedLabel],
    unknown_policy: UnknownPolicy = UnknownPolicy.COUNT_AS_WRONG,
    scenario: Optional[str] = None,
) -> EvalReport:
    eff = [_effective_label(g, p, unknown_policy) for g, p in zip(gold, pred)]
    known = [(g, e) for (g, e), p in zip(zip(gold, eff), pred) if p is not MappedLabel.UNKNOWN]
    tp = sum(1 for g, e in known if g and e)
    fp = sum(1 for g, e in known if not g and e)
    fn = sum(1 for g, e in known if g and not e)
    tn = sum(1 for g, e in known if not g and not e)
    unknown = sum(1 for p in pred if p is MappedLabel.UNKNOWN)
    return EvalReport(
        confusion=Confusion(tp=tp, fp=fp, fn=fn, tn=tn, unknown_count=unknown),
        macro=macro_prf(gold, pred, unknown_policy),
        scenario=scenario,
    )


def group_breakdown(
    records: Iterable[tuple],  # (gold: bool, pred: MappedLabel, group: GroupTag)
    unknown_policy: UnknownPolicy = UnknownPolicy.COUNT_AS_WRONG,
) -> dict:
    """Per-group macro triples; each group scored over its own records only."""
    slices: dict = {}
    for gold, pred, group in records:
        slices.setdefault(group, ([], []))
        slices[group][0].append(gold)
        slices[group][1].append(pred)
    return {
        group: macro_prf(golds, preds, unknown_policy)
        for group, (golds, preds) in slices.items()
    }


def subcategory_breakdown(
    records: Iterable[tuple],  # (gold: bool, pred: MappedLabel, subcategory)
    unknown_policy: UnknownPolicy = UnknownPolicy.COUNT_AS_WRONG,
) -> dict:
    """Per-subcategory macro F1 over each subcategory's subset."""
    slices: dict = {}
    for gold, pred, sub in records:
        slices.setdefault(sub, ([], []))
        slices[sub][0].append(gold)
        slices[sub][1].append(pred)
    return {
        sub: macro_prf(golds, preds, unknown_policy).f1
        for sub, (golds, preds) in slices.items()
    }


def round_percent(value: float) -> float:
    """[0,1] metric -> percent, one decimal, half-up (table rendering)."""
    return float((Decimal(str(value)) * 100).quantize(Decimal("0.1"),
                                                      rounding=ROUND_HALF_UP))


def score_delta(current_pct: float, baseline_pct: float) -> str:
    """Signed one-decimal delta between two already-rounded percent scores."""
    delta = (Decimal(str(current_pct)) - Decimal(str(baseline_pct))).quantize(
        Decimal("0.1"), rounding=ROUND_HALF_UP
    )
    return f"{'+' if delta >= 0 else ''}{delta}"


@dataclass(frozen=True)
class InterferenceResult:
    reports: dict  # scenario name -> EvalReport
    f1_percent: dict  # scenario name -> rounded percent
    deltas: dict  # scenario name -> signed delta vs the previous scenario

    SCENARIOS = ("S_NONE", "S_FEW", "S_ALL")


def interference_experiment(
    pool: Sequence[Document],
    gold: dict,
    predictions: dict,
    few_fraction: float = 0.5,
    seed: int = 0,
    unknown_policy: UnknownPolicy = UnknownPolicy.COUNT_AS_WRONG,
) -> InterferenceResult:
    """Score the S-None / S-Few / S-All interference scenarios.

    ``gold`` and ``predictions`` map doc_id to the gold boolean and the
    mapped label.  S-Few adds a seeded few_fraction sample of the flagged
    docs to the unflagged ones; deltas are reported against the previous
    scenario (the table convention: change after each addition).
    """
    if not 0.0 < few_fraction <= 1.0:
        raise ValidationError("few_fraction must be in (0,1]")
    flagged = [d for d in pool if d.interference]
    unflagged = [d for d in pool if not d.interference]
    if not flagged:
        raise ValidationError("interference experiment undefined: no flagged docs")
    rng = random.Random(seed)
    k = round(few_fraction * len(flagged))
    few_sample = rng.sample(sorted(flagged, key=lambda d: d.id), k)
    scenarios = {
        "S_NONE": unflagged,
        "S_FEW": unflagged + sorted(few_sample, key=lambda d: d.id),
        "S_ALL": unflagged + sorted(flagged, key=lambda d: d.id),
    }
    reports = {}
    f1_percent = {}
    for name, docs in scenarios.items():
        golds = [gold[d.id] for d in docs]
        preds = [predictions[d.id] for d in docs]
        reports[name] = evaluate(golds, preds, unknown_policy, scenario=name)
        f1_percent[name] = round_percent(reports[name].macro.f1)
    deltas = {
        "S_NONE": "+0.0",
        "S_FEW": score_delta(f1_percent["S_FEW"], f1_percent["S_NONE"]),
        "S_ALL": score_delta(f1_percent["S_ALL"], f1_percent["S_FEW"]),
    }
    return InterferenceResult(reports=reports, f1_percent=f1_percent, deltas=deltas)


def render_text_report(report: EvalReport) -> str:
    """Human-readable companion to the canonical JSON."""
    lines = [
        "confusion: tp=%d fp=%d fn=%d tn=%d unknown=%d" % (
            report.confusion.tp, report.confusion.fp, report.confusion.fn,
            report.confusion.tn, report.confusion.unknown_count),
        "macro: P=%.1f R=%.1f F1=%.1f" % (
            round_percent(report.macro.precision),
            round_percent(report.macro.recall),
            round_percent(report.macro.f1)),
    ]
    for group, m in sorted(report.per_group.items(), key=lambda kv: str(kv[0])):
        lines.append("group %s: P=%.1f R=%.1f F1=%.1f" % (
            getattr(group, "value", group), round_percent(m.precision),
            round_percent(m.recall), round_percent(m.f1)))
    for sub, f1 in sorted(report.per_subcategory.items(), key=lambda kv: str(kv[0])):
        lines.append("subcategory %s: F1=%.1f" % (getattr(sub, "value", sub),
                                                  round_percent(f1)))
    return "\n".join(lines) + "\n"
