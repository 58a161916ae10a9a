"""Cleaning of raw social-media exports into Documents.

The pipeline mirrors how the Chinese web corpus is constructed: strip
platform boilerplate tags, redact @-mentions to a privacy token, convert
platform emoji to their text form, then deduplicate.  The stage order is
fixed so that deduplication sees canonical text.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import yaml

from .model import Document, GroupTag, ValidationError

EXPECTED_KEYWORDS_PER_GROUP = 20


@dataclass
class CleaningConfig:
    boilerplate_patterns: list = field(default_factory=list)
    emoji_map: dict = field(default_factory=dict)
    redaction_token: str = "#USER"
    keyword_lists: dict = field(default_factory=dict)
    min_length: int = 5  # drop "irrelevant" ultra-short fragments

    def __post_init__(self):
        if not self.redaction_token:
            raise ValidationError("redaction_token must be non-empty")
        for key in self.emoji_map:
            if not key:
                raise ValidationError("emoji_map keys must be non-empty sequences")

    def check_keyword_counts(self) -> list:
        """Group tags whose keyword list does not hold the canonical 20 terms."""
        return [
            tag for tag, terms in self.keyword_lists.items()
            if len(terms) != EXPECTED_KEYWORDS_PER_GROUP
        ]

    @classmethod
    def load(cls, path) -> "CleaningConfig":
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        keyword_lists = {
            GroupTag(k): list(v) for k, v in (data.get("keyword_lists") or {}).items()
        }
        return cls(
            boilerplate_patterns=list(data.get("boilerplate_patterns") or []),
            emoji_map=dict(data.get("emoji_map") or {}),
            redaction_token=data.get("redaction_token", "#USER"),
            keyword_lists=keyword_lists,
            min_length=int(data.get("min_length", 5)),
        )

    def save(self, path) -> None:
        data = {
            "boilerplate_patterns": list(self.boilerplate_patterns),
            "emoji_map": dict(self.emoji_map),
            "redaction_token": self.redaction_token,
            "keyword_lists": {k.value: list(v) for k, v in self.keyword_lists.items()},
            "min_length": self.min_length,
        }
        Path(path).write_text(
            yaml.safe_dump(data, allow_unicode=True, sort_keys=True), encoding="utf-8"
        )


@dataclass(frozen=True)
class CleanReport:
    removed_dupes: int = 0
    redactions: int = 0
    tag_removals: int = 0
    emoji_conversions: int = 0
    removed_short: int = 0

    def to_dict(self) -> dict:
        return {
            "removed_dupes": self.removed_dupes,
            "redactions": self.redactions,
            "tag_removals": self.tag_removals,
            "emoji_conversions": self.emoji_conversions,
            "removed_short": self.removed_short,
        }


def _collapse_ws(text: str) -> str:
    return " ".join(text.split())


def dedupe_key(text: str) -> str:
    return _collapse_ws(unicodedata.normalize("NFKC", text))


def dedupe(docs: Sequence[Document]) -> list:
    """Keep the first occurrence per normalized text; stable order."""
    seen = set()
    out = []
    for doc in docs:
        key = dedupe_key(doc.text)
        if key in seen:
            continue
        seen.add(key)
        out.append(doc)
    return out


def _strip_boilerplate(text: str, config: CleaningConfig) -> tuple:
    count = 0
    for tag in config.boilerplate_patterns:
        if not tag:
            continue
        occurrences = text.count(tag)
        if occurrences:
            count += occurrences
            text = text.replace(tag, " ")
    return _collapse_ws(text), count


def strip_boilerplate(text: str, config: CleaningConfig) -> str:
    return _strip_boilerplate(text, config)[0]


def _is_mention_char(ch: str) -> bool:
    if ch.isspace() or ch == "@":
        return False
    return not unicodedata.category(ch).startswith("P")


def _redact_users(text: str, config: CleaningConfig) -> tuple:
    out = []
    count = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "@":
            j = i + 1
            while j < n and _is_mention_char(text[j]):
                j += 1
            if j > i + 1:
                out.append(config.redaction_token)
                count += 1
                i = j
                continue
        out.append(ch)
        i += 1
    return "".join(out), count


def redact_users(text: str, config: CleaningConfig) -> str:
    """Replace every @-mention with the redaction token.  Idempotent."""
    return _redact_users(text, config)[0]


def _emojis_to_text(text: str, config: CleaningConfig) -> tuple:
    if not config.emoji_map:
        return text, 0
    # Longest key first so multi-codepoint sequences win over their prefixes.
    keys = sorted(config.emoji_map, key=len, reverse=True)
    out = []
    count = 0
    i = 0
    n = len(text)
    while i < n:
        for key in keys:
            if text.startswith(key, i):
                out.append(config.emoji_map[key])
                count += 1
                i += len(key)
                break
        else:
            out.append(text[i])
            i += 1
    return "".join(out), count


def emojis_to_text(text: str, config: CleaningConfig) -> str:
    """Convert mapped emoji to their platform text; unmapped emoji pass through."""
    return _emojis_to_text(text, config)[0]


def clean_pipeline(docs: Sequence[Document], config: CleaningConfig) -> tuple:
    """strip_boilerplate -> redact_users -> emojis_to_text -> dedupe.

    Returns (cleaned docs, CleanReport).  Documents whose cleaned text is
    shorter than ``config.min_length`` characters are dropped as
    irrelevant fragments.
    """
    transformed = []
    tag_removals = redactions = emoji_conversions = removed_short = 0
    for doc in docs:
        text, n_tags = _strip_boilerplate(doc.text, config)
        text, n_red = _redact_users(text, config)
        text, n_emoji = _emojis_to_text(text, config)
        tag_removals += n_tags
        redactions += n_red
        emoji_conversions += n_emoji
        text = _collapse_ws(text)
        if not text or len(text) < config.min_length:
            removed_short += 1
            continue
        transformed.append(doc if text == doc.text else replace(doc, text=text))
    deduped = dedupe(transformed)
    report = CleanReport(
        removed_dupes=len(transformed) - len(deduped),
        redactions=redactions,
        tag_removals=tag_removals,
        emoji_conversions=emoji_conversions,
        removed_short=removed_short,
    )
    return deduped, report
